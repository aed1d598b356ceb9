#pragma once

#include <complex>
#include <numbers>

namespace heomtt {

using cplx = std::complex<double>;
inline constexpr cplx I_unit{0.0, 1.0};

// Everything inside the library runs in atomic units (hbar = 1).
namespace units {
inline constexpr double hartree_in_ev = 27.211386245988;
inline constexpr double au_time_in_fs = 0.02418884326585747;
inline constexpr double boltzmann_hartree_per_kelvin = 3.166811563455608e-6;

constexpr double ev_to_au(double ev) { return ev / hartree_in_ev; }
constexpr double au_to_ev(double au) { return au * hartree_in_ev; }
constexpr double fs_to_au(double fs) { return fs / au_time_in_fs; }
constexpr double au_to_fs(double t) { return t * au_time_in_fs; }
constexpr double beta_from_kelvin(double kelvin) {
    return 1.0 / (boltzmann_hartree_per_kelvin * kelvin);
}
} // namespace units

} // namespace heomtt
