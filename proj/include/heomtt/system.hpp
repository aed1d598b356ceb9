#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "heomtt/bath.hpp"
#include "heomtt/units.hpp"

namespace heomtt {

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// E(t) = -dA/dt with A(t) = (E0/w) sin^2(pi s/tau) sin(w s), s = t - t_start,
/// and zero outside [t_start, t_start + tau].
struct PulseField {
    double E0 = 0.0;
    double omega = 0.0;
    double tau = 0.0;
    double t_start = 0.0;

    double vector_potential(double t) const;
    double field(double t) const;
};

/// Amplitude giving a pi rotation: E0 = 2 pi / (mu tau).
double pi_pulse_amplitude(double dipole, double tau);

struct BathCoupling {
    CMat S;
    bath::CorrelationExpansion expansion;
};

/// One artificial decay mode of the hierarchy: an expansion term plus the
/// coupling operator of the bath it came from.
struct DecayMode {
    std::size_t bath;
    bath::ExpansionTerm term;
};

struct SystemModel {
    CMat H;
    CMat H_ren;
    CMat dipole;
    std::optional<PulseField> pulse;
    std::vector<BathCoupling> baths;

    int dim() const { return static_cast<int>(H.rows()); }
    bool time_dependent() const { return pulse.has_value() && dipole.size() > 0; }
    /// H + H_ren - mu E(t).
    CMat hamiltonian(double t) const;
    std::vector<DecayMode> modes() const;
    int mode_count() const;
    /// Throws ConfigError on shape or hermiticity violations.
    void validate() const;
};

CMat commutator_superop(const CMat& A);
/// -i (H (x) I - I (x) H^T) on row-major vectorized matrices.
CMat liouville_superop(const CMat& H);
/// Row-major vec: element (a, b) sits at a * n + b.
CVec vec(const CMat& m);
CMat unvec(const CVec& v, int n);

} // namespace heomtt
