#pragma once

#include <vector>

#include "heomtt/heom_dense.hpp"
#include "heomtt/tt_heom.hpp"

namespace heomtt {

CMat reduce(const HEOMState& s);

struct SpectrumOptions {
    double t_max = 0.0;        // a.u.
    double dt = 0.0;           // a.u.
    double window = 0.0;       // damping time of exp(-t/window); <= 0 disables
    double omega_min_ev = 0.0;
    double omega_max_ev = 0.0;
    int n_omega = 2001;
    Integrator integrator = Integrator::RK4;
    bool normalize = true;
};

struct SpectrumResult {
    std::vector<double> grid_ev;
    std::vector<double> values;
    std::vector<double> times;          // a.u.
    std::vector<cplx> correlation;      // Tr[X(t)^dagger X(0)]
    double t_max = 0.0;
    double window = 0.0;
    bool unresolved = false;            // correlation not decayed within t_max

    double peak_ev() const;
};

/// mu^- = sum_{k != 0} mu_0k |0><k|.
CMat lowering_dipole(const CMat& mu);

/// Linear absorption from a factorized ground state: X(0) = rho_g mu^-.
SpectrumResult absorption_spectrum(const DenseHEOM& engine, const CMat& rho_ground, const SpectrumOptions& opts);
/// Emission from equilibrated ADOs: X(0) = mu^- rho_n for every ADO n.
SpectrumResult emission_spectrum(const DenseHEOM& engine, const HEOMState& equilibrium, const SpectrumOptions& opts);

/// Half-line transform Re sum_j w_j exp(i w t_j) c(t_j) exp(-t_j/window) dt
/// with trapezoid weights on a uniform grid.
std::vector<double> half_line_transform(const std::vector<double>& times, const std::vector<cplx>& c,
                                        const std::vector<double>& omega_au, double window);

/// I/sqrt(n) followed by the generalized Gell-Mann matrices scaled by
/// 1/sqrt(2): Hermitian and Tr(G_i G_j) = delta_ij.
std::vector<CMat> generator_basis(int n);

/// Superoperator matrices of the reduced map and its time derivative,
/// vec(Phi_t(X)) = A vec(X), sampled on a uniform grid.
struct DynamicalMap {
    std::vector<double> times;
    std::vector<CMat> A;
    std::vector<CMat> A_dot;
};

/// n^2 propagations of the projectors |j><k| with zero ADOs. The sample
/// stride counts integrator steps between stored samples. Up to jobs
/// propagations run concurrently; results do not depend on jobs.
DynamicalMap dynamical_map(const DenseHEOM& engine, double dt, long n_steps, long stride = 1, int jobs = 1);

struct VolumeResult {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> F;
    std::vector<double> V;
};

/// F_mn(t) = Tr(G_m G_n(t)) from n^2 propagations of the generators.
VolumeResult f_matrix_and_volume(const DenseHEOM& engine, double dt, long n_steps, long stride = 1, int jobs = 1);

/// Decoherence matrix D_ij = sum_m Tr[G_m G_i Lambda_t(G_m) G_j], i, j >= 1,
/// with Lambda_t = dA/dt A^-1. Returns the n^2 - 1 eigenvalues, ascending.
std::vector<double> canonical_rates(const CMat& A, const CMat& A_dot);
Eigen::MatrixXcd decoherence_matrix(const CMat& A, const CMat& A_dot);

/// Choi matrix sum_jk |j><k| (x) Phi(|j><k|) and its eigenvalues (ascending).
CMat choi_matrix(const CMat& A);
std::vector<double> choi_eigenvalues(const CMat& A);

/// True when the sequence increases somewhere by more than tol.
bool non_monotonic(const std::vector<double>& v, double tol);

} // namespace heomtt
