#include "heomtt/system.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "heomtt/errors.hpp"

namespace heomtt {

namespace {

constexpr double pi = std::numbers::pi;

bool hermitian(const CMat& m, double tol) {
    if (m.rows() != m.cols())
        return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace

double PulseField::vector_potential(double t) const {
    const double s = t - t_start;
    if (s < 0.0 || s > tau || omega == 0.0)
        return 0.0;
    const double env = std::sin(pi * s / tau);
    return E0 / omega * env * env * std::sin(omega * s);
}

double PulseField::field(double t) const {
    const double s = t - t_start;
    if (s < 0.0 || s > tau || omega == 0.0)
        return 0.0;
    const double env = std::sin(pi * s / tau);
    const double denv2 = (pi / tau) * std::sin(2.0 * pi * s / tau);
    return -(E0 / omega) * (denv2 * std::sin(omega * s) + env * env * omega * std::cos(omega * s));
}

double pi_pulse_amplitude(double dipole, double tau) {
    if (dipole == 0.0 || !(tau > 0.0))
        throw ConfigError("pi pulse needs a nonzero dipole and a positive duration");
    return 2.0 * pi / (std::abs(dipole) * tau);
}

CMat SystemModel::hamiltonian(double t) const {
    CMat h = H;
    if (H_ren.size() > 0)
        h += H_ren;
    if (time_dependent())
        h -= dipole * pulse->field(t);
    return h;
}

std::vector<DecayMode> SystemModel::modes() const {
    std::vector<DecayMode> out;
    for (std::size_t b = 0; b < baths.size(); ++b)
        for (const auto& term : baths[b].expansion.terms)
            out.push_back({b, term});
    return out;
}

int SystemModel::mode_count() const {
    int k = 0;
    for (const auto& b : baths)
        k += static_cast<int>(b.expansion.size());
    return k;
}

void SystemModel::validate() const {
    const auto n = H.rows();
    if (n < 1 || H.cols() != n)
        throw ConfigError("Hamiltonian must be a nonempty square matrix");
    if (!hermitian(H, 1e-12))
        throw ConfigError("Hamiltonian is not Hermitian");
    if (H_ren.size() > 0 && (H_ren.rows() != n || !hermitian(H_ren, 1e-12)))
        throw ConfigError("renormalization term must be a Hermitian matrix of the system size");
    if (dipole.size() > 0 && (dipole.rows() != n || !hermitian(dipole, 1e-12)))
        throw ConfigError("dipole must be a Hermitian matrix of the system size");
    if (pulse && !(pulse->tau > 0.0))
        throw ConfigError("pulse duration must be positive");
    for (const auto& b : baths)
        if (b.S.rows() != n || !hermitian(b.S, 1e-12))
            throw ConfigError("coupling operator must be a Hermitian matrix of the system size");
}

CMat commutator_superop(const CMat& A) {
    const auto n = A.rows();
    const CMat id = CMat::Identity(n, n);
    return Eigen::kroneckerProduct(A, id).eval() - Eigen::kroneckerProduct(id, A.transpose()).eval();
}

CMat liouville_superop(const CMat& H) { return -I_unit * commutator_superop(H); }

CVec vec(const CMat& m) {
    CVec v(m.size());
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b)
            v(a * m.cols() + b) = m(a, b);
    return v;
}

CMat unvec(const CVec& v, int n) {
    CMat m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            m(a, b) = v(a * n + b);
    return m;
}

} // namespace heomtt
