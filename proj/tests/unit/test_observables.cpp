#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "heomtt/observables.hpp"

using namespace heomtt;

namespace {

std::shared_ptr<const HierarchySpace> level_space(int K, int L) {
    return std::make_shared<const HierarchySpace>(HierarchySpace::level(K, L));
}

SystemModel closed_model(int n, std::mt19937& rng) {
    SystemModel m;
    m.H = 0.3 * testing_util::random_hermitian(n, rng);
    m.H_ren = CMat::Zero(n, n);
    return m;
}

SystemModel damped_two_level() {
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H(0, 0) = 0.5;
    m.H(1, 1) = -0.5;
    m.H(0, 1) = m.H(1, 0) = 0.2;
    m.H_ren = CMat::Zero(2, 2);
    CMat S = CMat::Zero(2, 2);
    S(0, 0) = 1.0;
    S(1, 1) = -1.0;
    m.baths.push_back({S, bath::expand_correlation(bath::LorentzianOhmicSD{{{0.3, 1.0, 0.5}}}, 1.0, 0)});
    return m;
}

} // namespace

TEST_CASE("generator basis is orthonormal, Hermitian and traceless beyond G0") {
    for (int n = 1; n <= 4; ++n) {
        const auto G = generator_basis(n);
        REQUIRE(G.size() == static_cast<std::size_t>(n * n));
        for (std::size_t i = 0; i < G.size(); ++i) {
            CHECK((G[i] - G[i].adjoint()).cwiseAbs().maxCoeff() < 1e-15);
            if (i > 0)
                CHECK(std::abs(G[i].trace()) < 1e-14);
            for (std::size_t j = 0; j < G.size(); ++j)
                CHECK(std::abs((G[i] * G[j]).trace() - (i == j ? 1.0 : 0.0)) < 1e-14);
        }
    }
}

TEST_CASE("two-level generators are the Pauli matrices over sqrt 2") {
    const auto G = generator_basis(2);
    const double r = 1.0 / std::sqrt(2.0);
    CMat sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, cplx(0, -1), cplx(0, 1), 0;
    sz << 1, 0, 0, -1;
    CHECK((G[0] - r * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((G[1] - r * sx).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((G[2] - r * sy).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((G[3] - r * sz).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("generator expansion reconstructs a Hermitian matrix") {
    std::mt19937 rng(5);
    for (int n = 2; n <= 4; ++n) {
        const CMat A = testing_util::random_hermitian(n, rng);
        CMat B = CMat::Zero(n, n);
        for (const CMat& g : generator_basis(n)) {
            const cplx c = (g * A).trace();
            CHECK(std::abs(c.imag()) < 1e-13);
            B += c * g;
        }
        CHECK((A - B).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("F matrix is the identity at t = 0 and V stays 1 under unitary dynamics") {
    std::mt19937 rng(2);
    for (int n : {2, 3}) {
        DenseHEOM eng(closed_model(n, rng), level_space(1, 1));
        const auto r = f_matrix_and_volume(eng, 0.01, 2000, 200);
        CHECK((r.F[0] - Eigen::MatrixXd::Identity(n * n, n * n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(r.V[0] - 1.0) < 1e-12);
        for (double v : r.V)
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-8);
    }
    DenseHEOM open(damped_two_level(), level_space(2, 3));
    const auto r = f_matrix_and_volume(open, 0.05, 200, 50);
    CHECK((r.F[0] - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.V.back() < 1.0);
}

TEST_CASE("Choi eigenvalues: identity map and unitary rank one") {
    std::mt19937 rng(9);
    for (int n : {2, 3}) {
        DenseHEOM eng(closed_model(n, rng), level_space(1, 1));
        const auto map = dynamical_map(eng, 0.01, 1500, 500);
        const auto ev0 = choi_eigenvalues(map.A[0]);
        CHECK(std::abs(ev0.back() - n) < 1e-12);
        for (std::size_t i = 0; i + 1 < ev0.size(); ++i)
            CHECK(std::abs(ev0[i]) < 1e-12);
        for (const CMat& A : map.A) {
            const auto ev = choi_eigenvalues(A);
            CHECK(std::abs(ev.back() - n) < 1e-8);
            for (std::size_t i = 0; i + 1 < ev.size(); ++i)
                CHECK(std::abs(ev[i]) < 1e-8);
        }
    }
}

TEST_CASE("canonical rates vanish without a bath") {
    std::mt19937 rng(4);
    for (int n : {2, 3}) {
        DenseHEOM eng(closed_model(n, rng), level_space(1, 1));
        const auto map = dynamical_map(eng, 0.05, 200, 50);
        for (std::size_t q = 0; q < map.A.size(); ++q)
            for (double r : canonical_rates(map.A[q], map.A_dot[q]))
                CHECK(std::abs(r) < 1e-10);
    }
}

TEST_CASE("propagated generators equal the combination of propagated projectors") {
    DenseHEOM eng(damped_two_level(), level_space(2, 3));
    const long steps = 200, stride = 50;
    const auto map = dynamical_map(eng, 0.05, steps, stride);
    const auto G = generator_basis(2);
    for (const CMat& g : G) {
        long step = 0;
        eng.propagate(HEOMState::factorized(eng.space_ptr(), g), 0.05, steps, Integrator::RK4,
                      [&](const HEOMState& s) {
                          if (step % stride == 0)
                              CHECK((vec(s.rho()) - map.A[step / stride] * vec(g)).cwiseAbs().maxCoeff() < 1e-10);
                          ++step;
                      });
    }
}

TEST_CASE("half-line transform of a damped phase is a Lorentzian") {
    const double eps = 0.1, tau = 200.0, dt = 0.05;
    std::vector<double> t;
    std::vector<cplx> c;
    for (int j = 0; j <= 40000; ++j) {
        t.push_back(j * dt);
        c.push_back(std::exp(cplx(0.0, -eps * j * dt)));
    }
    const std::vector<double> w{0.09, 0.1, 0.105, 0.12};
    const auto s = half_line_transform(t, c, w, tau);
    for (std::size_t q = 0; q < w.size(); ++q) {
        const double d = w[q] - eps;
        const double want = (1.0 / tau) / (d * d + 1.0 / (tau * tau));
        CHECK(std::abs(s[q] - want) < 1e-3 * want);
    }
}

TEST_CASE("uncoupled absorption peaks at the transition energy") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.05, 0.15);
    for (int n = 2; n <= 4; ++n) {
        SystemModel m;
        m.H = CMat::Zero(n, n);
        for (int k = 1; k < n; ++k)
            m.H(k, k) = u(rng);
        m.H_ren = CMat::Zero(n, n);
        m.dipole = CMat::Zero(n, n);
        const int bright = n - 1;
        m.dipole(0, bright) = m.dipole(bright, 0) = 1.0;
        DenseHEOM eng(m, level_space(1, 1));
        SpectrumOptions o;
        o.dt = 1.0;
        o.window = 2000.0;
        o.t_max = 5.0 * o.window;
        o.omega_min_ev = 0.0;
        o.omega_max_ev = 5.0;
        o.n_omega = 2001;
        CMat rho = CMat::Zero(n, n);
        rho(0, 0) = 1.0;
        const auto abs = absorption_spectrum(eng, rho, o);
        const double bin = (o.omega_max_ev - o.omega_min_ev) / (o.n_omega - 1);
        const double gap = units::au_to_ev(m.H(bright, bright).real());
        CHECK(std::abs(abs.peak_ev() - gap) <= bin);
        CHECK(*std::max_element(abs.values.begin(), abs.values.end()) == 1.0);
        CHECK_FALSE(abs.unresolved);
        for (double v : abs.values)
            CHECK(std::isfinite(v));

        CMat rho_e = CMat::Zero(n, n);
        rho_e(bright, bright) = 1.0;
        const auto em = emission_spectrum(eng, HEOMState::factorized(eng.space_ptr(), rho_e), o);
        CHECK(std::abs(em.peak_ev() - abs.peak_ev()) < 1e-12);
    }
}

TEST_CASE("short correlation window is flagged unresolved") {
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H(1, 1) = 0.1;
    m.H_ren = CMat::Zero(2, 2);
    m.dipole = CMat::Zero(2, 2);
    m.dipole(0, 1) = m.dipole(1, 0) = 1.0;
    DenseHEOM eng(m, level_space(1, 1));
    SpectrumOptions o;
    o.dt = 1.0;
    o.t_max = 100.0;
    o.omega_max_ev = 5.0;
    o.n_omega = 101;
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK(absorption_spectrum(eng, rho, o).unresolved);
}

TEST_CASE("non-monotonic detection") {
    CHECK_FALSE(non_monotonic({1.0, 0.9, 0.9, 0.2}, 1e-12));
    CHECK(non_monotonic({1.0, 0.5, 0.6}, 1e-12));
    CHECK_FALSE(non_monotonic({1.0, 0.5, 0.5 + 1e-13}, 1e-12));
}

TEST_CASE("concurrent propagations give identical maps") {
    DenseHEOM eng(damped_two_level(), level_space(2, 3));
    const auto a = dynamical_map(eng, 0.05, 100, 25, 1);
    const auto b = dynamical_map(eng, 0.05, 100, 25, 3);
    for (std::size_t q = 0; q < a.A.size(); ++q) {
        CHECK((a.A[q] - b.A[q]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.A_dot[q] - b.A_dot[q]).cwiseAbs().maxCoeff() == 0.0);
    }
    const auto va = f_matrix_and_volume(eng, 0.05, 100, 25, 1);
    const auto vb = f_matrix_and_volume(eng, 0.05, 100, 25, 4);
    CHECK(va.V == vb.V);
}
