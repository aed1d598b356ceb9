#include "doctest.h"

#include <cstdio>

#include "helpers.hpp"
#include "heomtt/checkpoint.hpp"
#include "heomtt/errors.hpp"
#include "heomtt/heom_dense.hpp"

using namespace heomtt;

namespace {

std::shared_ptr<const HierarchySpace> level_space(int K, int L) {
    return std::make_shared<const HierarchySpace>(HierarchySpace::level(K, L));
}

SystemModel rabi_model(double omega) {
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H(0, 1) = m.H(1, 0) = omega / 2;
    m.H_ren = CMat::Zero(2, 2);
    return m;
}

CMat ground(int n) {
    CMat r = CMat::Zero(n, n);
    r(0, 0) = 1.0;
    return r;
}

// Spin-boson with one Ohmic Lorentzian.
SystemModel spin_boson(double scale) {
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H(0, 0) = 0.5;
    m.H(1, 1) = -0.5;
    m.H(0, 1) = m.H(1, 0) = 0.2;
    m.H_ren = CMat::Zero(2, 2);
    CMat S = CMat::Zero(2, 2);
    S(0, 0) = 1.0;
    S(1, 1) = -1.0;
    const bath::LorentzianOhmicSD sd{{{scale, 1.0, 0.5}}};
    m.baths.push_back({S, bath::expand_correlation(sd, 1.0, 0)});
    return m;
}

} // namespace

TEST_CASE("zero state has zero derivative and the rhs is linear") {
    std::mt19937 rng(1);
    const SystemModel m = testing_util::random_model(3, 2, rng, 2);
    DenseHEOM eng(m, level_space(2, 3));
    CVec dx;
    eng.rhs(CVec::Zero(eng.size()), 0.0, dx);
    CHECK(dx.cwiseAbs().maxCoeff() == 0.0);
    const CVec x = testing_util::random_vector(eng.size(), rng), y = testing_util::random_vector(eng.size(), rng);
    const cplx a(0.3, -1.2), b(2.1, 0.4);
    CVec dxy, dy;
    eng.rhs(a * x + b * y, 0.0, dxy);
    eng.rhs(x, 0.0, dx);
    eng.rhs(y, 0.0, dy);
    CHECK((dxy - a * dx - b * dy).cwiseAbs().maxCoeff() < 1e-12 * dxy.cwiseAbs().maxCoeff());
}

TEST_CASE("Liouvillian matrix reproduces the rhs") {
    std::mt19937 rng(2);
    const SystemModel m = testing_util::random_model(2, 3, rng, 2);
    DenseHEOM eng(m, level_space(3, 2));
    const CVec x = testing_util::random_vector(eng.size(), rng);
    CVec dx;
    eng.rhs(x, 0.0, dx);
    CHECK((eng.liouvillian(0.0) * x - dx).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("bath-free dynamics is the Liouville equation") {
    SystemModel m = rabi_model(0.0);
    m.H = CMat::Zero(2, 2);
    auto sp = level_space(1, 0);
    DenseHEOM idle(m, sp);
    std::mt19937 rng(3);
    const CMat r = testing_util::random_hermitian(2, rng);
    CHECK((idle.propagate(HEOMState::factorized(sp, r), 0.1, 100).rho() - r).cwiseAbs().maxCoeff() < 1e-14);

    const double omega = 0.01;
    DenseHEOM eng(rabi_model(omega), sp);
    const double dt = units::fs_to_au(0.01);
    double worst = 0.0;
    eng.propagate(HEOMState::factorized(sp, ground(2)), dt, 20000, Integrator::RK4, [&](const HEOMState& s) {
        worst = std::max(worst, std::abs(s.rho()(0, 0).real() - std::pow(std::cos(omega * s.time / 2), 2)));
    });
    CHECK(worst < 1e-8);
}

TEST_CASE("damping alone rotates a first-level ADO by exp(i gamma t)") {
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H_ren = CMat::Zero(2, 2);
    bath::ExpansionTerm t{0.0, 0.0, {0.3, 0.2}, false};
    m.baths.push_back({CMat::Zero(2, 2), {{t}}});
    auto sp = level_space(1, 2);
    DenseHEOM eng(m, sp);
    std::mt19937 rng(4);
    HEOMState s = HEOMState::factorized(sp, CMat::Zero(2, 2));
    const CMat a = testing_util::random_matrix(2, rng);
    s.set_ado(1, a);
    const double T = 3.0;
    const HEOMState f = eng.propagate(s, 0.01, 300);
    CHECK((f.ado(1) - std::exp(I_unit * t.gamma * T) * a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("TC2 equals HEOM at level one") {
    std::mt19937 rng(5);
    const SystemModel m = testing_util::random_model(3, 3, rng, 2);
    auto sp = level_space(3, 1);
    DenseHEOM heom(m, sp), tc2(m, sp, DenseHEOM::Equation::TC2);
    CVec x = testing_util::random_vector(heom.size(), rng);
    CVec dh, dt;
    heom.rhs(x, 0.0, dh);
    // TC2 auxiliaries carry the opposite sign.
    CVec y = -x;
    y.head(9) = x.head(9);
    tc2.rhs_tc2(y, 0.0, dt);
    dt.tail(dt.size() - 9) *= -1.0;
    CHECK((dh - dt).cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, dh.cwiseAbs().maxCoeff()));
}

TEST_CASE("weak coupling: TC2 tracks converged HEOM") {
    const SystemModel m = spin_boson(0.005);
    auto s4 = level_space(2, 4), s1 = level_space(2, 1);
    DenseHEOM heom(m, s4), tc2(m, s1, DenseHEOM::Equation::TC2);
    const auto a = heom.propagate(HEOMState::factorized(s4, ground(2)), 0.05, 600).rho();
    const auto b = tc2.propagate(HEOMState::factorized(s1, ground(2)), 0.05, 600).rho();
    CHECK(std::abs(a(0, 0) - b(0, 0)) < 1e-2);
}

TEST_CASE("RK4 global order and RK45 agreement") {
    const SystemModel m = spin_boson(0.3);
    auto sp = level_space(2, 3);
    DenseHEOM eng(m, sp);
    const HEOMState s0 = HEOMState::factorized(sp, ground(2));
    const double T = 8.0;
    auto run = [&](double dt) { return eng.propagate(s0, dt, std::lround(T / dt)).data; };
    const CVec a = run(0.1), b = run(0.05), c = run(0.025);
    const double order = std::log2((a - b).norm() / (b - c).norm());
    CHECK(order == doctest::Approx(4.0).epsilon(0.1));
    const CVec r = eng.propagate(s0, 0.5, 16, Integrator::RK45).data;
    CHECK((r - c).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("trace, hermiticity and positivity audit") {
    const SystemModel m = spin_boson(0.3);
    auto sp = level_space(2, 4);
    DenseHEOM eng(m, sp);
    double tr = 0.0, herm = 0.0;
    eng.propagate(HEOMState::factorized(sp, ground(2)), 0.05, 400, Integrator::RK4, [&](const HEOMState& s) {
        const Audit a = audit(s.rho());
        tr = std::max(tr, a.trace_error);
        herm = std::max(herm, a.hermiticity);
    });
    CHECK(tr < 1e-8);
    CHECK(herm < 1e-10);
}

TEST_CASE("equilibration") {
    SystemModel free;
    free.H = CMat::Zero(2, 2);
    free.H(1, 1) = 0.1;
    free.H_ren = CMat::Zero(2, 2);
    auto sp0 = level_space(1, 0);
    RelaxOptions ro;
    ro.dt = 0.5;
    ro.window = 5.0;
    ro.tol = 1e-10;
    const auto [eq0, t0] = DenseHEOM(free, sp0).relax_to_equilibrium(HEOMState::factorized(sp0, ground(2)), ro);
    CHECK(t0 <= ro.window + ro.dt);

    const SystemModel m = spin_boson(0.3);
    auto sp = level_space(2, 4);
    DenseHEOM eng(m, sp);
    ro.dt = 0.1;
    ro.window = 20.0;
    ro.tol = 1e-8;
    ro.t_max = 4000.0;
    CMat other = CMat::Zero(2, 2);
    other(1, 1) = 1.0;
    const auto [e1, t1] = eng.relax_to_equilibrium(HEOMState::factorized(sp, ground(2)), ro);
    const auto [e2, t2] = eng.relax_to_equilibrium(HEOMState::factorized(sp, other), ro);
    CHECK((e1.data - e2.data).cwiseAbs().maxCoeff() < 1e-6);

    SystemModel driven = rabi_model(0.01);
    driven.dipole = CMat::Zero(2, 2);
    driven.dipole(0, 1) = driven.dipole(1, 0) = 1.0;
    driven.pulse = PulseField{0.01, 0.1, 50.0, 0.0};
    CHECK_THROWS_AS(DenseHEOM(driven, sp0).relax_to_equilibrium(HEOMState::factorized(sp0, ground(2)), ro),
                    ConfigError);
}

TEST_CASE("pulse field has zero area") {
    const PulseField f{0.02, 0.15, 400.0, 30.0};
    double area = 0.0;
    const int N = 200000;
    const double h = f.tau / N;
    for (int i = 0; i <= N; ++i)
        area += (i == 0 || i == N ? 0.5 : 1.0) * f.field(f.t_start + i * h) * h;
    CHECK(std::abs(area) < 1e-10);
    CHECK(f.field(f.t_start - 1.0) == 0.0);
    CHECK(pi_pulse_amplitude(2.0, 100.0) == doctest::Approx(2 * 3.14159265358979323846 / 200.0));
}

TEST_CASE("dense checkpoint round trip") {
    std::mt19937 rng(9);
    auto sp = level_space(2, 3);
    HEOMState s = HEOMState::factorized(sp, ground(2));
    s.data = testing_util::random_vector(s.data.size(), rng);
    s.time = 12.5;
    const std::string path = "heomtt_test_ckpt.bin";
    save_dense(path, s);
    const HEOMState r = load_dense(path);
    CHECK(r.time == 12.5);
    CHECK(r.space->size() == sp->size());
    CHECK((r.data - s.data).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_dense("does_not_exist.bin"), ConfigError);
}
