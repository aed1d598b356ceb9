#include "doctest.h"

#include "../common/golden.hpp"
#include "helpers.hpp"
#include "heomtt/compare.hpp"
#include "heomtt/heom_dense.hpp"
#include "heomtt/tt_heom.hpp"

using namespace heomtt;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd dense_engine_matrix(const SystemModel& m, int n_heom) {
    auto space = std::make_shared<const HierarchySpace>(HierarchySpace::cap(std::max(1, m.mode_count()), n_heom - 1));
    DenseHEOM eng(m, space);
    return Eigen::MatrixXcd(eng.liouvillian(0.0, true));
}

} // namespace

TEST_CASE("assembled TT Liouvillian equals the dense hierarchy matrix") {
    std::mt19937 rng(7);
    for (int n : {2, 3})
        for (int K : {1, 2, 3})
            for (int nh : {2, 3}) {
                const SystemModel m = testing_util::random_model(n, K, rng, K > 1 ? 2 : 1);
                const auto L = assemble(m, nh);
                CHECK(max_abs_diff(tt::to_dense(L.op), dense_engine_matrix(m, nh)) < 1e-12);
            }
}

TEST_CASE("system part for a diagonal two-level Hamiltonian") {
    CMat H = CMat::Zero(2, 2);
    H(0, 0) = 0.3;
    H(1, 1) = -0.2;
    const Eigen::MatrixXcd d = tt::to_dense(build_system_part(H, 1, 1));
    CHECK(std::abs(d(0, 0)) < 1e-15);
    CHECK(std::abs(d(1, 1) - cplx(0, -0.5)) < 1e-15);
    CHECK(std::abs(d(2, 2) - cplx(0, 0.5)) < 1e-15);
    CHECK(std::abs(d(3, 3)) < 1e-15);
    CHECK(tt::to_dense(build_system_part(CMat::Zero(2, 2), 2, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bath-free assembly is the system part") {
    std::mt19937 rng(3);
    SystemModel m;
    m.H = testing_util::random_hermitian(3, rng);
    m.H_ren = CMat::Zero(3, 3);
    const auto L = assemble(m, 2);
    CHECK(max_abs_diff(tt::to_dense(L.op), tt::to_dense(build_system_part(m.H, 1, 2))) < 1e-13);
}

TEST_CASE("damping diagonal is i sum n_k gamma_k") {
    const std::vector<cplx> g{{0.2, 0.7}, {-0.1, 0.4}};
    const int nh = 3;
    const Eigen::MatrixXcd d = tt::to_dense(build_damping(g, 2, nh));
    CHECK((d - Eigen::MatrixXcd(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    const auto space = HierarchySpace::cap(2, nh - 1);
    for (int a = 0; a < 4; ++a)
        for (std::size_t i = 0; i < space.size(); ++i) {
            const cplx want = I_unit * (double(space.occupation(i, 0)) * g[0] + double(space.occupation(i, 1)) * g[1]);
            CHECK(std::abs(d(a * space.size() + i, a * space.size() + i) - want) < 1e-14);
        }
}

TEST_CASE("initial state and reduction") {
    std::mt19937 rng(11);
    const CMat rho = testing_util::random_matrix(2, rng);
    const auto v = initial_state(rho, 3, 3);
    for (int r : v.ranks())
        CHECK(r == 1);
    CHECK((reduce(v, 2) - rho).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(tt::element(v, {1, 0, 0, 0}) - rho(0, 1)) == 0.0);
    CHECK(std::abs(tt::element(v, {1, 0, 2, 0})) == 0.0);
}

TEST_CASE("KSL with zero operator leaves the state unchanged") {
    std::mt19937 rng(5);
    const CMat rho = testing_util::random_hermitian(2, rng);
    auto v = tt::pad_ranks(initial_state(rho, 2, 3), 3);
    const tt::TTOperator zero = tt::scale(tt::identity(v.modes()), 0.0);
    const auto w = ksl_step(zero, v, 0.5);
    CHECK((tt::to_dense(w) - tt::to_dense(v)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("KSL reproduces two-level Rabi oscillation") {
    const double omega = 0.01;
    SystemModel m;
    m.H = CMat::Zero(2, 2);
    m.H(0, 1) = m.H(1, 0) = omega / 2;
    m.H_ren = CMat::Zero(2, 2);
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    auto L = assemble(m, 2);
    RankPolicy pol;
    pol.rank_refresh = 0;
    pol.pad_rank = 4;
    const double dt = units::fs_to_au(0.01);
    double worst = 0.0;
    propagate_tt(L, m, initial_state(rho, 1, 2), 0.0, dt, 2000, pol, [&](const TTSample& s) {
        const double want = std::pow(std::cos(omega * s.t / 2), 2);
        worst = std::max(worst, std::abs(s.rho(0, 0).real() - want));
    });
    CHECK(worst < 1e-8);
}

TEST_CASE("KSL at full rank follows the dense engine") {
    std::mt19937 rng(21);
    SystemModel m = testing_util::random_model(2, 2, rng);
    m.H *= 0.05;
    for (auto& t : m.baths[0].expansion.terms) {
        t.alpha *= 0.01;
        t.alpha_tilde *= 0.01;
        t.gamma *= 0.05;
    }
    CMat rho = CMat::Zero(2, 2);
    rho(1, 1) = 1.0;
    const int nh = 3;
    auto space = std::make_shared<const HierarchySpace>(HierarchySpace::cap(2, nh - 1));
    DenseHEOM eng(m, space);
    // Finer dense reference so its own RK4 error stays out of the comparison.
    std::vector<CMat> ref;
    long step = 0;
    eng.propagate(HEOMState::factorized(space, rho), 0.05, 4000, Integrator::RK4, [&](const HEOMState& s) {
        if (step++ % 10 == 0)
            ref.push_back(s.rho());
    });
    auto L = assemble(m, nh);
    RankPolicy pol;
    pol.rank_refresh = 0;
    pol.pad_rank = 100;
    double worst = 0.0;
    std::size_t i = 0;
    propagate_tt(L, m, initial_state(rho, 2, nh), 0.0, 0.5, 400, pol, [&](const TTSample& s) {
        worst = std::max(worst, (s.rho - ref[i++]).cwiseAbs().maxCoeff());
    });
    CHECK(worst < 1e-6);
}

TEST_CASE("TT RK4 step matches the dense RK4 step") {
    std::mt19937 rng(8);
    const SystemModel m = testing_util::random_model(2, 2, rng);
    const int nh = 2;
    auto space = std::make_shared<const HierarchySpace>(HierarchySpace::cap(2, nh - 1));
    DenseHEOM eng(m, space);
    const CMat rho = testing_util::random_hermitian(2, rng);
    const auto L = assemble(m, nh);
    const auto v = rk4_tt_step(L.op, initial_state(rho, 2, nh), 0.05, 1e-14, tt::no_rank_cap);
    CVec x = HEOMState::factorized(space, rho).data;
    eng.step_rk4(x, 0.0, 0.05);
    // Dense state is ADO-major; the train is system-major.
    const tt::Vec tv = tt::to_dense(v);
    double worst = 0.0;
    for (std::size_t i = 0; i < space->size(); ++i)
        for (int a = 0; a < 4; ++a)
            worst = std::max(worst, std::abs(tv(a * space->size() + i) - x(i * 4 + a)));
    CHECK(worst < 1e-13);
}

TEST_CASE("rank stays fixed without refresh steps") {
    std::mt19937 rng(2);
    const SystemModel m = testing_util::random_model(2, 3, rng);
    auto L = assemble(m, 3);
    RankPolicy pol;
    pol.rank_refresh = 0;
    pol.pad_rank = 2;
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    std::vector<int> ranks;
    propagate_tt(L, m, initial_state(rho, 3, 3), 0.0, 0.01, 20, pol,
                 [&](const TTSample& s) { ranks.push_back(s.max_rank); });
    for (int r : ranks)
        CHECK(r == ranks.front());
}

namespace {

Eigen::MatrixXcd load_golden(const std::string& name, const golden::Symbols& sym) {
    return golden::load(std::string(HEOMTT_GOLDEN_DIR) + "/" + name, sym);
}

void check_layout(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) { CHECK(golden::mismatches(got, want) == 0); }

} // namespace

TEST_CASE("super-operator layouts for the two-level, two-mode example") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h11 = u(rng), h22 = u(rng), h12 = u(rng);
    CMat H(2, 2);
    H << h11, h12, h12, h22;
    CMat S = CMat::Zero(2, 2);
    S(1, 1) = 1.0;
    const std::vector<cplx> g{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const std::vector<cplx> a{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const std::vector<cplx> at{{u(rng), u(rng)}, {u(rng), u(rng)}};

    golden::Symbols sym{{"g1", g[0]}, {"g2", g[1]}, {"a1", a[0]}, {"a2", a[1]}, {"at1", at[0]}, {"at2", at[1]}};
    // L_S(ADO) written out for a real symmetric two-level Hamiltonian.
    const cplx mi(0.0, -1.0);
    const double Ls[4][4] = {{0, -h12, h12, 0}, {-h12, h11 - h22, 0, h12}, {h12, 0, h22 - h11, -h12}, {0, h12, -h12, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            sym["L" + std::to_string(i + 1) + std::to_string(j + 1)] = mi * Ls[i][j];

    check_layout(tt::to_dense(build_system_part(H, 2, 2)), load_golden("liouville_system.txt", sym));
    check_layout(tt::to_dense(build_damping(g, 2, 2)) / I_unit, load_golden("damping.txt", sym));
    const Eigen::MatrixXcd plus = tt::to_dense(build_plus(S, 0, 2, 2)) + tt::to_dense(build_plus(S, 1, 2, 2));
    check_layout(plus / mi, load_golden("plus.txt", sym));
    const Eigen::MatrixXcd minus =
        tt::to_dense(build_minus(S, a[0], at[0], 0, 2, 2)) + tt::to_dense(build_minus(S, a[1], at[1], 1, 2, 2));
    check_layout(minus / mi, load_golden("minus.txt", sym));

    // The assembled operator is the sum of the four layouts.
    SystemModel m;
    m.H = H;
    m.H_ren = CMat::Zero(2, 2);
    bath::CorrelationExpansion e;
    for (int k = 0; k < 2; ++k)
        e.terms.push_back({a[k], at[k], g[k], false});
    m.baths.push_back({S, e});
    const Eigen::MatrixXcd total = load_golden("liouville_system.txt", sym) + I_unit * load_golden("damping.txt", sym) +
                                   mi * (load_golden("plus.txt", sym) + load_golden("minus.txt", sym));
    CHECK(max_abs_diff(tt::to_dense(assemble(m, 2).op), total) < 1e-13);
}

TEST_CASE("storage report for the 80-mode level-5 hierarchy") {
    const auto r = storage_report(2, 80, 5, 80);
    CHECK(r.dense_scalars == 131206068);
    CHECK(r.tt_bound == 2528720);
    CHECK(r.tt_equal_rank == tt::storage_equal_rank(2, 6, 80, 80));
}

TEST_CASE("backend comparison on a small model") {
    // Seed picked so the unphysical random bath still gives bounded dynamics.
    std::mt19937 rng(21);
    SystemModel m = testing_util::random_model(2, 2, rng);
    m.H *= 0.05;
    for (auto& t : m.baths[0].expansion.terms) {
        t.alpha *= 0.01;
        t.alpha_tilde *= 0.01;
        t.gamma *= 0.05;
    }
    CMat rho = CMat::Zero(2, 2);
    rho(1, 1) = 1.0;
    RankPolicy pol;
    pol.rank_refresh = 0;
    pol.pad_rank = 100;
    const auto rep = compare_backends(m, 3, rho, 0.05, 2000, pol);
    CHECK(rep.max_population_deviation < 1e-6);
    CHECK(rep.dense_trace_drift < 1e-10);
    CHECK(rep.tt_trace_drift < 1e-8);
    CHECK(rep.dense_scalars == 4 * 9);
}
