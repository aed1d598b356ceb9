#include "heomtt/compare.hpp"

#include <chrono>
#include <cmath>

#include "heomtt/heom_dense.hpp"
#include "heomtt/hierarchy.hpp"

namespace heomtt {

StorageReport storage_report(int n, int K, int L, int rmax) {
    StorageReport r;
    r.n = n;
    r.K = K;
    r.L = L;
    r.rmax = rmax;
    const std::size_t c = count_level(K, L);
    r.dense_scalars = c == SIZE_MAX ? SIZE_MAX : static_cast<std::size_t>(n) * n * c;
    r.tt_equal_rank = tt::storage_equal_rank(n, L + 1, K, rmax);
    r.tt_bound = tt::storage_bound(n, L, K, rmax);
    return r;
}

CompareReport compare_backends(const SystemModel& model, int n_heom, const CMat& rho0, double dt, long n_steps,
                               const RankPolicy& policy) {
    using clock = std::chrono::steady_clock;
    const int K = std::max(1, model.mode_count());
    CompareReport rep;

    auto space = std::make_shared<const HierarchySpace>(HierarchySpace::cap(K, n_heom - 1));
    DenseHEOM eng(model, space);
    rep.dense_scalars = eng.size();
    std::vector<Eigen::VectorXd> pops;
    pops.reserve(n_steps + 1);
    auto t0 = clock::now();
    eng.propagate(HEOMState::factorized(space, rho0), dt, n_steps, Integrator::RK4, [&](const HEOMState& s) {
        const CMat r = s.rho();
        pops.push_back(r.diagonal().real());
        rep.dense_trace_drift = std::max(rep.dense_trace_drift, std::abs(r.trace() - rho0.trace()));
    });
    rep.dense_seconds = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    TTLiouvillian L = assemble(model, n_heom);
    std::size_t i = 0;
    rep.tt_info = propagate_tt(L, model, initial_state(rho0, K, n_heom), 0.0, dt, n_steps, policy,
                               [&](const TTSample& s) {
                                   const Eigen::VectorXd p = s.rho.diagonal().real();
                                   rep.max_population_deviation =
                                       std::max(rep.max_population_deviation, (p - pops[i++]).cwiseAbs().maxCoeff());
                                   rep.tt_trace_drift = std::max(rep.tt_trace_drift, std::abs(s.trace - rho0.trace()));
                                   rep.tt_max_rank = std::max(rep.tt_max_rank, s.max_rank);
                               });
    rep.tt_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rep.tt_scalars = rep.tt_info.final_state.storage();
    return rep;
}

} // namespace heomtt
