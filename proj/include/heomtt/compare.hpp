#pragma once

#include <cstddef>

#include "heomtt/tt_heom.hpp"

namespace heomtt {

/// Storage estimates for a K-mode, level-L hierarchy: the dense scalar count
/// and the two TT counting formulas at rank rmax.
struct StorageReport {
    int n = 0, K = 0, L = 0, rmax = 0;
    std::size_t dense_scalars = 0;
    std::size_t tt_equal_rank = 0;   // all ranks equal rmax, n_heom = L + 1 per mode
    std::size_t tt_bound = 0;
};

StorageReport storage_report(int n, int K, int L, int rmax);

struct CompareReport {
    double max_population_deviation = 0.0;
    double dense_trace_drift = 0.0;
    double tt_trace_drift = 0.0;
    double dense_seconds = 0.0;
    double tt_seconds = 0.0;
    int tt_max_rank = 0;
    std::size_t dense_scalars = 0;
    std::size_t tt_scalars = 0;   // final state
    TTRunInfo tt_info;
};

/// Same model through the dense engine (cap hierarchy, RK4) and the TT
/// propagator, compared step by step on the populations.
CompareReport compare_backends(const SystemModel& model, int n_heom, const CMat& rho0, double dt, long n_steps,
                               const RankPolicy& policy);

} // namespace heomtt
