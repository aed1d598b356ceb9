#pragma once

#include <functional>

#include "heomtt/system.hpp"
#include "heomtt/tt.hpp"

namespace heomtt {

/// HEOM super-Liouvillian on modes (n^2, n_heom, ..., n_heom). The bath part
/// is cached; for time-dependent Hamiltonians only the system part changes.
struct TTLiouvillian {
    tt::TTOperator op;
    tt::TTOperator bath_part;
    int n = 0;
    int K = 0;
    int n_heom = 0;
    double eps = 0.0;
    int rmax = tt::no_rank_cap;
    bool time_dependent = false;
    double built_for = 0.0;
};

/// L_S(ADO) (x) I (x) ... (x) I with L_S(ADO) = -i (H (x) I - I (x) H^T).
tt::TTOperator build_system_part(const CMat& H, int K, int n_heom);
/// sum_k i gamma_k I (x) ... (x) diag(0, 1, .., n_heom-1)_k (x) ... as a rank-2 train.
tt::TTOperator build_damping(const std::vector<cplx>& gammas, int n, int n_heom);
/// -i (S (x) I - I (x) S^T) (x) M'_k with M'_{l,l+1} = 1 on mode k (0-based).
tt::TTOperator build_plus(const CMat& S, int k, int K, int n_heom);
/// -i (alpha S (x) I - alpha~ I (x) S^T) (x) M''_k with M''_{l,l-1} = l.
tt::TTOperator build_minus(const CMat& S, cplx alpha, cplx alpha_tilde, int k, int K, int n_heom);

/// Sum of all parts, rounded after every addition. With an explicit rank cap
/// that actually binds, throws ResourceError: the operator must stay exact.
TTLiouvillian assemble(const SystemModel& model, int n_heom, double eps = 1e-14, int rmax = tt::no_rank_cap,
                       double t = 0.0);
/// Rebuild the system part for time t (no-op for static models).
void update_time(TTLiouvillian& L, const SystemModel& model, double t);

/// Rank-one factorized state: vec(rho) on the system core, e_0 on every mode.
tt::TTVector initial_state(const CMat& rho, int K, int n_heom);
/// The physical density matrix: zero-occupation slice of every mode core.
CMat reduce(const tt::TTVector& v, int n);

struct KSLOptions {
    int substeps = 4;
};

struct KSLStats {
    int rank_deficient_bonds = 0;
};

/// One symmetric second-order projector-splitting step at fixed ranks.
tt::TTVector ksl_step(const tt::TTOperator& L, const tt::TTVector& v, double dt, const KSLOptions& opts = {},
                      KSLStats* stats = nullptr);

/// Classical RK4 in TT algebra with rounding after every stage.
tt::TTVector rk4_tt_step(const tt::TTOperator& L, const tt::TTVector& v, double dt, double eps, int rmax);

struct RankPolicy {
    int rank_refresh = 10;   // every n-th step is an RK4 step; 0 disables
    double eps = 1e-12;
    int rmax = 20;
    int pad_rank = 0;        // pad the initial state to this rank
    int substeps = 4;
    double norm_watchdog = 1e-3;
};

struct TTSample {
    double t;
    CMat rho;
    cplx trace;
    int max_rank;
    double norm;
};

struct TTRunInfo {
    bool rank_capped = false;
    bool norm_alarm = false;
    int rank_deficient_bonds = 0;
    tt::TTVector final_state;
};

/// KSL steps with a rank-adaptive RK4 step every rank_refresh steps. The
/// observer receives the initial sample and one per step.
TTRunInfo propagate_tt(TTLiouvillian& L, const SystemModel& model, tt::TTVector v, double t0, double dt,
                       long n_steps, const RankPolicy& policy, const std::function<void(const TTSample&)>& observer);

} // namespace heomtt
