#pragma once

#include <functional>
#include <memory>

#include <Eigen/Sparse>

#include "heomtt/hierarchy.hpp"
#include "heomtt/system.hpp"

namespace heomtt {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Full ADO stack. ADO i occupies data[i*n*n, (i+1)*n*n) as a row-major n x n
/// block; ADO 0 is the physical density matrix.
struct HEOMState {
    std::shared_ptr<const HierarchySpace> space;
    int n = 0;
    CVec data;
    double time = 0.0;

    static HEOMState factorized(std::shared_ptr<const HierarchySpace> space, const CMat& rho);

    CMat ado(std::size_t i) const;
    void set_ado(std::size_t i, const CMat& m);
    CMat rho() const { return ado(0); }
};

enum class Integrator { RK4, RK45 };

struct AdaptiveOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double dt_min = 1e-6;    // a.u.; rejections below this are treated as stiffness
    int max_rejections = 60;
};

struct RelaxOptions {
    double dt = 1.0;           // a.u.
    double window = 400.0;     // trailing window length, a.u.
    double tol = 1e-6;
    double t_max = 1e5;
    Integrator integrator = Integrator::RK4;
};

/// Snapshot-level quality checks of a physical density matrix.
struct Audit {
    double trace_error;
    double hermiticity;
    double min_eigenvalue;
};
Audit audit(const CMat& rho);

/// Dense truncated-hierarchy propagator. Mode k of the hierarchy is the k-th
/// entry of SystemModel::modes().
class DenseHEOM {
public:
    enum class Equation { HEOM, TC2 };

    DenseHEOM(SystemModel model, std::shared_ptr<const HierarchySpace> space, Equation eq = Equation::HEOM);

    const SystemModel& model() const { return model_; }
    const HierarchySpace& space() const { return *space_; }
    std::shared_ptr<const HierarchySpace> space_ptr() const { return space_; }
    int dim() const { return n_; }
    std::size_t size() const { return space_->size() * n_ * n_; }

    /// d/dt of the ADO stack at time t.
    void rhs(const CVec& x, double t, CVec& dx) const;
    /// Second-order (TC2) equations on a level-1 hierarchy. ADOs use the
    /// opposite sign from the HEOM ones, rho_k(TC2) = -rho_k(HEOM).
    void rhs_tc2(const CVec& x, double t, CVec& dx) const;

    /// Liouvillian matrix assembled entry by entry from the hierarchy
    /// equations. With system_major the row index is alpha * count + ado,
    /// matching the TT ordering; otherwise ado * n^2 + alpha.
    SpMat liouvillian(double t, bool system_major = false) const;

    void step_rk4(CVec& x, double t, double dt) const;

    using Observer = std::function<void(const HEOMState&)>;
    /// n_steps outputs spaced by dt. RK45 takes adaptive internal steps but
    /// lands on every output time. The observer sees the initial state too.
    HEOMState propagate(HEOMState state, double dt, long n_steps, Integrator integrator = Integrator::RK4,
                        const Observer& observer = {}, const AdaptiveOptions& opts = {}) const;

    /// Collective bath-mode expectation per bath: sum of the traces of its
    /// first-level ADOs.
    std::vector<cplx> bath_expectation(const HEOMState& s) const;

    /// Propagate until populations and bath expectations are stationary
    /// over a trailing window. Returns the state and the time reached.
    std::pair<HEOMState, double> relax_to_equilibrium(HEOMState state, const RelaxOptions& opts) const;

private:
    void eval(const CVec& x, double t, CVec& dx) const;
    void rk45_step(CVec& x, double t, double& dt, double t_end, const AdaptiveOptions& opts) const;

    SystemModel model_;
    std::shared_ptr<const HierarchySpace> space_;
    Equation eq_;
    int n_;
    std::vector<DecayMode> modes_;
    std::vector<CMat> S_;   // per bath
};

} // namespace heomtt
