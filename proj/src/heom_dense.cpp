#include "heomtt/heom_dense.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "heomtt/errors.hpp"

namespace heomtt {

using CMap = Eigen::Map<CMat>;
using CConstMap = Eigen::Map<const CMat>;

HEOMState HEOMState::factorized(std::shared_ptr<const HierarchySpace> space, const CMat& rho) {
    if (rho.rows() != rho.cols())
        throw ConfigError("initial density matrix must be square");
    HEOMState s;
    s.n = static_cast<int>(rho.rows());
    s.data = CVec::Zero(static_cast<Eigen::Index>(space->size()) * s.n * s.n);
    s.space = std::move(space);
    s.set_ado(0, rho);
    return s;
}

CMat HEOMState::ado(std::size_t i) const {
    return CConstMap(data.data() + i * n * n, n, n);
}

void HEOMState::set_ado(std::size_t i, const CMat& m) {
    CMap(data.data() + i * n * n, n, n) = m;
}

Audit audit(const CMat& rho) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    return {std::abs(rho.trace() - 1.0), (rho - rho.adjoint()).cwiseAbs().maxCoeff(),
            es.eigenvalues().minCoeff()};
}

DenseHEOM::DenseHEOM(SystemModel model, std::shared_ptr<const HierarchySpace> space, Equation eq)
    : model_(std::move(model)), space_(std::move(space)), eq_(eq) {
    model_.validate();
    n_ = model_.dim();
    modes_ = model_.modes();
    for (const auto& b : model_.baths)
        S_.push_back(b.S);
    if (static_cast<int>(modes_.size()) != space_->modes() && !(modes_.empty() && space_->modes() == 1))
        throw ConfigError("hierarchy mode count does not match the bath expansion");
    if (eq_ == Equation::TC2 && (space_->truncation() != Truncation::Level || space_->limit() != 1))
        throw ConfigError("TC2 equations need a level-1 hierarchy");
}

void DenseHEOM::eval(const CVec& x, double t, CVec& dx) const {
    if (eq_ == Equation::TC2)
        rhs_tc2(x, t, dx);
    else
        rhs(x, t, dx);
}

void DenseHEOM::rhs(const CVec& x, double t, CVec& dx) const {
    const CMat H = model_.hamiltonian(t);
    const int n = n_;
    const long n2 = static_cast<long>(n) * n;
    const long count = static_cast<long>(space_->size());
    const int K = static_cast<int>(modes_.size());
    const std::size_t nb = S_.size();
    dx.resize(x.size());

#pragma omp parallel
    {
        std::vector<CMat> up(nb, CMat(n, n)), down(nb, CMat(n, n)), down_t(nb, CMat(n, n));
        CMat tmp(n, n);
#pragma omp for schedule(static)
        for (long i = 0; i < count; ++i) {
            CConstMap rho(x.data() + i * n2, n, n);
            CMap d(dx.data() + i * n2, n, n);
            cplx damp = 0.0;
            for (int k = 0; k < K; ++k)
                damp += static_cast<double>(space_->occupation(i, k)) * modes_[k].term.gamma;
            tmp.noalias() = H * rho;
            tmp.noalias() -= rho * H;
            d = -I_unit * tmp + (I_unit * damp) * rho;
            for (std::size_t b = 0; b < nb; ++b) {
                up[b].setZero();
                down[b].setZero();
                down_t[b].setZero();
            }
            for (int k = 0; k < K; ++k) {
                const std::size_t b = modes_[k].bath;
                if (auto j = space_->raise(i, k))
                    up[b] += CConstMap(x.data() + *j * n2, n, n);
                if (auto j = space_->lower(i, k)) {
                    const double nk = space_->occupation(i, k);
                    CConstMap lo(x.data() + *j * n2, n, n);
                    down[b] += (nk * modes_[k].term.alpha) * lo;
                    down_t[b] += (nk * modes_[k].term.alpha_tilde) * lo;
                }
            }
            for (std::size_t b = 0; b < nb; ++b) {
                tmp.noalias() = S_[b] * up[b];
                tmp.noalias() -= up[b] * S_[b];
                tmp.noalias() += S_[b] * down[b];
                tmp.noalias() -= down_t[b] * S_[b];
                d -= I_unit * tmp;
            }
        }
    }
}

void DenseHEOM::rhs_tc2(const CVec& x, double t, CVec& dx) const {
    if (space_->truncation() != Truncation::Level || space_->limit() != 1)
        throw ConfigError("TC2 equations need a level-1 hierarchy");
    const CMat H = model_.hamiltonian(t);
    const int n = n_;
    const long n2 = static_cast<long>(n) * n;
    const int K = static_cast<int>(modes_.size());
    dx.resize(x.size());
    CConstMap rho_s(x.data(), n, n);
    CMap d_s(dx.data(), n, n);
    d_s = -I_unit * (H * rho_s - rho_s * H);
    for (int k = 0; k < K; ++k) {
        const auto& term = modes_[k].term;
        const CMat& S = S_[modes_[k].bath];
        MultiIndex e(K, 0);
        e[k] = 1;
        const std::size_t j = *space_->find(e);
        CConstMap rk(x.data() + j * n2, n, n);
        CMap dk(dx.data() + j * n2, n, n);
        d_s += I_unit * (S * rk - rk * S);
        dk = I_unit * term.gamma * rk - I_unit * (H * rk - rk * H) +
             I_unit * (term.alpha * (S * rho_s) - term.alpha_tilde * (rho_s * S));
    }
}

SpMat DenseHEOM::liouvillian(double t, bool system_major) const {
    const CMat H = model_.hamiltonian(t);
    const int n = n_;
    const long n2 = static_cast<long>(n) * n;
    const long count = static_cast<long>(space_->size());
    const int K = static_cast<int>(modes_.size());
    auto pos = [&](long ado, int a, int b) -> long {
        const long alpha = a * n + b;
        return system_major ? alpha * count + ado : ado * n2 + alpha;
    };
    std::vector<Eigen::Triplet<cplx>> trip;
    for (long i = 0; i < count; ++i) {
        cplx damp = 0.0;
        for (int k = 0; k < K; ++k)
            damp += static_cast<double>(space_->occupation(i, k)) * modes_[k].term.gamma;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const long row = pos(i, a, b);
                // -i (H rho - rho H)
                for (int c = 0; c < n; ++c) {
                    trip.emplace_back(row, pos(i, c, b), -I_unit * H(a, c));
                    trip.emplace_back(row, pos(i, a, c), I_unit * H(c, b));
                }
                trip.emplace_back(row, row, I_unit * damp);
                for (int k = 0; k < K; ++k) {
                    const CMat& S = S_[modes_[k].bath];
                    if (auto j = space_->raise(i, k)) {
                        // -i (S rho_j - rho_j S)
                        for (int c = 0; c < n; ++c) {
                            trip.emplace_back(row, pos(*j, c, b), -I_unit * S(a, c));
                            trip.emplace_back(row, pos(*j, a, c), I_unit * S(c, b));
                        }
                    }
                    if (auto j = space_->lower(i, k)) {
                        // -i n_k (alpha S rho_j - alpha~ rho_j S)
                        const double nk = space_->occupation(i, k);
                        for (int c = 0; c < n; ++c) {
                            trip.emplace_back(row, pos(*j, c, b), -I_unit * nk * modes_[k].term.alpha * S(a, c));
                            trip.emplace_back(row, pos(*j, a, c),
                                              I_unit * nk * modes_[k].term.alpha_tilde * S(c, b));
                        }
                    }
                }
            }
        }
    }
    SpMat L(count * n2, count * n2);
    L.setFromTriplets(trip.begin(), trip.end());
    L.prune(cplx(0.0));
    return L;
}

void DenseHEOM::step_rk4(CVec& x, double t, double dt) const {
    CVec k1, k2, k3, k4;
    eval(x, t, k1);
    eval(x + (0.5 * dt) * k1, t + 0.5 * dt, k2);
    eval(x + (0.5 * dt) * k2, t + 0.5 * dt, k3);
    eval(x + dt * k3, t + dt, k4);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

// Cash-Karp embedded 4(5) tableau.
constexpr double ck_c[6] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0};
constexpr double ck_a[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 5.0, 0, 0, 0, 0},
    {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0},
    {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0, 0},
    {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0},
    {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0},
};
constexpr double ck_b5[6] = {37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0};
constexpr double ck_b4[6] = {2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0, 277.0 / 14336.0, 0.25};

} // namespace

void DenseHEOM::rk45_step(CVec& x, double t, double& dt, double t_end, const AdaptiveOptions& opts) const {
    CVec k[6];
    int rejections = 0;
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        for (int s = 0; s < 6; ++s) {
            CVec xs = x;
            for (int j = 0; j < s; ++j)
                if (ck_a[s][j] != 0.0)
                    xs += (h * ck_a[s][j]) * k[j];
            eval(xs, t + ck_c[s] * h, k[s]);
        }
        CVec x5 = x, err = CVec::Zero(x.size());
        for (int s = 0; s < 6; ++s) {
            x5 += (h * ck_b5[s]) * k[s];
            err += (h * (ck_b5[s] - ck_b4[s])) * k[s];
        }
        double e = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double sc = opts.atol + opts.rtol * std::max(std::abs(x[i]), std::abs(x5[i]));
            e = std::max(e, std::abs(err[i]) / sc);
        }
        if (e <= 1.0) {
            x = std::move(x5);
            t += h;
            rejections = 0;
            const double grow = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
            // Keep the trial size when the last step was clipped to the output time.
            if (h == dt)
                dt = h * std::clamp(grow, 0.2, 5.0);
        } else {
            dt = h * std::max(0.2, 0.9 * std::pow(e, -0.25));
            if (++rejections > opts.max_rejections || dt < opts.dt_min)
                throw ConvergenceError("adaptive integrator failed: step size collapsed (stiff problem?)");
        }
    }
}

HEOMState DenseHEOM::propagate(HEOMState state, double dt, long n_steps, Integrator integrator,
                               const Observer& observer, const AdaptiveOptions& opts) const {
    if (!(dt > 0.0))
        throw ConfigError("time step must be positive");
    if (state.data.size() != static_cast<Eigen::Index>(size()))
        throw ConfigError("state does not match the hierarchy");
    if (observer)
        observer(state);
    double h = dt;
    const double t0 = state.time;
    for (long s = 0; s < n_steps; ++s) {
        const double t = t0 + s * dt;
        if (integrator == Integrator::RK4)
            step_rk4(state.data, t, dt);
        else
            rk45_step(state.data, t, h, t0 + (s + 1) * dt, opts);
        state.time = t0 + (s + 1) * dt;
        if (observer)
            observer(state);
    }
    return state;
}

std::vector<cplx> DenseHEOM::bath_expectation(const HEOMState& s) const {
    std::vector<cplx> out(S_.size(), 0.0);
    const int K = static_cast<int>(modes_.size());
    for (int k = 0; k < K; ++k) {
        MultiIndex e(K, 0);
        e[k] = 1;
        if (auto j = space_->find(e))
            out[modes_[k].bath] += s.ado(*j).trace();
    }
    return out;
}

std::pair<HEOMState, double> DenseHEOM::relax_to_equilibrium(HEOMState state, const RelaxOptions& opts) const {
    if (model_.time_dependent())
        throw ConfigError("equilibration needs a time-independent Hamiltonian");
    if (!(opts.dt > 0.0) || !(opts.window > 0.0))
        throw ConfigError("equilibration needs positive dt and window");
    struct Sample {
        double t;
        std::vector<double> obs;
    };
    auto observe = [&](const HEOMState& s) {
        std::vector<double> v;
        const CMat r = s.rho();
        for (int a = 0; a < n_; ++a)
            v.push_back(r(a, a).real());
        for (cplx b : bath_expectation(s)) {
            v.push_back(b.real());
            v.push_back(b.imag());
        }
        return v;
    };
    std::deque<Sample> window;
    const double t0 = state.time;
    window.push_back({state.time, observe(state)});
    double h = opts.dt;
    while (state.time - t0 < opts.t_max) {
        if (opts.integrator == Integrator::RK4)
            step_rk4(state.data, state.time, opts.dt);
        else
            rk45_step(state.data, state.time, h, state.time + opts.dt, AdaptiveOptions{});
        state.time += opts.dt;
        Sample cur{state.time, observe(state)};
        while (!window.empty() && window.front().t < state.time - opts.window - 1e-9 * opts.dt)
            window.pop_front();
        if (state.time - t0 >= opts.window) {
            double dev = 0.0;
            for (const auto& s : window)
                for (std::size_t j = 0; j < cur.obs.size(); ++j)
                    dev = std::max(dev, std::abs(cur.obs[j] - s.obs[j]));
            if (dev < opts.tol)
                return {state, state.time};
        }
        window.push_back(std::move(cur));
    }
    throw ConvergenceError("no stationary state reached before t_max");
}

} // namespace heomtt
