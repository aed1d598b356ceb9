#include "heomtt/tt_heom.hpp"

#include <cmath>

#include "heomtt/errors.hpp"

namespace heomtt {

using tt::Core;
using tt::Mat;
using tt::TTOperator;
using tt::TTVector;

namespace {

Mat to_mat(const CMat& m) { return Mat(m); }

Mat shift_up(int n_heom) {
    Mat M = Mat::Zero(n_heom, n_heom);
    for (int l = 0; l + 1 < n_heom; ++l)
        M(l, l + 1) = 1.0;
    return M;
}

Mat shift_down_weighted(int n_heom) {
    Mat M = Mat::Zero(n_heom, n_heom);
    for (int l = 1; l < n_heom; ++l)
        M(l, l - 1) = static_cast<double>(l);
    return M;
}

Mat occupation(int n_heom) {
    Mat M = Mat::Zero(n_heom, n_heom);
    for (int l = 0; l < n_heom; ++l)
        M(l, l) = static_cast<double>(l);
    return M;
}

void put(Core& c, int a, const Mat& M, int b) {
    const int r = static_cast<int>(M.rows());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < M.cols(); ++j)
            c(a, i + r * j, b) = M(i, j);
}

// I_{n^2} on the system core followed by sum_k local[k] on mode k.
TTOperator local_sum(const std::vector<Mat>& local, int n) {
    const int K = static_cast<int>(local.size());
    const int n2 = n * n;
    TTOperator op;
    op.rows.push_back(n2);
    op.cols.push_back(n2);
    Core sys(1, n2 * n2, 1);
    put(sys, 0, Mat::Identity(n2, n2), 0);
    op.cores.push_back(std::move(sys));
    for (int k = 0; k < K; ++k) {
        const int m = static_cast<int>(local[k].rows());
        const Mat id = Mat::Identity(m, m);
        const bool first = k == 0;
        const bool last = k + 1 == K;
        Core c(first ? 1 : 2, m * m, last ? 1 : 2);
        if (first && last) {
            put(c, 0, local[k], 0);
        } else if (first) {
            put(c, 0, id, 0);
            put(c, 0, local[k], 1);
        } else if (last) {
            put(c, 0, local[k], 0);
            put(c, 1, id, 0);
        } else {
            put(c, 0, id, 0);
            put(c, 0, local[k], 1);
            put(c, 1, id, 1);
        }
        op.rows.push_back(m);
        op.cols.push_back(m);
        op.cores.push_back(std::move(c));
    }
    return op;
}

TTOperator system_times_mode(const Mat& sys, const Mat& mode_op, int k, int K, int n_heom) {
    std::vector<Mat> f{sys};
    for (int j = 0; j < K; ++j)
        f.push_back(j == k ? mode_op : Mat::Identity(n_heom, n_heom));
    return tt::product(f);
}

TTOperator sum_rounded(const TTOperator& a, const TTOperator& b, double eps, int rmax) {
    TTOperator s = tt::round(tt::add(a, b), eps, rmax);
    if (s.approximate)
        throw ResourceError("rank cap reached while assembling the Liouvillian");
    return s;
}

} // namespace

TTOperator build_system_part(const CMat& H, int K, int n_heom) {
    std::vector<Mat> f{to_mat(liouville_superop(H))};
    for (int k = 0; k < K; ++k)
        f.push_back(Mat::Identity(n_heom, n_heom));
    return tt::product(f);
}

TTOperator build_damping(const std::vector<cplx>& gammas, int n, int n_heom) {
    std::vector<Mat> local;
    const Mat occ = occupation(n_heom);
    for (cplx g : gammas)
        local.push_back(I_unit * g * occ);
    return local_sum(local, n);
}

TTOperator build_plus(const CMat& S, int k, int K, int n_heom) {
    return system_times_mode(to_mat(-I_unit * commutator_superop(S)), shift_up(n_heom), k, K, n_heom);
}

TTOperator build_minus(const CMat& S, cplx alpha, cplx alpha_tilde, int k, int K, int n_heom) {
    const auto n = S.rows();
    const CMat id = CMat::Identity(n, n);
    Mat Q(n * n, n * n);
    // alpha S (x) I - alpha~ I (x) S^T, row-major vec.
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            for (Eigen::Index c = 0; c < n; ++c)
                for (Eigen::Index d = 0; d < n; ++d)
                    Q(a * n + b, c * n + d) = alpha * S(a, c) * id(b, d) - alpha_tilde * id(a, c) * S(d, b);
    return system_times_mode(-I_unit * Q, shift_down_weighted(n_heom), k, K, n_heom);
}

TTLiouvillian assemble(const SystemModel& model, int n_heom, double eps, int rmax, double t) {
    model.validate();
    if (n_heom < 1)
        throw ConfigError("n_heom must be at least 1");
    const auto modes = model.modes();
    const int n = model.dim();
    // A bath-free model still carries one trivial mode so the train has a mode core.
    const int K = std::max<int>(1, static_cast<int>(modes.size()));
    TTLiouvillian L;
    L.n = n;
    L.K = K;
    L.n_heom = n_heom;
    L.eps = eps;
    L.rmax = rmax;
    L.time_dependent = model.time_dependent();

    std::vector<cplx> gammas(K, 0.0);
    for (std::size_t k = 0; k < modes.size(); ++k)
        gammas[k] = modes[k].term.gamma;
    TTOperator bath = build_damping(gammas, n, n_heom);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const CMat& S = model.baths[modes[k].bath].S;
        bath = sum_rounded(bath, build_plus(S, static_cast<int>(k), K, n_heom), eps, rmax);
        bath = sum_rounded(bath, build_minus(S, modes[k].term.alpha, modes[k].term.alpha_tilde, static_cast<int>(k),
                                             K, n_heom),
                           eps, rmax);
    }
    L.bath_part = bath;
    L.op = sum_rounded(build_system_part(model.hamiltonian(t), K, n_heom), bath, eps, rmax);
    L.built_for = t;
    return L;
}

void update_time(TTLiouvillian& L, const SystemModel& model, double t) {
    if (!L.time_dependent || t == L.built_for)
        return;
    L.op = sum_rounded(build_system_part(model.hamiltonian(t), L.K, L.n_heom), L.bath_part, L.eps, L.rmax);
    L.built_for = t;
}

TTVector initial_state(const CMat& rho, int K, int n_heom) {
    std::vector<tt::Vec> f{vec(rho)};
    tt::Vec e0 = tt::Vec::Zero(n_heom);
    e0[0] = 1.0;
    for (int k = 0; k < K; ++k)
        f.push_back(e0);
    return tt::product(f);
}

CMat reduce(const TTVector& v, int n) {
    Mat w = Mat::Ones(1, 1);
    for (std::size_t k = v.order(); k-- > 1;)
        w = v.cores[k].slice(0) * w;
    const Core& c0 = v.cores[0];
    if (c0.m != n * n)
        throw ConfigError("system core size does not match n^2");
    CVec r(n * n);
    for (int a = 0; a < n * n; ++a) {
        cplx s = 0.0;
        for (int b = 0; b < c0.rr; ++b)
            s += c0(0, a, b) * w(b, 0);
        r[a] = s;
    }
    return unvec(r, n);
}

namespace {

// One r_bra x r_ket matrix per operator bond index.
using Env = std::vector<Mat>;

struct Entry {
    int w;
    int i;
    int j;
    int w2;
    cplx c;
};

std::vector<Entry> nonzeros(const Core& W, int m) {
    std::vector<Entry> out;
    for (int w2 = 0; w2 < W.rr; ++w2)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                for (int w = 0; w < W.rl; ++w) {
                    const cplx c = W(w, i + m * j, w2);
                    if (c != cplx(0.0))
                        out.push_back({w, i, j, w2, c});
                }
    return out;
}

void set_slice(Core& c, int i, const Mat& M) {
    for (int b = 0; b < c.rr; ++b)
        for (int a = 0; a < c.rl; ++a)
            c(a, i, b) = M(a, b);
}

struct Site {
    const Core* W;
    std::vector<Entry> nz;
    int m;
};

// Environment of sites 0..k after adding site k with left-orthonormal U.
Env left_update(const Env& Le, const Core& U, const Site& s) {
    const int m = s.m;
    std::vector<std::vector<Mat>> T(Le.size(), std::vector<Mat>(m));
    for (std::size_t w = 0; w < Le.size(); ++w)
        for (int j = 0; j < m; ++j)
            T[w][j] = Le[w] * U.slice(j);
    Env out(s.W->rr, Mat::Zero(U.rr, U.rr));
    std::vector<std::vector<Mat>> X(s.W->rr, std::vector<Mat>(m));
    for (auto& row : X)
        for (auto& x : row)
            x = Mat::Zero(U.rl, U.rr);
    for (const Entry& e : s.nz)
        X[e.w2][e.i] += e.c * T[e.w][e.j];
    for (int w2 = 0; w2 < s.W->rr; ++w2)
        for (int i = 0; i < m; ++i)
            out[w2].noalias() += U.slice(i).adjoint() * X[w2][i];
    return out;
}

// Environment of sites k..d-1 after adding site k with right-orthonormal U.
Env right_update(const Env& Re, const Core& U, const Site& s) {
    const int m = s.m;
    std::vector<std::vector<Mat>> T(Re.size(), std::vector<Mat>(m));
    for (std::size_t w2 = 0; w2 < Re.size(); ++w2)
        for (int j = 0; j < m; ++j)
            T[w2][j] = U.slice(j) * Re[w2].transpose();   // (rl_ket x r_bra)
    std::vector<std::vector<Mat>> X(s.W->rl, std::vector<Mat>(m));
    for (auto& row : X)
        for (auto& x : row)
            x = Mat::Zero(U.rl, U.rr);
    for (const Entry& e : s.nz)
        X[e.w][e.i] += e.c * T[e.w2][e.j];
    Env out(s.W->rl, Mat::Zero(U.rl, U.rl));
    for (int w = 0; w < s.W->rl; ++w)
        for (int i = 0; i < m; ++i)
            out[w].noalias() += U.slice(i).conjugate() * X[w][i].transpose();
    return out;
}

Core apply_site(const Env& Le, const Site& s, const Env& Re, const Core& C) {
    const int m = s.m;
    std::vector<std::vector<Mat>> T(Le.size(), std::vector<Mat>(m));
    for (std::size_t w = 0; w < Le.size(); ++w)
        for (int j = 0; j < m; ++j)
            T[w][j] = Le[w] * C.slice(j);
    std::vector<std::vector<Mat>> Y(s.W->rr, std::vector<Mat>(m));
    for (auto& row : Y)
        for (auto& y : row)
            y = Mat::Zero(C.rl, C.rr);
    for (const Entry& e : s.nz)
        Y[e.w2][e.i] += e.c * T[e.w][e.j];
    Core out(C.rl, m, C.rr);
    for (int i = 0; i < m; ++i) {
        Mat acc = Mat::Zero(C.rl, C.rr);
        for (int w2 = 0; w2 < s.W->rr; ++w2)
            acc.noalias() += Y[w2][i] * Re[w2].transpose();
        set_slice(out, i, acc);
    }
    return out;
}

Mat apply_bond(const Env& Le, const Env& Re, const Mat& R) {
    Mat out = Mat::Zero(R.rows(), R.cols());
    for (std::size_t w = 0; w < Le.size(); ++w)
        out.noalias() += Le[w] * R * Re[w].transpose();
    return out;
}

template <class T, class F>
void rk4(T& y, double h, int substeps, F&& f) {
    const double dt = h / substeps;
    for (int s = 0; s < substeps; ++s) {
        const T k1 = f(y);
        const T k2 = f(y + (0.5 * dt) * k1);
        const T k3 = f(y + (0.5 * dt) * k2);
        const T k4 = f(y + dt * k3);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

// Core arithmetic for the local RK4 on site tensors.
struct CoreVec {
    Core c;
    CoreVec operator+(const CoreVec& o) const {
        CoreVec r = *this;
        for (std::size_t j = 0; j < r.c.v.size(); ++j)
            r.c.v[j] += o.c.v[j];
        return r;
    }
    CoreVec& operator+=(const CoreVec& o) {
        for (std::size_t j = 0; j < c.v.size(); ++j)
            c.v[j] += o.c.v[j];
        return *this;
    }
    friend CoreVec operator*(double a, const CoreVec& x) {
        CoreVec r = x;
        for (cplx& z : r.c.v)
            z *= a;
        return r;
    }
};

bool deficient(const Mat& R) {
    if (R.rows() == 0)
        return false;
    const Eigen::VectorXd d = R.diagonal().cwiseAbs();
    return d.minCoeff() <= 1e-13 * std::max(1e-300, d.maxCoeff());
}

} // namespace

TTVector ksl_step(const TTOperator& L, const TTVector& v0, double dt, const KSLOptions& opts, KSLStats* stats) {
    const std::size_t d = v0.order();
    if (L.order() != d)
        throw ConfigError("operator and state trains differ in order");
    if (d < 2)
        throw ConfigError("KSL needs at least two cores");
    const int sub = std::max(1, opts.substeps);
    const double tau = 0.5 * dt;

    std::vector<Site> sites(d);
    for (std::size_t k = 0; k < d; ++k) {
        if (L.rows[k] != L.cols[k] || L.rows[k] != v0.cores[k].m)
            throw ConfigError("operator modes do not match the state");
        sites[k] = {&L.cores[k], nonzeros(L.cores[k], L.rows[k]), L.rows[k]};
    }

    TTVector v = v0;
    tt::orthogonalize(v, 0);
    std::vector<Env> Le(d + 1), Re(d + 1);
    Le[0] = Env{Mat::Ones(1, 1)};
    Re[d] = Env{Mat::Ones(1, 1)};
    for (std::size_t k = d - 1; k >= 1; --k)
        Re[k] = right_update(Re[k + 1], v.cores[k], sites[k]);

    auto site_flow = [&](std::size_t k) {
        return [&, k](const CoreVec& x) { return CoreVec{apply_site(Le[k], sites[k], Re[k + 1], x.c)}; };
    };

    // Forward half sweep.
    for (std::size_t k = 0; k < d; ++k) {
        CoreVec C{v.cores[k]};
        rk4(C, tau, sub, site_flow(k));
        if (k + 1 == d) {
            v.cores[k] = std::move(C.c);
            break;
        }
        Eigen::HouseholderQR<Mat> qr(C.c.left());
        const Eigen::Index r = std::min<Eigen::Index>(C.c.rl * C.c.m, C.c.rr);
        Mat Q = qr.householderQ() * Mat::Identity(C.c.rl * C.c.m, r);
        Mat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        if (stats && deficient(R))
            ++stats->rank_deficient_bonds;
        Core U(C.c.rl, C.c.m, static_cast<int>(r));
        U.left() = Q;
        v.cores[k] = U;
        Le[k + 1] = left_update(Le[k], v.cores[k], sites[k]);
        rk4(R, -tau, sub, [&](const Mat& x) { return apply_bond(Le[k + 1], Re[k + 1], x); });
        Core& nx = v.cores[k + 1];
        Mat next = R * nx.right();
        Core c(static_cast<int>(R.rows()), nx.m, nx.rr);
        c.right() = next;
        nx = std::move(c);
    }

    // Backward half sweep.
    for (std::size_t k = d; k-- > 0;) {
        CoreVec C{v.cores[k]};
        rk4(C, tau, sub, site_flow(k));
        if (k == 0) {
            v.cores[0] = std::move(C.c);
            break;
        }
        const Mat Ch = C.c.right().adjoint();
        Eigen::HouseholderQR<Mat> qr(Ch);
        const Eigen::Index r = std::min<Eigen::Index>(Ch.rows(), Ch.cols());
        Mat Q = qr.householderQ() * Mat::Identity(Ch.rows(), r);
        Mat Rt = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        if (stats && deficient(Rt))
            ++stats->rank_deficient_bonds;
        Mat R = Rt.adjoint();   // rl x r
        Core U(static_cast<int>(r), C.c.m, C.c.rr);
        U.right() = Q.adjoint();
        v.cores[k] = U;
        Re[k] = right_update(Re[k + 1], v.cores[k], sites[k]);
        rk4(R, -tau, sub, [&](const Mat& x) { return apply_bond(Le[k], Re[k], x); });
        Core& pv = v.cores[k - 1];
        Mat prev = pv.left() * R;
        Core c(pv.rl, pv.m, static_cast<int>(R.cols()));
        c.left() = prev;
        pv = std::move(c);
    }
    v.approximate = v0.approximate;
    return v;
}

TTVector rk4_tt_step(const TTOperator& L, const TTVector& v, double dt, double eps, int rmax) {
    auto f = [&](const TTVector& x) { return tt::round(tt::apply(L, x), eps, rmax); };
    auto axpy = [&](const TTVector& x, double a, const TTVector& y) {
        return tt::round(tt::add(x, tt::scale(y, a)), eps, rmax);
    };
    const TTVector k1 = f(v);
    const TTVector k2 = f(axpy(v, 0.5 * dt, k1));
    const TTVector k3 = f(axpy(v, 0.5 * dt, k2));
    const TTVector k4 = f(axpy(v, dt, k3));
    TTVector acc = tt::add(tt::scale(k1, dt / 6.0), tt::scale(k2, dt / 3.0));
    acc = tt::add(acc, tt::scale(k3, dt / 3.0));
    acc = tt::add(acc, tt::scale(k4, dt / 6.0));
    return tt::round(tt::add(v, acc), eps, rmax);
}

TTRunInfo propagate_tt(TTLiouvillian& L, const SystemModel& model, TTVector v, double t0, double dt, long n_steps,
                       const RankPolicy& policy, const std::function<void(const TTSample&)>& observer) {
    if (!(dt > 0.0))
        throw ConfigError("time step must be positive");
    TTRunInfo info;
    const int n = L.n;
    if (policy.pad_rank > 0)
        v = tt::pad_ranks(v, policy.pad_rank);
    const double norm0 = tt::norm(v);
    auto emit = [&](double t) {
        if (!observer)
            return;
        const CMat rho = reduce(v, n);
        observer({t, rho, rho.trace(), v.max_rank(), tt::norm(v)});
    };
    emit(t0);
    KSLOptions ko{policy.substeps};
    KSLStats stats;
    for (long s = 0; s < n_steps; ++s) {
        const double t = t0 + s * dt;
        update_time(L, model, t + 0.5 * dt);
        const bool refresh = policy.rank_refresh > 0 && (s + 1) % policy.rank_refresh == 0;
        if (refresh) {
            v = rk4_tt_step(L.op, v, dt, policy.eps, policy.rmax);
            info.rank_capped = info.rank_capped || v.approximate;
            if (policy.pad_rank > 0)
                v = tt::pad_ranks(v, policy.pad_rank);
        } else {
            v = ksl_step(L.op, v, dt, ko, &stats);
        }
        const CMat rho = reduce(v, n);
        if (std::abs(rho.trace() - 1.0) > policy.norm_watchdog && norm0 > 0.0 && !info.norm_alarm)
            info.norm_alarm = true;
        emit(t + dt);
    }
    info.rank_deficient_bonds = stats.rank_deficient_bonds;
    info.final_state = std::move(v);
    return info;
}

} // namespace heomtt
