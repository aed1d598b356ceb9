#include "heomtt/tt.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "heomtt/errors.hpp"

namespace heomtt::tt {

namespace {

struct Truncated {
    int rank;
    bool capped;
};

// Smallest rank whose discarded tail sqrt(sum s_j^2, j >= r) stays <= delta,
// then capped at rmax.
Truncated choose_rank(const Eigen::VectorXd& s, double delta, int rmax) {
    const int n = static_cast<int>(s.size());
    int r = n;
    double tail = 0.0;
    while (r > 1) {
        const double next = tail + s[r - 1] * s[r - 1];
        if (std::sqrt(next) > delta)
            break;
        tail = next;
        --r;
    }
    if (r > rmax) {
        double cut = 0.0;
        for (int j = rmax; j < r; ++j)
            cut += s[j] * s[j];
        return {rmax, std::sqrt(cut + tail) > delta};
    }
    return {r, false};
}

// Largest-magnitude entry of every column of U made real positive; V follows.
void fix_phases(Mat& U, Mat& V) {
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
        Eigen::Index arg = 0;
        U.col(c).cwiseAbs().maxCoeff(&arg);
        const cplx u = U(arg, c);
        if (std::abs(u) == 0.0)
            continue;
        const cplx phase = std::conj(u) / std::abs(u);
        U.col(c) *= phase;
        V.col(c) *= phase;
    }
}

struct ThinQR {
    Mat Q;
    Mat R;
};

ThinQR thin_qr(const Mat& M) {
    const Eigen::Index k = std::min(M.rows(), M.cols());
    Eigen::HouseholderQR<Mat> qr(M);
    ThinQR out;
    out.Q = qr.householderQ() * Mat::Identity(M.rows(), k);
    out.R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

Core core_from_left(const Mat& M, int rl, int m) {
    Core c(rl, m, static_cast<int>(M.cols()));
    c.left() = M;
    return c;
}

Core core_from_right(const Mat& M, int m, int rr) {
    Core c(static_cast<int>(M.rows()), m, rr);
    c.right() = M;
    return c;
}

// Cores 0..k-1 left-orthonormal afterwards.
void left_sweep(std::vector<Core>& cores, std::size_t upto) {
    for (std::size_t k = 0; k < upto; ++k) {
        Core& c = cores[k];
        ThinQR f = thin_qr(c.left());
        const int m = c.m;
        const int rl = c.rl;
        Core& nx = cores[k + 1];
        const Mat next = f.R * nx.right();
        c = core_from_left(f.Q, rl, m);
        nx = core_from_right(next, nx.m, nx.rr);
    }
}

// Cores from..d-1 right-orthonormal afterwards.
void right_sweep(std::vector<Core>& cores, std::size_t from) {
    for (std::size_t k = cores.size() - 1; k >= from && k > 0; --k) {
        Core& c = cores[k];
        ThinQR f = thin_qr(c.right().adjoint());
        const int m = c.m;
        const int rr = c.rr;
        Core& pv = cores[k - 1];
        const Mat prev = pv.left() * f.R.adjoint();
        c = core_from_right(f.Q.adjoint(), m, rr);
        pv = core_from_left(prev, pv.rl, pv.m);
    }
}

bool round_cores(std::vector<Core>& cores, double eps, int rmax) {
    if (rmax < 1)
        throw ConfigError("rank cap must be at least 1");
    const std::size_t d = cores.size();
    if (d < 2)
        return false;
    left_sweep(cores, d - 1);
    const double nrm = cores.back().left().norm();
    const double delta = eps * nrm / std::sqrt(static_cast<double>(d - 1));
    bool capped = false;
    for (std::size_t k = d - 1; k > 0; --k) {
        Core& c = cores[k];
        Eigen::BDCSVD<Mat> svd(c.right(), Eigen::ComputeThinU | Eigen::ComputeThinV);
        Mat U = svd.matrixU();
        Mat V = svd.matrixV();
        fix_phases(U, V);
        const Eigen::VectorXd s = svd.singularValues();
        const Truncated t = choose_rank(s, delta, rmax);
        capped = capped || t.capped;
        const int r = t.rank;
        const Mat us = U.leftCols(r) * s.head(r).asDiagonal();
        Core& pv = cores[k - 1];
        const Mat prev = pv.left() * us;
        c = core_from_right(V.leftCols(r).adjoint(), c.m, c.rr);
        pv = core_from_left(prev, pv.rl, pv.m);
    }
    return capped;
}

std::vector<Core> cores_from_dense(const Vec& full, const std::vector<int>& modes, double eps, int rmax,
                                   bool& capped) {
    const std::size_t d = modes.size();
    if (d == 0)
        throw ConfigError("tensor train needs at least one mode");
    Eigen::Index total = 1;
    for (int m : modes) {
        if (m < 1)
            throw ConfigError("mode sizes must be positive");
        total *= m;
    }
    if (full.size() != total)
        throw ConfigError("dense tensor size does not match the mode sizes");
    const double delta = eps * full.norm() / std::sqrt(std::max<double>(1.0, static_cast<double>(d - 1)));
    capped = false;
    std::vector<Core> cores;
    // C holds rows (a + r * i_k) and columns = remaining modes in C order.
    Eigen::Index rest = total / modes[0];
    Mat C(modes[0], rest);
    for (Eigen::Index i = 0; i < modes[0]; ++i)
        for (Eigen::Index c = 0; c < rest; ++c)
            C(i, c) = full[i * rest + c];
    int r = 1;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        const int m = modes[k];
        Eigen::BDCSVD<Mat> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Mat U = svd.matrixU();
        Mat V = svd.matrixV();
        fix_phases(U, V);
        const Eigen::VectorXd s = svd.singularValues();
        const Truncated t = choose_rank(s, delta, rmax);
        capped = capped || t.capped;
        cores.push_back(core_from_left(U.leftCols(t.rank), r, m));
        const Mat SV = s.head(t.rank).asDiagonal() * V.leftCols(t.rank).adjoint();
        r = t.rank;
        const int mn = modes[k + 1];
        const Eigen::Index rest2 = rest / mn;
        C.resize(static_cast<Eigen::Index>(r) * mn, rest2);
        for (int a = 0; a < r; ++a)
            for (int i = 0; i < mn; ++i)
                for (Eigen::Index c = 0; c < rest2; ++c)
                    C(a + static_cast<Eigen::Index>(r) * i, c) = SV(a, i * rest2 + c);
        rest = rest2;
    }
    cores.push_back(core_from_left(C, r, modes.back()));
    return cores;
}

Vec cores_to_dense(const std::vector<Core>& cores) {
    Mat cur = Mat::Ones(1, 1);
    for (const Core& c : cores) {
        const Mat prod = cur * c.right();   // (N x m*rr), column i + m*b
        Mat next(cur.rows() * c.m, c.rr);
        for (Eigen::Index l = 0; l < cur.rows(); ++l)
            for (int i = 0; i < c.m; ++i)
                for (int b = 0; b < c.rr; ++b)
                    next(l * c.m + i, b) = prod(l, i + static_cast<Eigen::Index>(c.m) * b);
        cur = std::move(next);
    }
    return cur.col(0);
}

std::vector<int> ranks_of(const std::vector<Core>& cores) {
    std::vector<int> r;
    r.push_back(cores.empty() ? 1 : cores.front().rl);
    for (const Core& c : cores)
        r.push_back(c.rr);
    return r;
}

std::vector<Core> add_cores(const std::vector<Core>& a, const std::vector<Core>& b) {
    if (a.size() != b.size())
        throw ConfigError("tensor trains of different order cannot be added");
    const std::size_t d = a.size();
    std::vector<Core> out;
    for (std::size_t k = 0; k < d; ++k) {
        const Core& x = a[k];
        const Core& y = b[k];
        if (x.m != y.m)
            throw ConfigError("tensor trains with different mode sizes cannot be added");
        if (d == 1) {
            Core c = x;
            for (std::size_t j = 0; j < c.v.size(); ++j)
                c.v[j] += y.v[j];
            out.push_back(std::move(c));
            continue;
        }
        const bool first = k == 0;
        const bool last = k + 1 == d;
        const int rl = first ? 1 : x.rl + y.rl;
        const int rr = last ? 1 : x.rr + y.rr;
        Core c(rl, x.m, rr);
        const int ol = first ? 0 : x.rl;
        const int orr = last ? 0 : x.rr;
        for (int i = 0; i < x.m; ++i) {
            for (int p = 0; p < x.rl; ++p)
                for (int q = 0; q < x.rr; ++q)
                    c(p, i, q) = x(p, i, q);
            for (int p = 0; p < y.rl; ++p)
                for (int q = 0; q < y.rr; ++q)
                    c(ol + p, i, orr + q) = y(p, i, q);
        }
        out.push_back(std::move(c));
    }
    return out;
}

void check_modes(const TTOperator& a, const TTOperator& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw ConfigError("operator trains with different mode sizes");
}

} // namespace

std::vector<int> TTVector::modes() const {
    std::vector<int> m;
    for (const Core& c : cores)
        m.push_back(c.m);
    return m;
}

std::vector<int> TTVector::ranks() const { return ranks_of(cores); }

int TTVector::max_rank() const {
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
}

std::size_t TTVector::storage() const {
    std::size_t s = 0;
    for (const Core& c : cores)
        s += c.v.size();
    return s;
}

std::vector<int> TTOperator::ranks() const { return ranks_of(cores); }

int TTOperator::max_rank() const {
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
}

TTVector from_dense(const Vec& full, const std::vector<int>& modes, double eps, int rmax) {
    TTVector out;
    out.cores = cores_from_dense(full, modes, eps, rmax, out.approximate);
    return out;
}

Vec to_dense(const TTVector& a) { return cores_to_dense(a.cores); }

TTOperator op_from_dense(const Mat& full, const std::vector<int>& rows, const std::vector<int>& cols, double eps,
                         int rmax) {
    if (rows.size() != cols.size() || rows.empty())
        throw ConfigError("operator train needs matching row and column mode lists");
    const std::size_t d = rows.size();
    Eigen::Index R = 1, C = 1;
    std::vector<int> combined(d);
    for (std::size_t k = 0; k < d; ++k) {
        R *= rows[k];
        C *= cols[k];
        combined[k] = rows[k] * cols[k];
    }
    if (full.rows() != R || full.cols() != C)
        throw ConfigError("dense operator size does not match the mode sizes");
    Vec t(R * C);
    std::vector<int> ri(d), ci(d);
    for (Eigen::Index r = 0; r < R; ++r) {
        Eigen::Index x = r;
        for (std::size_t k = d; k-- > 0;) {
            ri[k] = static_cast<int>(x % rows[k]);
            x /= rows[k];
        }
        for (Eigen::Index c = 0; c < C; ++c) {
            Eigen::Index y = c;
            for (std::size_t k = d; k-- > 0;) {
                ci[k] = static_cast<int>(y % cols[k]);
                y /= cols[k];
            }
            Eigen::Index idx = 0;
            for (std::size_t k = 0; k < d; ++k)
                idx = idx * combined[k] + ri[k] + rows[k] * ci[k];
            t[idx] = full(r, c);
        }
    }
    TTOperator out;
    out.rows = rows;
    out.cols = cols;
    out.cores = cores_from_dense(t, combined, eps, rmax, out.approximate);
    return out;
}

Mat to_dense(const TTOperator& a) {
    const Vec t = cores_to_dense(a.cores);
    const std::size_t d = a.order();
    Eigen::Index R = 1, C = 1;
    for (std::size_t k = 0; k < d; ++k) {
        R *= a.rows[k];
        C *= a.cols[k];
    }
    Mat out(R, C);
    std::vector<int> ri(d), ci(d);
    for (Eigen::Index r = 0; r < R; ++r) {
        Eigen::Index x = r;
        for (std::size_t k = d; k-- > 0;) {
            ri[k] = static_cast<int>(x % a.rows[k]);
            x /= a.rows[k];
        }
        for (Eigen::Index c = 0; c < C; ++c) {
            Eigen::Index y = c;
            for (std::size_t k = d; k-- > 0;) {
                ci[k] = static_cast<int>(y % a.cols[k]);
                y /= a.cols[k];
            }
            Eigen::Index idx = 0;
            for (std::size_t k = 0; k < d; ++k)
                idx = idx * (a.rows[k] * a.cols[k]) + ri[k] + a.rows[k] * ci[k];
            out(r, c) = t[idx];
        }
    }
    return out;
}

TTVector product(const std::vector<Vec>& factors) {
    TTVector out;
    for (const Vec& f : factors) {
        Core c(1, static_cast<int>(f.size()), 1);
        for (Eigen::Index i = 0; i < f.size(); ++i)
            c.v[i] = f[i];
        out.cores.push_back(std::move(c));
    }
    return out;
}

TTOperator product(const std::vector<Mat>& factors) {
    TTOperator out;
    for (const Mat& f : factors) {
        const int r = static_cast<int>(f.rows());
        const int c = static_cast<int>(f.cols());
        Core core(1, r * c, 1);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                core.v[i + r * j] = f(i, j);
        out.cores.push_back(std::move(core));
        out.rows.push_back(r);
        out.cols.push_back(c);
    }
    return out;
}

TTOperator identity(const std::vector<int>& modes) {
    std::vector<Mat> f;
    for (int m : modes)
        f.push_back(Mat::Identity(m, m));
    return product(f);
}

TTVector zeros(const std::vector<int>& modes) {
    std::vector<Vec> f;
    for (int m : modes)
        f.push_back(Vec::Zero(m));
    return product(f);
}

cplx element(const TTVector& a, const std::vector<int>& idx) {
    if (idx.size() != a.order())
        throw ConfigError("element index has the wrong length");
    Mat row = Mat::Ones(1, 1);
    for (std::size_t k = 0; k < a.order(); ++k) {
        if (idx[k] < 0 || idx[k] >= a.cores[k].m)
            throw std::out_of_range("element index out of range");
        row = row * a.cores[k].slice(idx[k]);
    }
    return row(0, 0);
}

TTVector kron(const TTVector& a, const TTVector& b) {
    TTVector out = a;
    out.cores.insert(out.cores.end(), b.cores.begin(), b.cores.end());
    out.approximate = a.approximate || b.approximate;
    return out;
}

TTOperator kron(const TTOperator& a, const TTOperator& b) {
    TTOperator out = a;
    out.cores.insert(out.cores.end(), b.cores.begin(), b.cores.end());
    out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
    out.cols.insert(out.cols.end(), b.cols.begin(), b.cols.end());
    out.approximate = a.approximate || b.approximate;
    return out;
}

TTVector add(const TTVector& a, const TTVector& b) {
    TTVector out;
    out.cores = add_cores(a.cores, b.cores);
    out.approximate = a.approximate || b.approximate;
    return out;
}

TTOperator add(const TTOperator& a, const TTOperator& b) {
    check_modes(a, b);
    TTOperator out;
    out.rows = a.rows;
    out.cols = a.cols;
    out.cores = add_cores(a.cores, b.cores);
    out.approximate = a.approximate || b.approximate;
    return out;
}

TTVector scale(const TTVector& a, cplx c) {
    TTVector out = a;
    for (cplx& x : out.cores.front().v)
        x *= c;
    return out;
}

TTOperator scale(const TTOperator& a, cplx c) {
    TTOperator out = a;
    for (cplx& x : out.cores.front().v)
        x *= c;
    return out;
}

TTVector apply(const TTOperator& op, const TTVector& v) {
    if (op.order() != v.order())
        throw ConfigError("operator and vector trains differ in order");
    TTVector out;
    for (std::size_t k = 0; k < op.order(); ++k) {
        const Core& W = op.cores[k];
        const Core& V = v.cores[k];
        const int mo = op.rows[k];
        const int mi = op.cols[k];
        if (V.m != mi)
            throw ConfigError("operator input mode does not match the vector mode");
        Core c(W.rl * V.rl, mo, W.rr * V.rr);
        for (int b = 0; b < W.rr; ++b)
            for (int d = 0; d < V.rr; ++d)
                for (int j = 0; j < mi; ++j)
                    for (int cc = 0; cc < V.rl; ++cc) {
                        const cplx x = V(cc, j, d);
                        if (x == cplx(0.0))
                            continue;
                        for (int i = 0; i < mo; ++i)
                            for (int a = 0; a < W.rl; ++a)
                                c(a + W.rl * cc, i, b + W.rr * d) += W(a, i + mo * j, b) * x;
                    }
        out.cores.push_back(std::move(c));
    }
    out.approximate = op.approximate || v.approximate;
    return out;
}

TTVector round(const TTVector& a, double eps, int rmax) {
    TTVector out = a;
    out.approximate = round_cores(out.cores, eps, rmax) || a.approximate;
    return out;
}

TTOperator round(const TTOperator& a, double eps, int rmax) {
    TTOperator out = a;
    out.approximate = round_cores(out.cores, eps, rmax) || a.approximate;
    return out;
}

cplx dot(const TTVector& a, const TTVector& b) {
    if (a.order() != b.order())
        throw ConfigError("dot of trains with different order");
    Mat E = Mat::Ones(1, 1);
    for (std::size_t k = 0; k < a.order(); ++k) {
        const Core& x = a.cores[k];
        const Core& y = b.cores[k];
        if (x.m != y.m)
            throw ConfigError("dot of trains with different mode sizes");
        Mat next = Mat::Zero(x.rr, y.rr);
        for (int i = 0; i < x.m; ++i)
            next.noalias() += x.slice(i).adjoint() * E * y.slice(i);
        E = std::move(next);
    }
    return E(0, 0);
}

double norm(const TTVector& a) {
    TTVector c = a;
    if (c.order() > 1)
        left_sweep(c.cores, c.order() - 1);
    return c.cores.back().left().norm();
}

std::vector<int> full_ranks(const std::vector<int>& modes) {
    const std::size_t d = modes.size();
    std::vector<int> r(d + 1, 1);
    for (std::size_t k = 1; k < d; ++k) {
        double left = 1.0, right = 1.0;
        for (std::size_t j = 0; j < k; ++j)
            left *= modes[j];
        for (std::size_t j = k; j < d; ++j)
            right *= modes[j];
        r[k] = static_cast<int>(std::min({left, right, 1e9}));
    }
    return r;
}

TTVector pad_ranks(const TTVector& a, int target) {
    TTVector out = a;
    const std::size_t d = out.order();
    if (d < 2)
        return out;
    left_sweep(out.cores, d - 1);
    const auto cap = full_ranks(out.modes());
    for (std::size_t k = 0; k + 1 < d; ++k) {
        Core& c = out.cores[k];
        const Mat Q = c.left();
        const Eigen::Index rows = Q.rows();
        const int want = std::min({target, cap[k + 1], static_cast<int>(rows)});
        if (c.rr >= want)
            continue;
        // Orthonormal completion of the current column span.
        Eigen::HouseholderQR<Mat> qr(Q);
        const Mat full = qr.householderQ() * Mat::Identity(rows, want);
        Mat ext(rows, want);
        ext.leftCols(c.rr) = Q;
        ext.rightCols(want - c.rr) = full.rightCols(want - c.rr);
        const int old = c.rr;
        c = core_from_left(ext, c.rl, c.m);
        Core& nx = out.cores[k + 1];
        Mat next = Mat::Zero(want, static_cast<Eigen::Index>(nx.m) * nx.rr);
        next.topRows(old) = nx.right();
        nx = core_from_right(next, nx.m, nx.rr);
    }
    return out;
}

void orthogonalize(TTVector& a, std::size_t center) {
    if (center >= a.order())
        throw std::out_of_range("orthogonality center out of range");
    left_sweep(a.cores, center);
    right_sweep(a.cores, center + 1);
}

std::size_t storage_equal_rank(int n, int n_heom, int K, int r) {
    const std::size_t R = r;
    return R * (static_cast<std::size_t>(n) * n + n_heom) + static_cast<std::size_t>(K) * R * R * n_heom;
}

std::size_t storage_bound(int n, int L, int K, int rmax) {
    const std::size_t R = rmax;
    return (static_cast<std::size_t>(n) * n + L) * R + R * R * static_cast<std::size_t>(K - 1) * L;
}

std::string diagnostic_json(const TTVector& a) {
    nlohmann::json j;
    j["order"] = a.order();
    j["modes"] = a.modes();
    j["ranks"] = a.ranks();
    j["max_rank"] = a.max_rank();
    j["storage"] = a.storage();
    j["approximate"] = a.approximate;
    nlohmann::json shapes = nlohmann::json::array();
    for (const Core& c : a.cores)
        shapes.push_back({c.rl, c.m, c.rr});
    j["cores"] = shapes;
    return j.dump(2);
}

} // namespace heomtt::tt
