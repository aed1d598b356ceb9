#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heomtt/units.hpp"

namespace heomtt::tt {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Three-way core of shape (rl, m, rr). Entry (a, i, b) is stored at
/// a + rl * (i + m * b), so the buffer is at once the column-major left
/// unfolding (rl*m x rr) and the column-major right unfolding (rl x m*rr).
struct Core {
    int rl = 1;
    int m = 1;
    int rr = 1;
    std::vector<cplx> v;

    Core() = default;
    Core(int rl_, int m_, int rr_) : rl(rl_), m(m_), rr(rr_), v(static_cast<std::size_t>(rl_) * m_ * rr_) {}

    cplx& operator()(int a, int i, int b) { return v[a + rl * (i + static_cast<std::size_t>(m) * b)]; }
    cplx operator()(int a, int i, int b) const { return v[a + rl * (i + static_cast<std::size_t>(m) * b)]; }

    Eigen::Map<Mat> left() { return {v.data(), rl * m, rr}; }
    Eigen::Map<const Mat> left() const { return {v.data(), rl * m, rr}; }
    Eigen::Map<Mat> right() { return {v.data(), rl, m * rr}; }
    Eigen::Map<const Mat> right() const { return {v.data(), rl, m * rr}; }

    using Slice = Eigen::Map<const Mat, 0, Eigen::OuterStride<>>;
    /// The rl x rr matrix at mode index i.
    Slice slice(int i) const { return {v.data() + static_cast<std::size_t>(rl) * i, rl, rr, Eigen::OuterStride<>(rl * m)}; }
};

constexpr int no_rank_cap = std::numeric_limits<int>::max();

/// Tensor train with first mode slowest in the dense ordering.
struct TTVector {
    std::vector<Core> cores;
    /// Set when a rank cap discarded more than the requested accuracy.
    bool approximate = false;

    std::size_t order() const { return cores.size(); }
    std::vector<int> modes() const;
    /// r_0 .. r_d, with r_0 = r_d = 1.
    std::vector<int> ranks() const;
    int max_rank() const;
    std::size_t storage() const;
};

/// Operator train. Core k has combined mode index i + rows[k] * j with i the
/// output and j the input index.
struct TTOperator {
    std::vector<Core> cores;
    std::vector<int> rows;
    std::vector<int> cols;
    bool approximate = false;

    std::size_t order() const { return cores.size(); }
    std::vector<int> ranks() const;
    int max_rank() const;
};

TTVector from_dense(const Vec& full, const std::vector<int>& modes, double eps, int rmax = no_rank_cap);
Vec to_dense(const TTVector& a);
TTOperator op_from_dense(const Mat& full, const std::vector<int>& rows, const std::vector<int>& cols, double eps,
                         int rmax = no_rank_cap);
Mat to_dense(const TTOperator& a);

/// Rank-one train from per-mode vectors or matrices.
TTVector product(const std::vector<Vec>& factors);
TTOperator product(const std::vector<Mat>& factors);
TTOperator identity(const std::vector<int>& modes);
TTVector zeros(const std::vector<int>& modes);

cplx element(const TTVector& a, const std::vector<int>& idx);

TTVector kron(const TTVector& a, const TTVector& b);
TTOperator kron(const TTOperator& a, const TTOperator& b);

TTVector add(const TTVector& a, const TTVector& b);
TTOperator add(const TTOperator& a, const TTOperator& b);
TTVector scale(const TTVector& a, cplx c);
TTOperator scale(const TTOperator& a, cplx c);

TTVector apply(const TTOperator& op, const TTVector& v);

/// Left-to-right QR sweep followed by a right-to-left truncated SVD sweep.
/// Each bond drops the singular-value tail below eps * |a| / sqrt(d - 1),
/// then the rank is capped at rmax.
TTVector round(const TTVector& a, double eps, int rmax = no_rank_cap);
TTOperator round(const TTOperator& a, double eps, int rmax = no_rank_cap);

/// sum conj(a) b.
cplx dot(const TTVector& a, const TTVector& b);
double norm(const TTVector& a);

/// Raise bond ranks towards target without changing the represented tensor;
/// ranks never exceed the product of the mode sizes on either side.
TTVector pad_ranks(const TTVector& a, int target);
/// Largest ranks a train with these modes can have.
std::vector<int> full_ranks(const std::vector<int>& modes);

/// Left-orthonormalize cores 0..k-1 and right-orthonormalize cores k+1..d-1.
void orthogonalize(TTVector& a, std::size_t center);

/// Storage estimates for a system core of size n^2 followed by K mode cores:
/// r (n^2 + n_heom) + K r^2 n_heom for equal ranks r, and the bound
/// (n^2 + L) rmax + rmax^2 (K - 1) L with mode cores of size L.
std::size_t storage_equal_rank(int n, int n_heom, int K, int r);
std::size_t storage_bound(int n, int L, int K, int rmax);

/// JSON with core shapes and the bond-rank profile.
std::string diagnostic_json(const TTVector& a);

} // namespace heomtt::tt
