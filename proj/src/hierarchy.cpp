#include "heomtt/hierarchy.hpp"

#include <limits>
#include <numeric>
#include <sstream>

#include "heomtt/errors.hpp"

namespace heomtt {

namespace {

constexpr std::size_t saturated = std::numeric_limits<std::size_t>::max();

std::size_t mul_sat(std::size_t a, std::size_t b) {
    if (a != 0 && b > saturated / a)
        return saturated;
    return a * b;
}

// Number of ways to write m as an ordered sum of p nonnegative parts.
std::size_t compositions(int m, int p) {
    if (p <= 0)
        return m == 0 ? 1 : 0;
    // C(m + p - 1, m), built so every partial product is an integer.
    unsigned __int128 res = 1;
    for (int i = 1; i <= m; ++i) {
        res = res * static_cast<unsigned>(p - 1 + i) / static_cast<unsigned>(i);
        if (res > saturated)
            return saturated;
    }
    return static_cast<std::size_t>(res);
}

void append_level(int K, int level, std::vector<std::uint8_t>& occ) {
    MultiIndex n(K, 0);
    // Depth-first over positions; larger occupations of earlier modes first.
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == K - 1) {
            n[pos] = rem;
            for (int v : n)
                occ.push_back(static_cast<std::uint8_t>(v));
            return;
        }
        for (int v = rem; v >= 0; --v) {
            n[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, level);
}

} // namespace

std::size_t count_level(int K, int L) {
    if (K < 0 || L < 0)
        throw ConfigError("count_level: K and L must be nonnegative");
    // (L+K)!/(L!K!) = compositions of L into K+1 parts.
    return compositions(L, K + 1);
}

std::size_t count_cap(int K, int n_max) {
    if (K < 0 || n_max < 0)
        throw ConfigError("count_cap: K and n_max must be nonnegative");
    std::size_t c = 1;
    for (int k = 0; k < K; ++k)
        c = mul_sat(c, static_cast<std::size_t>(n_max) + 1);
    return c;
}

HierarchySpace HierarchySpace::level(int K, int L, std::size_t max_count) {
    if (K < 1)
        throw ConfigError("hierarchy needs at least one mode");
    if (L < 0 || L > 255)
        throw ConfigError("hierarchy level must lie in [0, 255]");
    const std::size_t count = count_level(K, L);
    if (count > max_count)
        throw ResourceError("hierarchy with K=" + std::to_string(K) + ", L=" + std::to_string(L) +
                            " exceeds the index budget");
    HierarchySpace h;
    h.truncation_ = Truncation::Level;
    h.K_ = K;
    h.limit_ = L;
    h.count_ = count;
    h.occ_.reserve(count * K);
    h.level_offset_.assign(L + 2, 0);
    for (int l = 0; l <= L; ++l) {
        h.level_offset_[l] = h.occ_.size() / K;
        append_level(K, l, h.occ_);
    }
    h.level_offset_[L + 1] = count;
    h.build_neighbours();
    return h;
}

HierarchySpace HierarchySpace::cap(int K, int n_max, std::size_t max_count) {
    if (K < 1)
        throw ConfigError("hierarchy needs at least one mode");
    if (n_max < 0 || n_max > 255)
        throw ConfigError("per-mode cap must lie in [0, 255]");
    const std::size_t count = count_cap(K, n_max);
    if (count > max_count)
        throw ResourceError("hierarchy with K=" + std::to_string(K) + ", n_max=" + std::to_string(n_max) +
                            " exceeds the index budget");
    HierarchySpace h;
    h.truncation_ = Truncation::Cap;
    h.K_ = K;
    h.limit_ = n_max;
    h.count_ = count;
    h.occ_.resize(count * K);
    const int radix = n_max + 1;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t r = i;
        for (int k = K - 1; k >= 0; --k) {
            h.occ_[i * K + k] = static_cast<std::uint8_t>(r % radix);
            r /= radix;
        }
    }
    h.build_neighbours();
    return h;
}

std::size_t HierarchySpace::rank(const MultiIndex& n) const {
    if (truncation_ == Truncation::Cap) {
        std::size_t r = 0;
        for (int v : n)
            r = r * (limit_ + 1) + v;
        return r;
    }
    const int lev = std::accumulate(n.begin(), n.end(), 0);
    std::size_t r = level_offset_[lev];
    int rem = lev;
    for (int j = 0; j + 1 < K_; ++j) {
        // Entries of this level that precede n: same prefix, larger n_j.
        for (int v = rem; v > n[j]; --v)
            r += compositions(rem - v, K_ - j - 1);
        rem -= n[j];
    }
    return r;
}

void HierarchySpace::build_neighbours() {
    up_.assign(count_ * K_, -1);
    down_.assign(count_ * K_, -1);
    MultiIndex n(K_);
    for (std::size_t i = 0; i < count_; ++i) {
        for (int k = 0; k < K_; ++k)
            n[k] = occ_[i * K_ + k];
        for (int k = 0; k < K_; ++k) {
            ++n[k];
            if (contains(n))
                up_[i * K_ + k] = static_cast<std::int64_t>(rank(n));
            n[k] -= 2;
            if (n[k] >= 0)
                down_[i * K_ + k] = static_cast<std::int64_t>(rank(n));
            ++n[k];
        }
    }
}

MultiIndex HierarchySpace::index(std::size_t i) const {
    if (i >= count_)
        throw std::out_of_range("hierarchy position out of range");
    return MultiIndex(occ_.begin() + i * K_, occ_.begin() + (i + 1) * K_);
}

int HierarchySpace::level_of(std::size_t i) const {
    int s = 0;
    for (int k = 0; k < K_; ++k)
        s += occ_[i * K_ + k];
    return s;
}

bool HierarchySpace::contains(const MultiIndex& n) const {
    if (static_cast<int>(n.size()) != K_)
        return false;
    int s = 0;
    for (int v : n) {
        if (v < 0)
            return false;
        if (truncation_ == Truncation::Cap && v > limit_)
            return false;
        s += v;
    }
    return truncation_ == Truncation::Cap || s <= limit_;
}

std::optional<std::size_t> HierarchySpace::find(const MultiIndex& n) const {
    if (!contains(n))
        return std::nullopt;
    return rank(n);
}

std::optional<std::size_t> HierarchySpace::raise(std::size_t i, int k) const {
    const auto v = up_.at(i * K_ + k);
    if (v < 0)
        return std::nullopt;
    return static_cast<std::size_t>(v);
}

std::optional<std::size_t> HierarchySpace::lower(std::size_t i, int k) const {
    const auto v = down_.at(i * K_ + k);
    if (v < 0)
        return std::nullopt;
    return static_cast<std::size_t>(v);
}

std::optional<MultiIndex> HierarchySpace::raise(const MultiIndex& n, int k) const {
    if (!contains(n) || k < 0 || k >= K_)
        return std::nullopt;
    MultiIndex m = n;
    ++m[k];
    if (!contains(m))
        return std::nullopt;
    return m;
}

std::optional<MultiIndex> HierarchySpace::lower(const MultiIndex& n, int k) const {
    if (!contains(n) || k < 0 || k >= K_ || n[k] == 0)
        return std::nullopt;
    MultiIndex m = n;
    --m[k];
    return m;
}

std::string HierarchySpace::table() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < count_; ++i) {
        os << i;
        for (int k = 0; k < K_; ++k)
            os << ' ' << static_cast<int>(occ_[i * K_ + k]);
        os << '\n';
    }
    return os.str();
}

} // namespace heomtt
