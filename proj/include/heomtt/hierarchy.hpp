#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace heomtt {

using MultiIndex = std::vector<int>;

enum class Truncation { Level, Cap };

/// Number of multi-indices with sum <= L over K modes, (L+K)!/(L!K!).
/// Saturates at SIZE_MAX instead of overflowing.
std::size_t count_level(int K, int L);
/// (n_max+1)^K, saturating.
std::size_t count_cap(int K, int n_max);

/// Enumerated ADO index space. Modes are 0-based in the API.
///
/// Level truncation is ordered graded-lexicographically: by total level, then
/// by decreasing occupation of the first mode, e.g. K=2, L=2 gives
/// 00, 10, 01, 20, 11, 02. Cap truncation is mixed radix with mode 0 slowest,
/// which matches the Kronecker order of the TT super-operators.
class HierarchySpace {
public:
    static constexpr std::size_t default_budget = std::size_t{1} << 26;

    static HierarchySpace level(int K, int L, std::size_t max_count = default_budget);
    static HierarchySpace cap(int K, int n_max, std::size_t max_count = default_budget);

    Truncation truncation() const { return truncation_; }
    int modes() const { return K_; }
    /// L for level truncation, n_max for cap truncation.
    int limit() const { return limit_; }
    std::size_t size() const { return count_; }

    MultiIndex index(std::size_t i) const;
    int occupation(std::size_t i, int k) const { return occ_[i * K_ + k]; }
    int level_of(std::size_t i) const;
    std::optional<std::size_t> find(const MultiIndex& n) const;

    std::optional<std::size_t> raise(std::size_t i, int k) const;
    std::optional<std::size_t> lower(std::size_t i, int k) const;
    std::optional<MultiIndex> raise(const MultiIndex& n, int k) const;
    std::optional<MultiIndex> lower(const MultiIndex& n, int k) const;

    bool contains(const MultiIndex& n) const;

    /// One line per index: "<position> n_1 n_2 ... n_K".
    std::string table() const;

private:
    HierarchySpace() = default;
    void build_neighbours();
    std::size_t rank(const MultiIndex& n) const;

    Truncation truncation_ = Truncation::Level;
    int K_ = 0;
    int limit_ = 0;
    std::size_t count_ = 0;
    std::vector<std::uint8_t> occ_;
    std::vector<std::int64_t> up_;
    std::vector<std::int64_t> down_;
    std::vector<std::size_t> level_offset_;
};

} // namespace heomtt
