#include "doctest.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "heomtt/errors.hpp"
#include "heomtt/hierarchy.hpp"

using namespace heomtt;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Brute-force count of K-tuples with entries in [0, L] and sum <= L.
std::size_t brute_count(int K, int L) {
    std::vector<int> n(K, 0);
    std::size_t c = 0;
    while (true) {
        int s = 0;
        for (int x : n)
            s += x;
        if (s <= L)
            ++c;
        int k = K - 1;
        while (k >= 0 && ++n[k] > L)
            n[k--] = 0;
        if (k < 0)
            return c;
    }
}

std::size_t binomial(int a, int b) {
    double r = 1;
    for (int i = 1; i <= b; ++i)
        r = r * (a - b + i) / i;
    return static_cast<std::size_t>(std::llround(r));
}

} // namespace

TEST_CASE("level counts match enumeration and the binomial formula") {
    for (int K = 1; K <= 6; ++K)
        for (int L = 0; L <= 6; ++L) {
            const auto s = HierarchySpace::level(K, L);
            CHECK(s.size() == brute_count(K, L));
            CHECK(s.size() == binomial(L + K, K));
            CHECK(count_level(K, L) == s.size());
        }
    CHECK(count_level(80, 5) == 32801517);
    CHECK(4 * count_level(80, 5) == 131206068);
}

TEST_CASE("cap counts") {
    CHECK(HierarchySpace::cap(3, 2).size() == 27);
    CHECK(count_cap(80, 4) > std::size_t{1} << 62);
    CHECK_THROWS_AS(HierarchySpace::cap(80, 4), ResourceError);
    CHECK_THROWS_AS(HierarchySpace::level(80, 5, 1000), ResourceError);
}

TEST_CASE("golden index tables") {
    CHECK(HierarchySpace::level(2, 2).table() == slurp(HEOMTT_GOLDEN_DIR "/index_level_K2_L2.txt"));
    CHECK(HierarchySpace::cap(2, 1).table() == slurp(HEOMTT_GOLDEN_DIR "/index_cap_K2_n1.txt"));
}

TEST_CASE("level zero holds only the physical matrix") {
    for (int K = 1; K < 5; ++K) {
        const auto s = HierarchySpace::level(K, 0);
        CHECK(s.size() == 1);
        CHECK(s.index(0) == MultiIndex(K, 0));
    }
}

TEST_CASE("raise and lower") {
    const auto s = HierarchySpace::level(2, 2);
    CHECK(s.raise(MultiIndex{0, 0}, 0) == MultiIndex{1, 0});
    CHECK_FALSE(s.lower(MultiIndex{0, 0}, 0).has_value());
    CHECK_FALSE(s.raise(MultiIndex{1, 1}, 1).has_value());

    for (auto sp : {HierarchySpace::level(3, 4), HierarchySpace::cap(3, 2)}) {
        std::map<MultiIndex, std::size_t> seen;
        for (std::size_t i = 0; i < sp.size(); ++i) {
            const MultiIndex n = sp.index(i);
            CHECK(sp.find(n) == i);
            seen[n] = i;
            for (int k = 0; k < 3; ++k) {
                if (auto up = sp.raise(i, k)) {
                    CHECK(sp.lower(*up, k) == i);
                    MultiIndex m = n;
                    ++m[k];
                    CHECK(sp.index(*up) == m);
                }
                if (auto dn = sp.lower(i, k))
                    CHECK(sp.raise(*dn, k) == i);
                else
                    CHECK(n[k] == 0);
            }
        }
        CHECK(seen.size() == sp.size());
    }
}
