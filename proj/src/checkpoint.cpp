#include "heomtt/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "heomtt/errors.hpp"

namespace heomtt {

namespace {

constexpr char dense_magic[8] = {'H', 'E', 'O', 'M', 'A', 'D', 'O', '1'};
constexpr char tt_magic[8] = {'H', 'E', 'O', 'M', 'T', 'T', 'V', '1'};

template <class T>
void put(std::ofstream& o, T x) {
    o.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T x;
    if (!in.read(reinterpret_cast<char*>(&x), sizeof x))
        throw ConfigError("checkpoint '" + path + "' is truncated");
    return x;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o)
        throw ConfigError("cannot write checkpoint '" + path + "'");
    return o;
}

std::ifstream open_in(const std::string& path, const char* magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open checkpoint '" + path + "'");
    char m[8];
    if (!in.read(m, 8) || std::memcmp(m, magic, 8) != 0)
        throw ConfigError("'" + path + "' is not a checkpoint of the expected kind");
    return in;
}

} // namespace

void save_dense(const std::string& path, const HEOMState& s) {
    auto o = open_out(path);
    const HierarchySpace& sp = *s.space;
    o.write(dense_magic, 8);
    put<std::int32_t>(o, s.n);
    put<std::int32_t>(o, sp.modes());
    put<std::int32_t>(o, sp.truncation() == Truncation::Level ? 0 : 1);
    put<std::int32_t>(o, sp.limit());
    put<std::uint64_t>(o, sp.size());
    put<double>(o, s.time);
    for (std::size_t i = 0; i < sp.size(); ++i)
        for (int k = 0; k < sp.modes(); ++k)
            put<std::uint8_t>(o, static_cast<std::uint8_t>(sp.occupation(i, k)));
    o.write(reinterpret_cast<const char*>(s.data.data()), static_cast<std::streamsize>(s.data.size() * sizeof(cplx)));
    if (!o)
        throw ResourceError("failed while writing checkpoint '" + path + "'");
}

HEOMState load_dense(const std::string& path) {
    auto in = open_in(path, dense_magic);
    const int n = get<std::int32_t>(in, path);
    const int K = get<std::int32_t>(in, path);
    const int trunc = get<std::int32_t>(in, path);
    const int limit = get<std::int32_t>(in, path);
    const auto count = get<std::uint64_t>(in, path);
    const double time = get<double>(in, path);
    if (n < 1 || K < 1 || limit < 0 || (trunc != 0 && trunc != 1))
        throw ConfigError("checkpoint '" + path + "' has an invalid header");
    auto space = std::make_shared<const HierarchySpace>(trunc == 0 ? HierarchySpace::level(K, limit)
                                                                   : HierarchySpace::cap(K, limit));
    if (space->size() != count)
        throw ConfigError("checkpoint '" + path + "': index count does not match the hierarchy");
    for (std::size_t i = 0; i < count; ++i)
        for (int k = 0; k < K; ++k)
            if (get<std::uint8_t>(in, path) != space->occupation(i, k))
                throw ConfigError("checkpoint '" + path + "': index table differs from this build's ordering");
    HEOMState s;
    s.space = space;
    s.n = n;
    s.time = time;
    s.data.resize(static_cast<Eigen::Index>(count) * n * n);
    if (!in.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(s.data.size() * sizeof(cplx))))
        throw ConfigError("checkpoint '" + path + "' is truncated");
    return s;
}

void save_tt(const std::string& path, const tt::TTVector& v, double time) {
    auto o = open_out(path);
    o.write(tt_magic, 8);
    put<std::uint64_t>(o, v.order());
    put<double>(o, time);
    for (const auto& c : v.cores) {
        put<std::int32_t>(o, c.rl);
        put<std::int32_t>(o, c.m);
        put<std::int32_t>(o, c.rr);
        o.write(reinterpret_cast<const char*>(c.v.data()), static_cast<std::streamsize>(c.v.size() * sizeof(cplx)));
    }
    if (!o)
        throw ResourceError("failed while writing checkpoint '" + path + "'");
}

tt::TTVector load_tt(const std::string& path, double* time) {
    auto in = open_in(path, tt_magic);
    const auto order = get<std::uint64_t>(in, path);
    const double t = get<double>(in, path);
    if (time)
        *time = t;
    tt::TTVector v;
    int prev = 1;
    for (std::uint64_t k = 0; k < order; ++k) {
        const int rl = get<std::int32_t>(in, path);
        const int m = get<std::int32_t>(in, path);
        const int rr = get<std::int32_t>(in, path);
        if (rl != prev || m < 1 || rr < 1)
            throw ConfigError("checkpoint '" + path + "': inconsistent core shapes");
        tt::Core c(rl, m, rr);
        if (!in.read(reinterpret_cast<char*>(c.v.data()), static_cast<std::streamsize>(c.v.size() * sizeof(cplx))))
            throw ConfigError("checkpoint '" + path + "' is truncated");
        v.cores.push_back(std::move(c));
        prev = rr;
    }
    if (prev != 1)
        throw ConfigError("checkpoint '" + path + "': last bond rank is not 1");
    return v;
}

} // namespace heomtt
