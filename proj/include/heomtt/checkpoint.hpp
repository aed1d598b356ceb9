#pragma once

#include <string>

#include "heomtt/heom_dense.hpp"
#include "heomtt/tt.hpp"

namespace heomtt {

// Dense layout (little endian):
//   "HEOMADO1", int32 n, int32 K, int32 truncation (0 level, 1 cap),
//   int32 limit, uint64 count, float64 time,
//   count * K uint8 occupations (the index table, in space order),
//   count * n * n complex128 entries (ADO-major, row-major blocks).
void save_dense(const std::string& path, const HEOMState& s);
/// Rebuilds the hierarchy space and checks the stored index table against it.
HEOMState load_dense(const std::string& path);

// TT layout: "HEOMTTV1", uint64 order, float64 time, then per core
//   int32 rl, int32 m, int32 rr, rl*m*rr complex128 entries in core order.
void save_tt(const std::string& path, const tt::TTVector& v, double time);
tt::TTVector load_tt(const std::string& path, double* time = nullptr);

} // namespace heomtt
