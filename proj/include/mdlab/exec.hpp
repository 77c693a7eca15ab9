#pragma once

#include <cstdint>

namespace mdlab {

// Data-parallel kernels come in two flavours: an OpenMP loop and the plain
// serial loop it must agree with. Results are identical either way.
enum class Exec : std::uint8_t { Serial, Parallel };

}  // namespace mdlab
