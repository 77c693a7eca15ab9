#pragma once

#include <cstdint>

#include "mdlab/errors.hpp"

namespace mdlab::detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

inline std::int64_t checked_neg(std::int64_t a) { return checked_mul(a, -1); }

// a*b + c*d
inline std::int64_t checked_dot2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return checked_add(checked_mul(a, b), checked_mul(c, d));
}

}  // namespace mdlab::detail
