#pragma once

#include <cstdint>
#include <random>

#include "rotdet/obb.hpp"

namespace testutil {

// Deterministic generator with a fixed mantissa mapping, independent of
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

  double range(double lo, double hi) { return lo + unit() * (hi - lo); }

  rotdet::OrientedBox box(double span = 100.0) {
    const double w = range(2.0, 40.0);
    const double h = range(1.0, w);
    return rotdet::make_box(range(-span, span), range(-span, span), w, h,
                            range(-rotdet::kPi / 4.0, 3.0 * rotdet::kPi / 4.0));
  }

 private:
  std::mt19937_64 g_;
};

}  // namespace testutil
