#pragma once

#include <cstdint>
#include <string_view>

namespace bridgekit {

// Deterministic random source with explicit stream splitting. A master seed
// plus a purpose tag plus an index derive an independent stream, so adding
// parallelism never reorders the randomness any worker sees.
//
// Generator: splitmix64 over a 64-bit counter. Normal draws use Box-Muller
// computed from two fixed uniforms per pair (no libstdc++ distribution
// objects, whose output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform on [0, 1)
  double uniform();

  // uniform on [lo, hi)
  double uniform(double lo, double hi);

  // standard normal
  double normal();

  // integer in [0, n), n >= 1
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable 64-bit stream key from (seed, purpose tag, index).
std::uint64_t derive_stream(std::uint64_t seed, std::string_view purpose,
                            std::uint64_t index);

inline Rng make_stream(std::uint64_t seed, std::string_view purpose,
                       std::uint64_t index = 0) {
  return Rng(derive_stream(seed, purpose, index));
}

}  // namespace bridgekit
