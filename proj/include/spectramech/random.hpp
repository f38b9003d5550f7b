#pragma once

#include <cstdint>
#include <random>

namespace spectramech {

/// Derives an independent stream seed from a base seed and a stream index.
/// Used everywhere a Monte Carlo draw, restart or cell needs its own RNG, so
/// results do not depend on evaluation order or thread count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable uniform variates on top of mt19937_64. The standard library's
/// distributions are implementation-defined, so they are avoided here.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double open_uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spectramech
