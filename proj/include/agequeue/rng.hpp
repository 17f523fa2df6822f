#pragma once

#include <cstdint>
#include <random>

namespace agequeue {

/// Seed for stream `stream` of master seed `master`.
///
/// Two rounds of splitmix64: the master seed is mixed, the stream index is
/// added with the golden-ratio increment, and the sum is mixed again. Stream
/// seeds therefore depend only on (master, stream), never on which worker
/// runs the stream.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 with portable variate conversions (no std distributions, whose
/// output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agequeue
