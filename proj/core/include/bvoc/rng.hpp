#pragma once

#include <cstdint>
#include <random>

namespace bvoc {

/// Mixes a base seed with substream coordinates (series, point, ...) into an
/// engine seed. Results depend only on the inputs, never on scheduling.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Standard-normal draws from one deterministic substream.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t engine_seed) : engine_(engine_seed) {}
  NormalStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
      : engine_(derive_stream_seed(seed, a, b)) {}

  double operator()() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace bvoc
