#pragma once

// Ratio shift keying over a two-species blend sharing one channel.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "bvoc/receiver.hpp"

namespace bvoc::rsk {

struct BlendSpec {
  double mass_a = 1.1e-9;
  double mass_b = 2.75e-9;
  double noise_mult_a = 1.0;
  double noise_mult_b = 1.0;

  void validate() const;
};

/// Acceptable B/A concentration ratios. Both edges are inclusive up to a
/// relative slack of kEdgeTolerance, so a ratio that is exactly on an edge
/// in exact arithmetic is not lost to rounding.
struct RatioWindow {
  static constexpr double kEdgeTolerance = 1e-12;

  double lo = 2.0;
  double hi = 2.5;

  bool contains(double ratio) const {
    return ratio >= lo * (1.0 - kEdgeTolerance) && ratio <= hi * (1.0 + kEdgeTolerance);
  }

  void validate() const;
};

enum class Verdict { decoded, corrupted, silent };

std::string_view to_string(Verdict v);

/// silent if c_a <= 0; decoded if lo <= c_b/c_a <= hi; corrupted otherwise.
Verdict decode_ratio(double c_a, double c_b, const RatioWindow& window);

struct BlendMeans {
  double mean_a = 0.0;
  double mean_b = 0.0;

  /// Ratio of trial means (NaN when mean_a <= 0).
  double ratio() const;
};

/// Runs the receiver pipeline per species: shared channel and location,
/// per-species mass and noise multiplier applied to `base_noise`. Draws come
/// from substreams (seed, stream, 0) for A and (seed, stream, 1) for B.
BlendMeans simulate_blend(const BlendSpec& blend, const receiver::LeafParams& leaf,
                          const channel::ChannelParams& chan, const receiver::ReceiverLocation& loc,
                          const receiver::NoiseModel& base_noise, std::size_t trials,
                          std::uint64_t seed, receiver::ReceptionTime tau_r = receiver::kUnbounded,
                          std::uint64_t stream = 0);

struct RskProfile {
  std::vector<double> x;
  std::vector<double> mean_a;
  std::vector<double> mean_b;
  std::vector<double> ratio;
  std::vector<Verdict> verdict;
  double decode_range = 0.0;
};

/// Largest x before the first grid point whose ratio falls below window.lo;
/// 0 when the first point already does; the last grid point when none does.
double decode_range(std::span<const double> x, std::span<const double> ratio,
                    const RatioWindow& window);

/// Blend simulation over an increasing positive distance grid. Grid point i
/// uses RNG stream i, so results do not depend on evaluation order.
RskProfile rsk_profile(const BlendSpec& blend, const receiver::LeafParams& leaf,
                       const channel::ChannelParams& chan, const receiver::NoiseModel& base_noise,
                       const RatioWindow& window, std::span<const double> x_grid, double y_r,
                       double z_r, std::size_t trials, std::uint64_t seed,
                       receiver::ReceptionTime tau_r = receiver::kUnbounded,
                       unsigned threads = 1);

double rsk_decode_range(const BlendSpec& blend, const receiver::LeafParams& leaf,
                        const channel::ChannelParams& chan, const receiver::NoiseModel& base_noise,
                        const RatioWindow& window, std::span<const double> x_grid, double y_r,
                        double z_r, std::size_t trials, std::uint64_t seed,
                        receiver::ReceptionTime tau_r = receiver::kUnbounded);

/// CSV `x,mean_c_a,mean_c_b,ratio,verdict`.
void write_rsk_csv(std::ostream& out, const RskProfile& profile, char sep = ',');

}  // namespace bvoc::rsk
