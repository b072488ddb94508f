#pragma once

// Monte Carlo harness for the sweep analyses (distance, SNR, delay, mass,
// wind, eddy diffusivity, noise intensity, threshold, RSK).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bvoc/receiver.hpp"
#include "bvoc/rsk.hpp"

namespace bvoc::experiments {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::size_t kDefaultTrials = 10000;
inline constexpr double kDefaultFloorFraction = 0.005;

enum class AnalysisKind {
  distance,
  distance_snr,
  distance_delay,
  distance_mass,
  wind,
  wind_delay,
  eddy,
  noise,
  noise_snr,
  threshold,
  rsk,
};

std::string_view to_string(AnalysisKind kind);
/// Throws std::invalid_argument listing the valid kinds.
AnalysisKind parse_kind(std::string_view name);

/// Inclusive linear grid.
struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 200;

  std::vector<double> values() const;
  void validate(std::string_view field) const;
};

/// One analysis row. `levels` holds the per-curve parameter whose meaning
/// depends on `kind`: mass multipliers (distance_mass), wind speeds (wind),
/// diffusivities (eddy), noise intensities (noise), threshold fractions
/// (threshold), B/A noise ratios n of 1/n (rsk).
struct AnalysisConfig {
  std::string name;
  AnalysisKind kind = AnalysisKind::distance;
  /// Sweep axis: distance for most kinds, wind speed for wind_delay, noise
  /// intensity for noise_snr.
  GridSpec grid{0.01, 2.0, 200};
  /// Distance grid used to find the noise-free reach when the axis is not
  /// distance (noise_snr).
  std::optional<GridSpec> reference_grid;

  double u = 25.0;
  double D = 0.1;
  double h = 1.0;
  receiver::LeafParams leaf;
  double y_r = 0.0;
  double z_r = 1.0;
  double x_r = 0.75;  ///< fixed receiver distance for noise_snr / wind_delay
  receiver::ReceptionTime tau_r = receiver::kUnbounded;
  double mass = 1.1e-9;

  bool noise = true;
  double noise_intensity = 1.0;
  std::optional<double> x_a;  ///< nullopt: half the noise-free reach

  std::vector<double> levels;
  double threshold_fraction = 0.55;
  double floor_fraction = kDefaultFloorFraction;
  rsk::BlendSpec blend;
  rsk::RatioWindow window;

  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;  ///< 0: hardware concurrency; never changes results

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  channel::ChannelParams channel() const;
};

/// Nested key-value JSON. Unknown keys are rejected.
AnalysisConfig config_from_json(std::string_view text);
std::string config_to_json(const AnalysisConfig& config, int indent = -1);

struct Series {
  std::string name;
  std::vector<double> values;
};

struct SweepResult {
  std::string name;
  AnalysisKind kind = AnalysisKind::distance;
  std::string axis_name;
  std::vector<double> axis;
  std::vector<Series> series;
  /// Derived values: reach_*, x_a_*, mu_*, demod_distance_*, decode_range_*, ...
  std::map<std::string, double> scalars;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, rsk::RskProfile>> rsk_profiles;
  std::string config_json;  ///< resolved config snapshot

  const std::vector<double>& column(std::string_view name) const;
  double scalar(std::string_view name) const;
  bool has_flag(std::string_view flag) const;
  /// Single-line JSON: config, seed, derived scalars, flags, version.
  std::string metadata_json() const;
};

/// Deterministic given config.seed, whatever config.threads is.
SweepResult run_analysis(const AnalysisConfig& config);

/// run_analysis restricted to the SNR kinds (distance_snr, noise_snr).
SweepResult snr_sweep(const AnalysisConfig& config);

/// Largest x whose value is >= floor_fraction * peak; 0 for an all-zero series.
double reach(std::span<const double> x, std::span<const double> series,
             double floor_fraction = kDefaultFloorFraction);

/// Largest x before the first point where bits[i] == 0 (0 if bits[0] == 0).
double demod_distance(std::span<const double> x, std::span<const double> bits);

/// First axis value where series < level, or nullopt.
std::optional<double> first_below(std::span<const double> axis, std::span<const double> series,
                                  double level);

/// `# metadata {...}` line, header `axis,series...`, one row per axis value.
void write_sweep_csv(std::ostream& out, const SweepResult& result, char sep = ',');

/// Label fragment for a level value, e.g. 25 -> "25", 0.025 -> "0.025".
std::string level_label(double value);

}  // namespace bvoc::experiments
