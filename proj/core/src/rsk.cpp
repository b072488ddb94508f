#include "bvoc/rsk.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "bvoc/csv.hpp"
#include "bvoc/parallel.hpp"
#include "bvoc/rng.hpp"

namespace bvoc::rsk {

void BlendSpec::validate() const {
  if (!(mass_a > 0.0)) throw std::invalid_argument("blend.mass_a must be > 0");
  if (!(mass_b > 0.0)) throw std::invalid_argument("blend.mass_b must be > 0");
  if (!(noise_mult_a > 0.0)) throw std::invalid_argument("blend.noise_mult_a must be > 0");
  if (!(noise_mult_b > 0.0)) throw std::invalid_argument("blend.noise_mult_b must be > 0");
}

void RatioWindow::validate() const {
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("ratio window needs 0 < lo < hi");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::decoded: return "decoded";
    case Verdict::corrupted: return "corrupted";
    case Verdict::silent: return "silent";
  }
  return "unknown";
}

Verdict decode_ratio(double c_a, double c_b, const RatioWindow& window) {
  if (c_a <= 0.0) return Verdict::silent;
  const double r = c_b / c_a;
  return window.contains(r) ? Verdict::decoded : Verdict::corrupted;
}

double BlendMeans::ratio() const {
  return mean_a > 0.0 ? mean_b / mean_a : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double trial_mean(double c_l, const receiver::NoiseModel& noise, std::size_t trials,
                  std::uint64_t seed, std::uint64_t stream, std::uint64_t species) {
  if (noise.is_zero()) return c_l;
  NormalStream draws(seed, stream, species);
  double sum = 0.0;
  for (std::size_t i = 0; i < trials; ++i) sum += receiver::add_noise(c_l, noise, draws());
  return sum / static_cast<double>(trials);
}

}  // namespace

BlendMeans simulate_blend(const BlendSpec& blend, const receiver::LeafParams& leaf,
                          const channel::ChannelParams& chan, const receiver::ReceiverLocation& loc,
                          const receiver::NoiseModel& base_noise, std::size_t trials,
                          std::uint64_t seed, receiver::ReceptionTime tau_r, std::uint64_t stream) {
  blend.validate();
  if (trials < 1) throw std::invalid_argument("simulate_blend: trials must be >= 1");
  const double c_a = receiver::leaf_concentration(leaf, chan, blend.mass_a, loc, tau_r);
  const double c_b = receiver::leaf_concentration(leaf, chan, blend.mass_b, loc, tau_r);
  return BlendMeans{
      trial_mean(c_a, base_noise.scaled(blend.noise_mult_a), trials, seed, stream, 0),
      trial_mean(c_b, base_noise.scaled(blend.noise_mult_b), trials, seed, stream, 1)};
}

double decode_range(std::span<const double> x, std::span<const double> ratio,
                    const RatioWindow& window) {
  if (x.size() != ratio.size()) throw std::invalid_argument("decode_range: size mismatch");
  if (x.empty()) return 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (ratio[i] < window.lo * (1.0 - RatioWindow::kEdgeTolerance)) return i == 0 ? 0.0 : x[i - 1];
  }
  return x.back();
}

RskProfile rsk_profile(const BlendSpec& blend, const receiver::LeafParams& leaf,
                       const channel::ChannelParams& chan, const receiver::NoiseModel& base_noise,
                       const RatioWindow& window, std::span<const double> x_grid, double y_r,
                       double z_r, std::size_t trials, std::uint64_t seed,
                       receiver::ReceptionTime tau_r, unsigned threads) {
  window.validate();
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0)) throw std::invalid_argument("rsk: x grid must be positive");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      throw std::invalid_argument("rsk: x grid must be increasing");
  }
  const std::size_t n = x_grid.size();
  RskProfile profile;
  profile.x.assign(x_grid.begin(), x_grid.end());
  profile.mean_a.resize(n);
  profile.mean_b.resize(n);
  profile.ratio.resize(n);
  profile.verdict.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto means = simulate_blend(blend, leaf, chan, {x_grid[i], y_r, z_r}, base_noise, trials,
                                      seed, tau_r, i);
    profile.mean_a[i] = means.mean_a;
    profile.mean_b[i] = means.mean_b;
    profile.ratio[i] = means.ratio();
    profile.verdict[i] = decode_ratio(means.mean_a, means.mean_b, window);
  });
  profile.decode_range = decode_range(profile.x, profile.ratio, window);
  return profile;
}

double rsk_decode_range(const BlendSpec& blend, const receiver::LeafParams& leaf,
                        const channel::ChannelParams& chan, const receiver::NoiseModel& base_noise,
                        const RatioWindow& window, std::span<const double> x_grid, double y_r,
                        double z_r, std::size_t trials, std::uint64_t seed,
                        receiver::ReceptionTime tau_r) {
  return rsk_profile(blend, leaf, chan, base_noise, window, x_grid, y_r, z_r, trials, seed, tau_r)
      .decode_range;
}

void write_rsk_csv(std::ostream& out, const RskProfile& profile, char sep) {
  out << "x" << sep << "mean_c_a" << sep << "mean_c_b" << sep << "ratio" << sep << "verdict\n";
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    out << csv::format_double(profile.x[i]) << sep << csv::format_double(profile.mean_a[i]) << sep
        << csv::format_double(profile.mean_b[i]) << sep << csv::format_double(profile.ratio[i])
        << sep << to_string(profile.verdict[i]) << '\n';
  }
}

}  // namespace bvoc::rsk
