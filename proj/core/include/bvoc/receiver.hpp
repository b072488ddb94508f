#pragma once

// Leaf uptake of airborne BVOC, Gaussian system noise, SNR and binary CSK
// demodulation.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "bvoc/channel.hpp"

namespace bvoc::receiver {

struct LeafParams {
  double P_L = 1e-8;     ///< permeability (m/s)
  double A_L = 25e-4;    ///< leaf area (m^2)
  double M_L = 0.5e-3;   ///< leaf mass (kg)
  double K_AW = 10.0;    ///< air-water partition coefficient
  std::optional<double> K_LW;  ///< leaf-water partition coefficient (uptake ODE only)

  /// P_L A_L / (K_AW M_L).
  double uptake_coefficient() const { return P_L * A_L / (K_AW * M_L); }
  void validate() const;
};

struct ReceiverLocation {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

/// Reception time; nullopt means unbounded (the leaf has integrated the whole puff).
using ReceptionTime = std::optional<double>;
inline constexpr ReceptionTime kUnbounded = std::nullopt;

/// Closed-form leaf concentration at tau_r (leaf units). Throws
/// std::domain_error for x <= 0.
double leaf_concentration(const LeafParams& leaf, const channel::ChannelParams& chan, double mass,
                          const ReceiverLocation& loc, ReceptionTime tau_r = kUnbounded);

/// Integrates dC_L/dt = a C_air - 1000 (P_L A_L)/(K_LW M_L) C_L with RK4 over
/// uniformly sampled C_air (linear interpolation between samples). Requires
/// K_LW. Returns C_L at each sample time, starting from c_l0.
std::vector<double> leaf_uptake_ode(const LeafParams& leaf, std::span<const double> c_air, double dt,
                                    double c_l0 = 0.0);

/// Mean of the system noise: -(1/10) of the leaf concentration evaluated at
/// downwind coordinate x_a (k, and both erf arguments, at x_a).
double noise_mean(const LeafParams& leaf, const channel::ChannelParams& chan, double mass,
                  const ReceiverLocation& loc, double x_a, ReceptionTime tau_r = kUnbounded);

struct NoiseModel {
  double mu = 0.0;
  double sigma = 0.0;
  double intensity = 1.0;  ///< multiplies both mu and sigma

  /// sigma = |mu| / 3 (99.7% of draws within one |mu| of the mean).
  static NoiseModel from_mean(double mu, double intensity = 1.0) {
    return NoiseModel{mu, std::abs(mu) / 3.0, intensity};
  }
  static NoiseModel none() { return NoiseModel{}; }

  bool is_zero() const { return intensity == 0.0 || (mu == 0.0 && sigma == 0.0); }
  NoiseModel scaled(double factor) const { return NoiseModel{mu, sigma, intensity * factor}; }
  void validate() const;
};

/// Unclamped additive noise term for one standard-normal draw.
inline double noise_residual(const NoiseModel& noise, double draw) {
  return noise.intensity * noise.mu + noise.intensity * noise.sigma * draw;
}

/// max(0, c_l + residual).
double add_noise(double c_l, const NoiseModel& noise, double draw);

/// 1 iff c_ln >= threshold. Throws unless threshold > 0.
int demodulate(double c_ln, double threshold);

/// 10 log10(signal/noise). Throws unless noise_power > 0.
double snr_db(double signal_power, double noise_power);

struct DemodConfig {
  double threshold_fraction = 0.55;
  ReceptionTime tau_r = kUnbounded;

  void validate() const;
};

}  // namespace bvoc::receiver
