#include "bvoc/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bvoc::receiver {

void LeafParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("leaf.") + name + " must be finite and > 0");
  };
  positive(P_L, "P_L");
  positive(A_L, "A_L");
  positive(M_L, "M_L");
  positive(K_AW, "K_AW");
  if (K_LW) positive(*K_LW, "K_LW");
}

double leaf_concentration(const LeafParams& leaf, const channel::ChannelParams& chan, double mass,
                          const ReceiverLocation& loc, ReceptionTime tau_r) {
  if (!(loc.x > 0.0)) throw std::domain_error("leaf_concentration: x_r must be > 0");
  if (mass < 0.0) throw std::invalid_argument("leaf_concentration: mass must be >= 0");
  if (mass == 0.0) return 0.0;

  const double k = channel::eddy_k(chan, loc.x);
  const double u = chan.u;
  const double h = chan.h;
  const double y2 = loc.y * loc.y;
  const double vertical = std::exp((-(loc.z - h) * (loc.z - h) - y2) / (4.0 * k)) +
                          std::exp((-(loc.z + h) * (loc.z + h) - y2) / (4.0 * k));
  const double width = 2.0 * std::sqrt(k);
  const double arrived = tau_r ? std::erf((u * *tau_r - loc.x) / width) : 1.0;
  const double window = arrived + std::erf(loc.x / width);
  return leaf.uptake_coefficient() * mass / (8.0 * std::numbers::pi * k * u) * vertical * window;
}

std::vector<double> leaf_uptake_ode(const LeafParams& leaf, std::span<const double> c_air, double dt,
                                    double c_l0) {
  if (!leaf.K_LW) throw std::invalid_argument("leaf_uptake_ode: K_LW is required");
  if (!(dt > 0.0)) throw std::invalid_argument("leaf_uptake_ode: dt must be > 0");
  std::vector<double> out;
  if (c_air.empty()) return out;

  const double gain = leaf.uptake_coefficient();
  const double loss = 1000.0 * leaf.P_L * leaf.A_L / (*leaf.K_LW * leaf.M_L);
  auto rhs = [&](double air, double c) { return gain * air - loss * c; };

  out.reserve(c_air.size());
  double c = c_l0;
  out.push_back(c);
  for (std::size_t i = 0; i + 1 < c_air.size(); ++i) {
    const double a0 = c_air[i];
    const double a1 = c_air[i + 1];
    const double am = 0.5 * (a0 + a1);
    const double k1 = rhs(a0, c);
    const double k2 = rhs(am, c + 0.5 * dt * k1);
    const double k3 = rhs(am, c + 0.5 * dt * k2);
    const double k4 = rhs(a1, c + dt * k3);
    c += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(c);
  }
  return out;
}

double noise_mean(const LeafParams& leaf, const channel::ChannelParams& chan, double mass,
                  const ReceiverLocation& loc, double x_a, ReceptionTime tau_r) {
  if (!(x_a > 0.0)) throw std::domain_error("noise_mean: x_a must be > 0");
  return -leaf_concentration(leaf, chan, mass, ReceiverLocation{x_a, loc.y, loc.z}, tau_r) / 10.0;
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise.sigma must be >= 0");
  if (!(intensity >= 0.0)) throw std::invalid_argument("noise.intensity must be >= 0");
  if (!std::isfinite(mu)) throw std::invalid_argument("noise.mu must be finite");
}

double add_noise(double c_l, const NoiseModel& noise, double draw) {
  return std::max(0.0, c_l + noise_residual(noise, draw));
}

int demodulate(double c_ln, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("demodulate: threshold must be > 0");
  return c_ln >= threshold ? 1 : 0;
}

double snr_db(double signal_power, double noise_power) {
  if (!(noise_power > 0.0)) throw std::domain_error("snr_db: noise power must be > 0");
  return 10.0 * std::log10(signal_power / noise_power);
}

void DemodConfig::validate() const {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
    throw std::invalid_argument("threshold_fraction must lie in (0, 1]");
  if (tau_r && !(*tau_r > 0.0)) throw std::invalid_argument("tau_r must be > 0");
}

}  // namespace bvoc::receiver
