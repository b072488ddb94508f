#include "bvoc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bvoc/csv.hpp"

namespace bvoc::channel {

Diffusivity Diffusivity::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("diffusivity must be finite and > 0");
  Diffusivity d;
  d.constant_ = value;
  return d;
}

Diffusivity Diffusivity::tabulated(std::vector<double> x_nodes, std::vector<double> d_values) {
  if (x_nodes.size() < 2 || x_nodes.size() != d_values.size())
    throw std::invalid_argument("tabulated diffusivity needs >= 2 matching nodes/values");
  if (x_nodes.front() != 0.0)
    throw std::invalid_argument("tabulated diffusivity must start at x = 0");
  for (std::size_t i = 1; i < x_nodes.size(); ++i)
    if (!(x_nodes[i] > x_nodes[i - 1]))
      throw std::invalid_argument("tabulated diffusivity nodes must increase strictly");
  for (double v : d_values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("tabulated diffusivity values must be > 0");
  Diffusivity d;
  d.nodes_ = std::move(x_nodes);
  d.values_ = std::move(d_values);
  return d;
}

double Diffusivity::at(double x) const {
  if (is_constant()) return constant_;
  if (x < 0.0 || x > nodes_.back())
    throw std::domain_error("diffusivity queried outside its tabulated range");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.end()) return values_.back();
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double f = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + f * (values_[i + 1] - values_[i]);
}

double Diffusivity::integral(double x) const {
  if (x < 0.0) throw std::invalid_argument("diffusivity integral: x must be >= 0");
  if (is_constant()) return constant_ * x;
  if (x > nodes_.back()) throw std::domain_error("diffusivity integral beyond tabulated range");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size() && nodes_[i] < x; ++i) {
    const double right = std::min(x, nodes_[i + 1]);
    acc += 0.5 * (values_[i] + at(right)) * (right - nodes_[i]);
  }
  return acc;
}

void ChannelParams::validate() const {
  if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("channel.u must be > 0");
  if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("channel.h must be >= 0");
}

double eddy_k(const ChannelParams& params, double x) {
  if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("eddy_k: x must be >= 0");
  return params.diffusivity.integral(x) / params.u;
}

double puff_concentration(double mass, double k, double u, double h, const FieldPoint& p) {
  if (!(k > 0.0)) throw std::domain_error("puff_concentration: k must be > 0");
  const double norm = mass / (8.0 * std::pow(std::numbers::pi * k, 1.5));
  const double dx = p.x - u * p.t;
  const double horizontal = std::exp((-dx * dx - p.y * p.y) / (4.0 * k));
  const double direct = std::exp(-(p.z - h) * (p.z - h) / (4.0 * k));
  const double image = std::exp(-(p.z + h) * (p.z + h) / (4.0 * k));
  return norm * horizontal * (direct + image);
}

double concentration(const ChannelParams& params, double mass, const FieldPoint& p) {
  if (mass < 0.0) throw std::invalid_argument("concentration: mass must be >= 0");
  if (p.z < 0.0) throw std::invalid_argument("concentration: z must be >= 0 (ground plane)");
  const double k = eddy_k(params, p.x);
  if (k == 0.0) {
    if (p.t == 0.0 && p.y == 0.0 && p.z == params.h)
      throw std::domain_error("concentration: singular at the source point");
    return 0.0;
  }
  return puff_concentration(mass, k, params.u, params.h, p);
}

double delay(const ChannelParams& params, double x_r, DelayMode mode) {
  if (!(x_r >= 0.0)) throw std::invalid_argument("delay: x_r must be >= 0");
  if (mode == DelayMode::advective) return x_r / params.u;
  if (!params.diffusivity.is_constant())
    throw std::invalid_argument("delay: diffusive/mixed modes need a constant diffusivity");
  const double d = params.diffusivity.constant_value();
  if (mode == DelayMode::diffusive) return x_r * x_r / d;
  return x_r / (2.0 * params.u) + x_r * x_r / (2.0 * d);
}

void write_field_slice_csv(std::ostream& out, const ChannelParams& params, double mass,
                           std::span<const FieldPoint> points, char sep) {
  std::vector<double> xs, ys, zs, ts, cs;
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    zs.push_back(p.z);
    ts.push_back(p.t);
    cs.push_back(concentration(params, mass, p));
  }
  csv::write_table(out, {"x", "y", "z", "t", "concentration"}, {xs, ys, zs, ts, cs}, sep);
}

}  // namespace bvoc::channel
