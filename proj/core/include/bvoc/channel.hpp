#pragma once

// Closed-form Gaussian puff transport with ground reflection, the eddy
// diffusivity transform, and the three delay formulas.

#include <iosfwd>
#include <span>
#include <vector>

namespace bvoc::channel {

/// Eddy diffusivity D(x): either a constant or a piecewise-linear table on
/// increasing downwind nodes starting at x = 0.
class Diffusivity {
 public:
  Diffusivity() = default;
  /// Throws unless value > 0.
  static Diffusivity constant(double value);
  /// Throws unless nodes start at 0, increase strictly, and all D > 0.
  static Diffusivity tabulated(std::vector<double> x_nodes, std::vector<double> d_values);

  bool is_constant() const { return nodes_.empty(); }
  /// Only meaningful when is_constant().
  double constant_value() const { return constant_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

  double at(double x) const;
  /// Integral of D over [0, x]; exact for the piecewise-linear table.
  double integral(double x) const;

 private:
  double constant_ = 0.1;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

struct ChannelParams {
  double u = 25.0;                                     ///< wind speed along +x (m/s)
  Diffusivity diffusivity = Diffusivity::constant(0.1);  ///< m^2/s
  double h = 1.0;                                      ///< source height (m)

  void validate() const;
};

struct FieldPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;  ///< time since release (s)
};

/// k = (1/u) * integral_0^x D(eta) d eta. Rejects negative x.
double eddy_k(const ChannelParams& params, double x);

/// Puff concentration with an explicit k > 0 (kg/m^3).
double puff_concentration(double mass, double k, double u, double h, const FieldPoint& p);

/// Puff concentration with k evaluated at the point's downwind coordinate.
/// At x = 0 (k = 0) returns the analytic limit 0, except at the source point
/// itself where it throws std::domain_error.
double concentration(const ChannelParams& params, double mass, const FieldPoint& p);

enum class DelayMode { advective, diffusive, mixed };

/// advective x/u, diffusive x^2/D, mixed x/(2u) + x^2/(2D). The diffusive and
/// mixed forms require a constant diffusivity.
double delay(const ChannelParams& params, double x_r, DelayMode mode);

/// CSV `x,y,z,t,concentration`.
void write_field_slice_csv(std::ostream& out, const ChannelParams& params, double mass,
                           std::span<const FieldPoint> points, char sep = ',');

}  // namespace bvoc::channel
