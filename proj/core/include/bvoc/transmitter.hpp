#pragma once

// Stress-driven BVOC emission: the polynomial stress regulator, the
// gene-regulation production-rate ODE, and extraction of the released mass.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace bvoc::transmitter {

/// Polynomial regulator s(t) = a_0 + a_1 t + ... + a_n t^n.
class StressProfile {
 public:
  StressProfile() = default;
  /// Throws std::invalid_argument on an empty or non-finite coefficient list.
  explicit StressProfile(std::vector<double> coefficients);

  static StressProfile constant(double value) { return StressProfile({value}); }

  const std::vector<double>& coefficients() const { return coefficients_; }
  std::size_t degree() const { return coefficients_.size() - 1; }

  /// Horner evaluation.
  double operator()(double t) const;

 private:
  std::vector<double> coefficients_{0.0};
};

inline double eval_stress(const StressProfile& profile, double t) { return profile(t); }

struct GeneParams {
  double v_max = 1.0;  ///< max production rate, > 0
  double k_d = 0.0;    ///< degradation rate, >= 0
  double w = 1.0;      ///< regulator weight
  double c = 0.0;      ///< response-delay offset

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// v_max / (1 + exp(-w s + c)) - k_d g, with the logistic evaluated so that
/// exp overflow saturates instead of producing NaN.
double production_rate(const GeneParams& params, double g, double s_val);

struct EmissionTrace {
  std::vector<double> times;
  std::vector<double> g;
  std::vector<double> rate;

  std::size_t size() const { return times.size(); }
  /// Checks equal lengths >= 2 and strictly increasing times.
  void validate() const;
};

/// Fixed-step classical RK4 from t0 to t1. The final step is shortened so the
/// grid ends exactly at t1. Throws on dt <= 0, dt > t1 - t0, or g0 < 0.
EmissionTrace simulate_emission(const GeneParams& params, const StressProfile& stress, double t0,
                                double t1, double dt, double g0);

/// Production rate I(t) sampled at arbitrary increasing `times`, integrating
/// with RK4 substeps no longer than max_dt. g(times[0]) = g0.
std::vector<double> emission_rate_at(const GeneParams& params, const StressProfile& stress,
                                     std::span<const double> times, double g0, double max_dt);

struct MessageSignal {
  double mass = 0.0;   ///< integral of (rate - constitutive) over [tau_b, tau_e], >= 0
  double tau_b = 0.0;  ///< emission onset
  double tau_e = 0.0;  ///< emission end
};

/// Onset is the first sample whose rate exceeds constitutive_rate + epsilon;
/// the end is the first later sample back within epsilon of the constitutive
/// rate (or the trace end). Returns nullopt when no onset exists.
std::optional<MessageSignal> extract_message(const EmissionTrace& trace, double constitutive_rate,
                                             double epsilon);

/// 1% of v_max.
inline double default_epsilon(const GeneParams& params) { return 0.01 * params.v_max; }

/// CSV with header `time,g,rate`.
void write_trace_csv(std::ostream& out, const EmissionTrace& trace, char sep = ',');
EmissionTrace read_trace_csv(std::istream& in, char sep = ',');

}  // namespace bvoc::transmitter
