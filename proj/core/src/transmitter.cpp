#include "bvoc/transmitter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bvoc/csv.hpp"

namespace bvoc::transmitter {

StressProfile::StressProfile(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) throw std::invalid_argument("StressProfile: no coefficients");
  for (double a : coefficients_)
    if (!std::isfinite(a)) throw std::invalid_argument("StressProfile: non-finite coefficient");
}

double StressProfile::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

void GeneParams::validate() const {
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw std::invalid_argument("gene.v_max must be finite and > 0");
  if (!(k_d >= 0.0) || !std::isfinite(k_d))
    throw std::invalid_argument("gene.k_d must be finite and >= 0");
  if (!std::isfinite(w)) throw std::invalid_argument("gene.w must be finite");
  if (!std::isfinite(c)) throw std::invalid_argument("gene.c must be finite");
}

namespace {

// 1 / (1 + exp(x)) without overflow.
double logistic_of_negative(double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

double production_rate(const GeneParams& params, double g, double s_val) {
  return params.v_max * logistic_of_negative(-params.w * s_val + params.c) - params.k_d * g;
}

void EmissionTrace::validate() const {
  if (times.size() < 2) throw std::invalid_argument("EmissionTrace: need at least 2 samples");
  if (g.size() != times.size() || rate.size() != times.size())
    throw std::invalid_argument("EmissionTrace: column lengths differ");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("EmissionTrace: times must be strictly increasing");
}

namespace {

double rk4_step(const GeneParams& p, const StressProfile& s, double t, double g, double h) {
  const double k1 = production_rate(p, g, s(t));
  const double k2 = production_rate(p, g + 0.5 * h * k1, s(t + 0.5 * h));
  const double k3 = production_rate(p, g + 0.5 * h * k2, s(t + 0.5 * h));
  const double k4 = production_rate(p, g + h * k3, s(t + h));
  return g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

EmissionTrace simulate_emission(const GeneParams& params, const StressProfile& stress, double t0,
                                double t1, double dt, double g0) {
  params.validate();
  if (!(t1 > t0)) throw std::invalid_argument("simulate_emission: t1 must exceed t0");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_emission: dt must be > 0");
  if (dt > t1 - t0) throw std::invalid_argument("simulate_emission: dt exceeds t1 - t0");
  if (!(g0 >= 0.0)) throw std::invalid_argument("simulate_emission: g0 must be >= 0");

  const double span = t1 - t0;
  // Tolerate floating noise in span/dt so e.g. 10/1e-3 gives 10000 steps.
  auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  steps = std::max<std::size_t>(steps, 1);

  EmissionTrace trace;
  trace.times.reserve(steps + 1);
  trace.g.reserve(steps + 1);
  trace.rate.reserve(steps + 1);

  double g = g0;
  trace.times.push_back(t0);
  trace.g.push_back(g);
  trace.rate.push_back(production_rate(params, g, stress(t0)));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_prev = trace.times.back();
    const double t_next = (i == steps) ? t1 : t0 + static_cast<double>(i) * dt;
    g = rk4_step(params, stress, t_prev, g, t_next - t_prev);
    trace.times.push_back(t_next);
    trace.g.push_back(g);
    trace.rate.push_back(production_rate(params, g, stress(t_next)));
  }
  return trace;
}

std::vector<double> emission_rate_at(const GeneParams& params, const StressProfile& stress,
                                     std::span<const double> times, double g0, double max_dt) {
  if (times.empty()) return {};
  if (!(max_dt > 0.0)) throw std::invalid_argument("emission_rate_at: max_dt must be > 0");
  std::vector<double> rates;
  rates.reserve(times.size());
  double g = g0;
  double t = times.front();
  rates.push_back(production_rate(params, g, stress(t)));
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - t;
    if (!(gap > 0.0)) throw std::invalid_argument("emission_rate_at: times must increase");
    const auto sub = static_cast<std::size_t>(std::ceil(gap / max_dt));
    const double h = gap / static_cast<double>(sub);
    for (std::size_t k = 0; k < sub; ++k) {
      g = rk4_step(params, stress, t, g, h);
      t = (k + 1 == sub) ? times[i] : t + h;
    }
    rates.push_back(production_rate(params, g, stress(t)));
  }
  return rates;
}

std::optional<MessageSignal> extract_message(const EmissionTrace& trace, double constitutive_rate,
                                             double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("extract_message: epsilon must be > 0");
  trace.validate();
  const std::size_t n = trace.size();

  std::size_t begin = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (trace.rate[i] > constitutive_rate + epsilon) {
      begin = i;
      break;
    }
  }
  if (begin == n) return std::nullopt;

  std::size_t end = n - 1;
  for (std::size_t i = begin + 1; i < n; ++i) {
    if (std::abs(trace.rate[i] - constitutive_rate) <= epsilon) {
      end = i;
      break;
    }
  }

  double mass = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double a = trace.rate[i] - constitutive_rate;
    const double b = trace.rate[i + 1] - constitutive_rate;
    mass += 0.5 * (a + b) * (trace.times[i + 1] - trace.times[i]);
  }
  return MessageSignal{std::max(0.0, mass), trace.times[begin], trace.times[end]};
}

void write_trace_csv(std::ostream& out, const EmissionTrace& trace, char sep) {
  csv::write_table(out, {"time", "g", "rate"}, {trace.times, trace.g, trace.rate}, sep);
}

EmissionTrace read_trace_csv(std::istream& in, char sep) {
  const auto table = csv::read_table(in, sep);
  EmissionTrace trace{table.column("time"), table.column("g"), table.column("rate")};
  trace.validate();
  return trace;
}

}  // namespace bvoc::transmitter
