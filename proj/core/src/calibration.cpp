#include "bvoc/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bvoc/csv.hpp"
#include "bvoc/nelder_mead.hpp"

namespace bvoc::calibration {

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw std::invalid_argument("series: length mismatch");
  if (times.size() < 3) throw std::invalid_argument("series: need at least 3 points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("series: non-finite entry at row " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("series: times must be strictly increasing");
  }
}

namespace {

struct PolyFit {
  std::vector<double> coefficients;
  double rss = 0.0;
};

PolyFit ols_polynomial(std::span<const double> t, std::span<const double> y, std::size_t degree) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto p = static_cast<Eigen::Index>(degree + 1);
  double scale = 0.0;
  for (double ti : t) scale = std::max(scale, std::abs(ti));
  if (scale == 0.0) scale = 1.0;

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ts = t[static_cast<std::size_t>(i)] / scale;
    double power = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      design(i, j) = power;
      power *= ts;
    }
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < p)
    throw DegenerateFit("fit_polynomial: design matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " < " + std::to_string(p) +
                        "); too few distinct times for degree " + std::to_string(degree));
  const Eigen::VectorXd scaled = qr.solve(rhs);
  PolyFit fit;
  fit.rss = (design * scaled - rhs).squaredNorm();
  fit.coefficients.resize(degree + 1);
  double factor = 1.0;
  for (std::size_t j = 0; j <= degree; ++j) {
    fit.coefficients[j] = scaled(static_cast<Eigen::Index>(j)) / factor;
    factor *= scale;
  }
  return fit;
}

void check_polynomial_input(const TimeSeries& data, std::size_t degree) {
  if (data.times.size() != data.values.size())
    throw std::invalid_argument("fit_polynomial: length mismatch");
  if (degree >= data.times.size())
    throw std::invalid_argument("fit_polynomial: degree must be below the number of points");
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!std::isfinite(data.times[i]) || !std::isfinite(data.values[i]))
      throw std::invalid_argument("fit_polynomial: non-finite data");
}

}  // namespace

transmitter::StressProfile fit_polynomial(const TimeSeries& data, std::size_t degree) {
  check_polynomial_input(data, degree);
  return transmitter::StressProfile(ols_polynomial(data.times, data.values, degree).coefficients);
}

std::size_t suggest_degree(const TimeSeries& data, std::size_t max_degree) {
  const std::size_t n = data.size();
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d <= max_degree; ++d) {
    const std::size_t params = d + 1;
    if (n <= params + 1) break;  // AICc correction undefined
    check_polynomial_input(data, d);
    double rss = 0.0;
    try {
      rss = ols_polynomial(data.times, data.values, d).rss;
    } catch (const DegenerateFit&) {
      break;
    }
    const double nd = static_cast<double>(n);
    const double k = static_cast<double>(params);
    const double score = nd * std::log(std::max(rss, 1e-300) / nd) + 2.0 * k +
                         2.0 * k * (k + 1.0) / (nd - k - 1.0);
    if (score < best_score) {
      best_score = score;
      best = d;
    }
  }
  return best;
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (actual.size() < 2) throw std::invalid_argument("r_squared: need at least 2 points");
  const double mean =
      std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (!(ss_tot > 0.0)) throw DegenerateFit("r_squared: actual series has zero variance");
  return 1.0 - ss_res / ss_tot;
}

namespace {

transmitter::GeneParams from_search_space(const std::vector<double>& theta, double v_max) {
  return transmitter::GeneParams{v_max, std::exp(theta[2]), std::exp(theta[0]), theta[1]};
}

}  // namespace

FitReport fit_gene_params(const TimeSeries& emission, const transmitter::StressProfile& stress,
                          const FitOptions& options) {
  emission.validate();
  const auto& values = emission.values;
  const double observed_max = *std::max_element(values.begin(), values.end());
  const double v_max = options.v_max.value_or(observed_max);
  if (!(v_max > 0.0)) throw DegenerateFit("fit_gene_params: v_max must be > 0 after the rule");
  {
    const double lo = *std::min_element(values.begin(), values.end());
    if (lo == observed_max) throw DegenerateFit("fit_gene_params: emission has zero variance");
  }

  const double span = emission.times.back() - emission.times.front();
  const double max_dt = options.max_dt > 0.0 ? options.max_dt : span / 1000.0;

  std::size_t evaluations = 0;
  auto sse = [&](const std::vector<double>& theta) {
    ++evaluations;
    const auto params = from_search_space(theta, v_max);
    const auto predicted =
        transmitter::emission_rate_at(params, stress, emission.times, options.g0, max_dt);
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const double r = values[i] - predicted[i];
      acc += r * r;
    }
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
  };

  // Coarse grid in (ln w, c, ln k_d).
  struct Candidate {
    std::vector<double> theta;
    double value;
  };
  std::vector<Candidate> grid;
  for (double w : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2})
    for (double c : {-10.0, -5.0, 0.0, 5.0, 10.0})
      for (double kd : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1}) {
        std::vector<double> theta{std::log(w), c, std::log(kd)};
        const double v = sse(theta);
        grid.push_back({std::move(theta), v});
      }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const auto& a, const auto& b) { return a.value < b.value; });

  const double half_decade = 0.5 * std::log(10.0);
  const std::vector<double> steps{half_decade, 2.5, half_decade};
  optim::NelderMeadOptions nm;
  nm.max_evaluations = options.evaluations_per_start;

  optim::NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::min(options.starts, grid.size());
  for (std::size_t s = 0; s < starts; ++s) {
    auto run = optim::nelder_mead(sse, grid[s].theta, steps, nm);
    if (run.value < best.value) best = std::move(run);
  }

  FitReport report;
  report.params = from_search_space(best.x, v_max);
  report.stress = stress;
  report.objective = best.value;
  report.predicted =
      transmitter::emission_rate_at(report.params, stress, emission.times, options.g0, max_dt);
  report.residuals.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    report.residuals[i] = values[i] - report.predicted[i];
  report.r2 = r_squared(values, report.predicted);
  report.v_max_from_data = !options.v_max.has_value();
  report.converged = best.converged;
  report.evaluations = evaluations;
  report.history = std::move(best.history);
  return report;
}

TimeSeries read_series_csv(std::istream& in, char sep) {
  const auto table = csv::read_table(in, sep);
  if (table.header.size() < 2) throw std::invalid_argument("series CSV needs `time,value` columns");
  TimeSeries series{table.column("time"), table.column("value")};
  series.validate();
  return series;
}

void write_series_csv(std::ostream& out, const TimeSeries& series, char sep) {
  csv::write_table(out, {"time", "value"}, {series.times, series.values}, sep);
}

}  // namespace bvoc::calibration
