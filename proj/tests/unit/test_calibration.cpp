#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "bvoc/calibration.hpp"
#include "doctest.h"

using namespace bvoc;
using namespace bvoc::calibration;

namespace {

TimeSeries sample(std::function<double(double)> f, double t0, double t1, int n) {
  TimeSeries s;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  return s;
}

double sse(const TimeSeries& s, const std::vector<double>& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) p = p * s.times[i] + a[k];
    total += (s.values[i] - p) * (s.values[i] - p);
  }
  return total;
}

/// Full 4-D grid search around `center`, re-centred on the best node and
/// shrunk after every pass.
std::vector<double> brute_force_refine(const TimeSeries& s, std::vector<double> center) {
  std::vector<double> half(center.size());
  for (std::size_t k = 0; k < center.size(); ++k) half[k] = 0.2 * std::abs(center[k]);
  const int n = 9;
  for (int pass = 0; pass < 60; ++pass) {
    auto best = center;
    double best_v = sse(s, center);
    std::vector<double> a(4);
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          for (int i3 = 0; i3 < n; ++i3) {
            const int idx[4] = {i0, i1, i2, i3};
            for (int k = 0; k < 4; ++k) a[k] = center[k] + half[k] * (2.0 * idx[k] / (n - 1) - 1.0);
            const double v = sse(s, a);
            if (v < best_v) {
              best_v = v;
              best = a;
            }
          }
    center = best;
    for (double& h : half) h *= 0.7;
  }
  return center;
}

double aicc(const TimeSeries& s, std::size_t degree) {
  const auto p = fit_polynomial(s, degree);
  double rss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) rss += std::pow(s.values[i] - p(s.times[i]), 2);
  const double n = static_cast<double>(s.size());
  const double k = static_cast<double>(degree + 1);
  return n * std::log(rss / n) + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

const transmitter::GeneParams kTruth{1.0, 0.5, 1.0, 2.0};
const transmitter::StressProfile kStress({0.0, 1.0});

TimeSeries synthetic_emission(double noise, std::uint64_t seed) {
  TimeSeries s = sample([](double) { return 0.0; }, 0.0, 10.0, 101);
  s.values = transmitter::emission_rate_at(kTruth, kStress, s.times, 0.0, 0.01);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  for (double& v : s.values) v *= 1.0 + noise * z(rng);
  return s;
}

}  // namespace

TEST_CASE("series validation") {
  CHECK_THROWS(TimeSeries({{0, 1}, {0, 1}}).validate());
  CHECK_THROWS(TimeSeries({{0, 1, 1}, {0, 1, 2}}).validate());
  CHECK_THROWS(TimeSeries({{0, 1, 2}, {0, 1}}).validate());
  CHECK_NOTHROW(TimeSeries({{0, 1, 2}, {0, 1, 2}}).validate());
}

TEST_CASE("polynomial fit on exact data") {
  const auto line = sample([](double t) { return 3.0 - 2.0 * t; }, -1.0, 4.0, 12);
  const auto p = fit_polynomial(line, 1);
  CHECK(p.coefficients()[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(p.coefficients()[1] == doctest::Approx(-2.0).epsilon(1e-12));
  std::vector<double> pred;
  for (double t : line.times) pred.push_back(p(t));
  CHECK(r_squared(line.values, pred) == doctest::Approx(1.0).epsilon(1e-14));

  const auto flat = fit_polynomial(TimeSeries{{0, 1, 2, 3}, {1.0, 4.0, 2.0, 5.0}}, 0);
  CHECK(flat.coefficients()[0] == doctest::Approx(3.0));
}

TEST_CASE("noisy cubic recovered and matching a brute-force refinement") {
  const std::vector<double> truth{1.0, 2.0, -0.5, 0.1};
  auto s = sample([&](double t) { return truth[0] + truth[1] * t + truth[2] * t * t + truth[3] * t * t * t; },
                  0.0, 10.0, 200);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 0.05);
  for (double& v : s.values) v += z(rng);
  const auto fit = fit_polynomial(s, 3).coefficients();
  for (std::size_t k = 0; k < 4; ++k) CHECK(fit[k] == doctest::Approx(truth[k]).epsilon(0.05));
  const auto brute = brute_force_refine(s, truth);
  CHECK(sse(s, fit) <= sse(s, brute) * (1.0 + 1e-9));
  for (std::size_t k = 0; k < 4; ++k) CHECK(fit[k] == doctest::Approx(brute[k]).epsilon(1e-3));
  std::size_t best = 0;
  for (std::size_t d = 1; d <= 6; ++d)
    if (aicc(s, d) < aicc(s, best)) best = d;
  CHECK(suggest_degree(s, 6) == best);
  CHECK(best >= 3);
}

TEST_CASE("residuals are orthogonal to the basis") {
  auto s = sample([](double t) { return std::sin(t) + 0.3 * t; }, 0.0, 6.0, 80);
  for (std::size_t degree : {1u, 2u, 4u}) {
    const auto p = fit_polynomial(s, degree);
    for (std::size_t k = 0; k <= degree; ++k) {
      double dot = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double basis = std::pow(s.times[i], k);
        dot += (s.values[i] - p(s.times[i])) * basis;
        scale += std::abs(s.values[i] * basis);
      }
      CHECK(std::abs(dot) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("polynomial fit errors") {
  const TimeSeries dup{{1.0, 1.0, 2.0, 2.0}, {1.0, 2.0, 3.0, 4.0}};
  CHECK_THROWS_AS(fit_polynomial(dup, 2), DegenerateFit);
  CHECK_NOTHROW(fit_polynomial(dup, 1));
  CHECK_THROWS_AS(fit_polynomial(TimeSeries{{0, 1, 2}, {0, 1, 2}}, 3), std::invalid_argument);
}

TEST_CASE("r squared") {
  const std::vector<double> a{1.0, 2.0, 4.0, 3.0};
  CHECK(r_squared(a, a) == 1.0);
  CHECK(r_squared(a, std::vector<double>(4, 2.5)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(r_squared(std::vector<double>(4, 1.0), a), DegenerateFit);
}

TEST_CASE("r squared invariant under an affine change of time axis") {
  auto s = sample([](double t) { return std::exp(-0.3 * t) + 0.1 * std::cos(3 * t); }, 0.0, 5.0, 40);
  TimeSeries shifted = s;
  for (double& t : shifted.times) t = 2.5 * t + 7.0;
  auto r2_of = [](const TimeSeries& d) {
    const auto p = fit_polynomial(d, 3);
    std::vector<double> pred;
    for (double t : d.times) pred.push_back(p(t));
    return r_squared(d.values, pred);
  };
  CHECK(r2_of(s) == doctest::Approx(r2_of(shifted)).epsilon(1e-9));
}

TEST_CASE("gene fit on noiseless self-generated data") {
  const auto data = synthetic_emission(0.0, 0);
  FitOptions opt;
  opt.v_max = kTruth.v_max;
  const auto report = fit_gene_params(data, kStress, opt);
  CHECK(report.r2 >= 0.999);
  CHECK(report.params.w == doctest::Approx(kTruth.w).epsilon(0.01));
  CHECK(report.params.c == doctest::Approx(kTruth.c).epsilon(0.01));
  CHECK(report.params.k_d == doctest::Approx(kTruth.k_d).epsilon(0.01));
  CHECK(report.converged);
  CHECK_FALSE(report.v_max_from_data);
  CHECK(report.residuals.size() == data.size());
  for (std::size_t i = 1; i < report.history.size(); ++i) CHECK(report.history[i] <= report.history[i - 1]);
}

TEST_CASE("gene fit with 5% multiplicative noise") {
  const auto data = synthetic_emission(0.05, 1234);
  FitOptions opt;
  opt.v_max = kTruth.v_max;
  const auto report = fit_gene_params(data, kStress, opt);
  CHECK(report.r2 >= 0.95);

  // No point of a local 3-D grid around the optimum does better.
  auto objective = [&](double w, double c, double kd) {
    const auto pred = transmitter::emission_rate_at({kTruth.v_max, kd, w, c}, kStress, data.times, 0.0, 0.01);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (data.values[i] - pred[i]) * (data.values[i] - pred[i]);
    return s;
  };
  const auto& p = report.params;
  double best_grid = INFINITY;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      for (int k = -3; k <= 3; ++k)
        best_grid = std::min(best_grid, objective(p.w * (1 + 0.01 * i), p.c + 0.01 * j, p.k_d * (1 + 0.01 * k)));
  CHECK(report.objective <= best_grid * (1.0 + 1e-9));
}

TEST_CASE("automatic v_max takes the highest observed rate") {
  const auto data = synthetic_emission(0.0, 0);
  const auto report = fit_gene_params(data, kStress);
  CHECK(report.v_max_from_data);
  CHECK(report.params.v_max == *std::max_element(data.values.begin(), data.values.end()));
}

TEST_CASE("flat-zero emission is degenerate") {
  const TimeSeries zero{{0, 1, 2, 3}, {0, 0, 0, 0}};
  CHECK_THROWS_AS(fit_gene_params(zero, kStress), DegenerateFit);
}

TEST_CASE("series CSV round trip") {
  const TimeSeries s{{0.0, 0.5, 1.0}, {1.25, -3.0, 1e-20}};
  std::stringstream ss;
  write_series_csv(ss, s);
  const auto back = read_series_csv(ss);
  CHECK(back.times == s.times);
  CHECK(back.values == s.values);
}
