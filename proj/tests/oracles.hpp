#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's closed forms.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// erf by its Maclaurin series (|x| <= 2.5) or the Laplace continued
/// fraction for erfc (|x| > 2.5), in long double.
inline long double erf_ref(long double x) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double ax = std::fabs(x);
  long double result;
  if (ax <= 2.5L) {
    long double term = ax;
    long double sum = ax;
    for (int n = 1; n < 200; ++n) {
      term *= -ax * ax / n;
      const long double add = term / (2 * n + 1);
      sum += add;
      if (std::fabs(add) < 1e-24L) break;
    }
    result = 2.0L / std::sqrt(pi) * sum;
  } else {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    // evaluated bottom-up from a deep truncation.
    long double f = ax;
    for (int n = 300; n >= 1; --n) f = ax + (n / 2.0L) / f;
    result = 1.0L - std::exp(-ax * ax) / std::sqrt(pi) / f;
  }
  return x < 0 ? -result : result;
}

/// Adaptive Gauss-Kronrod on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

/// Composite Simpson on n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Composite Simpson over samples on a uniform grid (odd count).
inline double simpson_samples(const std::vector<double>& y, double h) {
  double s = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i] * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Gaussian puff written out directly from its definition.
inline double puff(double mass, double k, double u, double h, double x, double y, double z, double t) {
  const double pi = std::numbers::pi;
  const double a = mass / (8.0 * std::pow(pi * k, 1.5));
  const double along = std::exp((-(x - u * t) * (x - u * t) - y * y) / (4.0 * k));
  const double vert = std::exp(-(z - h) * (z - h) / (4.0 * k)) + std::exp(-(z + h) * (z + h) / (4.0 * k));
  return a * along * vert;
}

/// Nested quadrature of c(x, y, z) over the half-space z >= 0, truncated
/// at `half_width` around (x_center, 0) and at h + half_width vertically.
template <class C>
double half_space_integral(C c, double x_center, double half_width, double h) {
  return integrate(
      [&](double x) {
        return integrate(
            [&](double y) {
              return integrate([&](double z) { return c(x, y, z); }, 0.0, h + half_width, 1e-12);
            },
            -half_width, half_width, 1e-12);
      },
      x_center - half_width, x_center + half_width, 1e-12);
}

/// Leaf uptake by quadrature of the airborne concentration over reception
/// time, k frozen at the receiver's downwind coordinate. tau <= 0 means an
/// unbounded reception window.
inline double leaf_uptake_quadrature(double coeff, double mass, double k, double u, double h,
                                     double x, double y, double z, double tau) {
  auto f = [&](double t) { return puff(mass, k, u, h, x, y, z, t); };
  const double peak = x / u;
  const double width = 2.0 * std::sqrt(k) / u;
  const double end = tau > 0.0 ? tau : peak + 40.0 * width;
  // Split around the peak so the adaptive rule sees the narrow pulse.
  std::vector<double> cuts{0.0};
  for (double m : {-30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0}) {
    const double c = peak + m * width;
    if (c > cuts.back() && c < end) cuts.push_back(c);
  }
  cuts.push_back(end);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], 1e-12);
  return coeff * total;
}

/// Explicit Euler for dg/dt = v/(1+exp(-w s(t)+c)) - k_d g.
template <class Stress>
double euler_gene(double v_max, double k_d, double w, double c, Stress s, double t0, double t1,
                  double dt, double g0) {
  const auto steps = static_cast<long>(std::llround((t1 - t0) / dt));
  double g = g0;
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    g += dt * (v_max / (1.0 + std::exp(-w * s(t) + c)) - k_d * g);
  }
  return g;
}

/// Golden-section maximization on [a, b].
template <class F>
double golden_max(F f, double a, double b, int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  for (int i = 0; i < iterations; ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
