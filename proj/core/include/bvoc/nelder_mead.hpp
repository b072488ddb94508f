#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bvoc::optim {

struct NelderMeadOptions {
  std::size_t max_evaluations = 2000;
  double f_tolerance = 1e-12;  ///< relative spread of simplex values
  double x_tolerance = 1e-10;  ///< simplex diameter
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// Best objective value after each iteration; non-increasing.
  std::vector<double> history;
};

/// Derivative-free simplex minimization (standard reflection/expansion/
/// contraction/shrink coefficients 1, 2, 1/2, 1/2). `steps` gives the initial
/// simplex offsets per coordinate. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const std::vector<double>& steps,
                             const NelderMeadOptions& options = {});

}  // namespace bvoc::optim
