#pragma once

// Least-squares calibration of the emission model: polynomial stress
// profile, gene-regulation parameters (w, c, k_d), and r^2.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bvoc/transmitter.hpp"

namespace bvoc::calibration {

/// Raised when a fit is undefined: zero-variance data, rank deficiency.
class DegenerateFit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  /// Equal lengths >= 3, strictly increasing times, finite values.
  void validate() const;
};

/// Ordinary least squares polynomial of the given degree (column-pivoted QR
/// on a scaled Vandermonde matrix). Times may repeat; throws DegenerateFit
/// when the design matrix is rank deficient, std::invalid_argument when
/// degree >= number of points.
transmitter::StressProfile fit_polynomial(const TimeSeries& data, std::size_t degree);

/// Degree in [0, max_degree] minimizing the corrected AIC of the OLS fit.
std::size_t suggest_degree(const TimeSeries& data, std::size_t max_degree);

/// 1 - SS_res / SS_tot. Throws DegenerateFit when `actual` has zero variance.
double r_squared(std::span<const double> actual, std::span<const double> predicted);

struct FitOptions {
  std::optional<double> v_max;  ///< nullopt: highest observed emission rate
  double g0 = 0.0;              ///< gene product at the first sample time
  double max_dt = 0.0;          ///< RK4 substep; 0 picks span / 1000
  std::size_t starts = 4;
  std::size_t evaluations_per_start = 2000;
};

struct FitReport {
  transmitter::GeneParams params;
  transmitter::StressProfile stress;
  double r2 = 0.0;
  double objective = 0.0;  ///< sum of squared residuals
  std::vector<double> predicted;
  std::vector<double> residuals;  ///< data - predicted
  bool v_max_from_data = false;
  bool converged = false;  ///< false: iteration budget ran out (warning)
  std::size_t evaluations = 0;
  /// Best-so-far objective after each simplex iteration of the winning start.
  std::vector<double> history;
};

/// Fits (w, c, k_d) so the simulated production rate matches `emission`.
/// Multi-start simplex seeded from a coarse grid over w in [1e-3, 1e2],
/// c in [-10, 10], k_d in [1e-4, 1e1].
FitReport fit_gene_params(const TimeSeries& emission, const transmitter::StressProfile& stress,
                          const FitOptions& options = {});

/// CSV `time,value`.
TimeSeries read_series_csv(std::istream& in, char sep = ',');
void write_series_csv(std::ostream& out, const TimeSeries& series, char sep = ',');

}  // namespace bvoc::calibration
