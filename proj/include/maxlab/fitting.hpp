#pragma once

// Least-squares slope extraction for scaling experiments, plus the shared
// Monte-Carlo estimate record.

#include <vector>

#include "maxlab/common.hpp"

namespace maxlab {

struct MCEstimate {
  double value = 0.0;
  double se = 0.0;  // standard error of the mean
  uint64_t samples = 0;
};

enum class FitComparison { TwoSided, AtMost, AtLeast };

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double residual = 0.0;  // rms residual in fit coordinates
  double predicted_slope = 0.0;
  double tolerance = 0.0;
  FitComparison comparison = FitComparison::TwoSided;
  bool pass = false;
  std::vector<std::pair<double, double>> points;  // raw (x, y)
};

// Least squares on (log x, log y). Requires >= 3 points with positive
// coordinates; otherwise throws fit_error.
ScalingFit fit_loglog(const std::vector<std::pair<double, double>>& points,
                      double predicted_slope, double tolerance,
                      FitComparison cmp = FitComparison::TwoSided);

// Least squares on raw (x, y); used for mass-versus-log-scale probes.
ScalingFit fit_linear(const std::vector<std::pair<double, double>>& points,
                      double predicted_slope, double tolerance,
                      FitComparison cmp = FitComparison::TwoSided);

}  // namespace maxlab
