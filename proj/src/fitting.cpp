#include "maxlab/fitting.hpp"

#include <cmath>

namespace maxlab {

namespace {

ScalingFit ls_fit(const std::vector<std::pair<double, double>>& raw,
                  const std::vector<double>& xs, const std::vector<double>& ys,
                  double predicted, double tolerance, FitComparison cmp) {
  size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw fit_error("fit: abscissae are all equal");

  ScalingFit fit;
  fit.points = raw;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.residual = std::sqrt(ss_res / static_cast<double>(n));
  fit.slope_se = n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
  fit.predicted_slope = predicted;
  fit.tolerance = tolerance;
  fit.comparison = cmp;
  switch (cmp) {
    case FitComparison::TwoSided:
      fit.pass = std::abs(fit.slope - predicted) <= tolerance;
      break;
    case FitComparison::AtMost:
      fit.pass = fit.slope <= predicted + tolerance;
      break;
    case FitComparison::AtLeast:
      fit.pass = fit.slope >= predicted - tolerance;
      break;
  }
  return fit;
}

}  // namespace

ScalingFit fit_loglog(const std::vector<std::pair<double, double>>& points,
                      double predicted_slope, double tolerance, FitComparison cmp) {
  if (points.size() < 3) throw fit_error("fit_loglog: need at least 3 points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw fit_error("fit_loglog: coordinates must be positive");
    xs.push_back(std::log(x));
    ys.push_back(std::log(y));
  }
  return ls_fit(points, xs, ys, predicted_slope, tolerance, cmp);
}

ScalingFit fit_linear(const std::vector<std::pair<double, double>>& points,
                      double predicted_slope, double tolerance, FitComparison cmp) {
  if (points.size() < 3) throw fit_error("fit_linear: need at least 3 points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return ls_fit(points, xs, ys, predicted_slope, tolerance, cmp);
}

}  // namespace maxlab
