#pragma once

// Bilinear averages and maximal operators along plane curves
// (s, gamma2(s)) on the unit parameter interval, the off-center truncated
// maximal operator on the line, flatness-order detection, and the cutoff
// scaling experiments that separate bounded from unbounded exponent pairs.

#include <functional>
#include <utility>
#include <vector>

#include "maxlab/bilinear.hpp"
#include "maxlab/fields.hpp"
#include "maxlab/fitting.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab::curves {

using bilinear::MaxMode;
using fields::FunctionSpec;
using fields::Grid;
using fields::SampledField;

// Scalar curve component on (0,1) with derivative access. Polynomial
// members differentiate exactly; generic callables fall back to Richardson
// finite differences.
struct CurveFn {
  enum class Kind { Polynomial, Generic };
  Kind kind = Kind::Polynomial;
  std::vector<double> coeffs{0.0, 1.0};  // ascending powers
  std::function<double(double)> fn;

  double operator()(double s) const;
  double derivative(double s, int order) const;

  static CurveFn polynomial(std::vector<double> coefficients);
  static CurveFn identity();  // s -> s
  // c_star - (s - s0)^m * phi(s) with phi a polynomial in (s - s0),
  // expanded into standard form; phi must not vanish at s0
  static CurveFn flat_point(double c_star, double s0, int m,
                            std::vector<double> phi);
  static CurveFn generic(std::function<double(double)> callable);
};

// nonnegative polynomial bump (1 - u^2)^2, u = (s - center) / width;
// one_sided_right keeps only s >= center
struct Cutoff {
  double center = 0.5;
  double width = 0.25;
  bool one_sided_right = false;

  double operator()(double s) const;
  std::pair<double, double> support() const;
};

struct CurveSpec {
  CurveFn gamma1 = CurveFn::identity();
  CurveFn gamma2;
  Cutoff psi;
};

struct TypeReport {
  double s0 = 0.0;
  int m = 0;  // smallest derivative order that survives at s0
  std::vector<double> derivative_magnitudes;  // orders 1..m
};

// Smallest m >= 1 with |gamma2^(m)(s0)| > tol * (largest magnitude among
// orders 1..m_max). All orders below tolerance is an error.
TypeReport detect_type(const CurveSpec& curve, double s0, double tol = 1e-9,
                       int m_max = 6);

struct CurveQuadrature {
  int cells = 64;
  int nodes = 8;
};

// integral over supp psi of f(x - t1 g1(s)) g(x - t2 g2(s)) psi(s) ds;
// indicator argument crossings get mesh breakpoints
double curve_average(const FunctionSpec& f, const FunctionSpec& g, double x,
                     double t1, double t2, const CurveSpec& curve,
                     const CurveQuadrature& rule = {});

// same integrand on an explicit parameter mesh (cutoff experiments)
double curve_average_on_mesh(const FunctionSpec& f, const FunctionSpec& g,
                             double x, double t1, double t2,
                             const CurveSpec& curve, const CompositeMesh& mesh,
                             int nodes);

struct CurveMaximalRequest {
  CurveSpec curve;
  FunctionSpec f;
  FunctionSpec g;
  Grid out_grid;  // 1-D
  double t_min = 0.25;
  double t_max = 4.0;
  double t_ratio = 1.0905077326652577;  // 2^(1/8)
  MaxMode mode = MaxMode::Diagonal;
  int cells = 64;
  int nodes = 5;
};

// discrete sup over the t grid of |curve average| at each grid point; a
// lower bound of the true sup, nondecreasing under t-grid refinement
SampledField curve_maximal(const CurveMaximalRequest& req);

// off-center truncated maximal value sup_t integral over (h-2, h+2) of
// f(x - t y) dy; exact interval arithmetic for interval indicators,
// quadrature otherwise
SampledField mstar(const FunctionSpec& f, double h, const Grid& grid,
                   const std::vector<double>& ts, int cells = 128,
                   int nodes = 6);

// Lp growth of the off-center operator on the unit-interval indicator:
// fits log ||M*_h f||_p against log h, predicted slope 1/p, and checks the
// profile bound value * (1 + x/h) stays within fixed constants. The sup in
// t is taken over alignment candidates derived from the interval geometry,
// so the measured field is quadrature-exact for indicator data.
ScalingFit mstar_exponent(double p, const std::vector<double>& hs);

enum class CurveCase { NondegenerateBound, FlatGrowth, JointDivergence };

struct CurveSharpnessRequest {
  CurveCase which = CurveCase::FlatGrowth;
  int m = 3;
  double p = 2.0;
  double q = 2.0;
  std::vector<double> etas;  // decreasing cutoffs (halvings); default per case
  double ratio_tolerance = 0.10;  // relative tolerance on per-halving ratios
};

// what the scaling experiment measured; field meaning depends on the case:
//  - FlatGrowth: rows (eta, integral), ratios of successive values, fit of
//    log value vs log eta (predicted slope 1 - m/q)
//  - JointDivergence: rows (eta, integral), ratios of successive
//    increments, fit of log increment vs log eta (predicted 1 - e with
//    e = 1/p + m/q), divergent when the measured e reaches 1
//  - NondegenerateBound: bound_ratio = max over probes of
//    field / min(Mf * sup g, sup f * Mg); fit unused
struct CurveSharpnessReport {
  std::vector<std::pair<double, double>> rows;
  std::vector<double> ratios;
  double predicted_ratio = 1.0;
  ScalingFit fit;
  bool divergent = false;
  double bound_ratio = 0.0;
};

CurveSharpnessReport curve_sharpness(const CurveSharpnessRequest& req);

}  // namespace maxlab::curves
