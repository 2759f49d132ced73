#pragma once

// Exponent-region geometry for the bilinear and multilinear boundedness
// experiments: membership predicates, case classification, labeled
// vertices, and necessary-condition checks. Vertices are computed in exact
// rational arithmetic; double-valued predicates apply a 1e-12 relative
// tolerance per inequality (strict bounds shrink, closed bounds widen).

#include <boost/rational.hpp>
#include <string>
#include <vector>

#include "maxlab/common.hpp"

namespace maxlab::regions {

using Rat = boost::rational<long long>;

// Exact rational from a double, accepted only when the value is within
// 1e-9 of k/q for some q <= 10^6. Throws domain_error otherwise.
Rat rat_from_double(double v);

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

struct ExponentPoint {
  std::vector<double> x;  // coordinates (1/p_1, ..., 1/p_m), each in [0,1]
};

struct LabeledVertex {
  std::string label;  // one of H,P,Y,B,O,A,X,Q,G
  Rat x;
  Rat y;
};

enum class RegionCase { A, B, C };

struct RegionReport {
  int n = 0;
  Rat a1;
  Rat a2;
  RegionCase kind = RegionCase::A;
  bool mirrored = false;       // case B with a2 <= n < a1
  bool subcase_open = false;   // case C with 1/a1 + 1/a2 > 1/n
  std::vector<LabeledVertex> vertices;
};

// interior of the base region: x < 1, y < 1, x + y < (2n-1)/n
bool in_p(double x, double y, int n);
bool in_p_exact(const Rat& x, const Rat& y, int n);

// base region intersected with x < 1 - (a2-n)_+/(a2 n), y < 1 - (a1-n)_+/(a1 n)
bool in_pa(double x, double y, int n, double a1, double a2);
bool in_pa_exact(const Rat& x, const Rat& y, int n, const Rat& a1, const Rat& a2);

// closed necessary region: x + y <= (2n-1)/n, and when a2 > n also
// x <= 1 - (1/n - 1/a2), and when a1 > n also y <= 1 - (1/n - 1/a1)
bool necessary_ok(double x, double y, int n, double a1, double a2);
bool necessary_ok_exact(const Rat& x, const Rat& y, int n, const Rat& a1, const Rat& a2);

RegionCase classify_case(int n, double a1, double a2, bool* subcase_open = nullptr,
                         bool* mirrored = nullptr);

RegionReport region_report(int n, const Rat& a1, const Rat& a2);
RegionReport region_report(int n, double a1, double a2);

// Trilinear / m-linear pieces.

// 1/p_i^3 = n/a_j2 + (1 - n/a_j2) * (1 - (1/n - 1/a_j1)_+), where j1, j2
// are the two indices other than i ordered so a_j1 <= a_j2.
Rat trilinear_one_over_p3(int i, int n, const Rat& a1, const Rat& a2, const Rat& a3);
double trilinear_one_over_p3(int i, int n, double a1, double a2, double a3);

// sum x_i < (3n-1)/n and x_i < 1/p_i^3 for each i
bool in_p3_tilde(const ExponentPoint& pt, int n, double a1, double a2, double a3);

// sum x_i <= (mn-1)/n and x_i < 1 - (1/n - sum_{j != i} 1/a_j)_+ for each i
bool multilinear_necessary(const ExponentPoint& pt, int n, const std::vector<double>& a);

// Convex polygon clipping of [0,1]^2 against the region's half-planes,
// for plotting. Vertices in counterclockwise order.
struct Poly2 {
  std::vector<std::pair<double, double>> pts;
};
Poly2 region_polygon(int n, double a1, double a2);

// Plane regions for the curve operator at a degenerate point of order m:
// one-sided kind: {x < 1, y < 1/m, x + y < 1};
// interior kind:  {x + m*y < 1, x >= 0, y >= 0}.
Poly2 curve_polygon_onesided(int m);
Poly2 curve_polygon_interior(int m);

}  // namespace maxlab::regions
