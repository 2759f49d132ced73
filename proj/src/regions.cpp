#include "maxlab/regions.hpp"

#include <algorithm>
#include <cmath>

namespace maxlab::regions {

namespace {

constexpr double kRelTol = 1e-12;

// strict x < b, shrunk by the tolerance so boundary points stay outside
bool lt_strict(double x, double b) { return x < b - kRelTol * std::max(1.0, std::abs(b)); }

// closed x <= b, widened so boundary points stay inside
bool le_closed(double x, double b) { return x <= b + kRelTol * std::max(1.0, std::abs(b)); }

Rat rat_int(long long v) { return Rat(v); }

}  // namespace

Rat rat_from_double(double v) {
  require(std::isfinite(v), "rat_from_double: non-finite value");
  double best_err = 1e300;
  long long best_num = 0, best_den = 1;
  // Stern-Brocot style scan over small denominators is overkill; direct
  // rounding per denominator is fine at this scale.
  for (long long den : {1LL, 2LL, 3LL, 4LL, 5LL, 6LL, 7LL, 8LL, 9LL, 10LL, 12LL,
                        16LL, 20LL, 24LL, 30LL, 32LL, 48LL, 60LL, 64LL, 100LL,
                        128LL, 256LL, 512LL, 1000LL, 1024LL, 4096LL, 10000LL,
                        65536LL, 100000LL, 1000000LL}) {
    double scaled = v * static_cast<double>(den);
    double rounded = std::nearbyint(scaled);
    if (std::abs(rounded) > 9e15) continue;
    double err = std::abs(scaled - rounded) / static_cast<double>(den);
    if (err < best_err) {
      best_err = err;
      best_num = static_cast<long long>(rounded);
      best_den = den;
    }
    if (best_err == 0.0) break;
  }
  require(best_err <= 1e-9, "rat_from_double: value is not a small rational");
  return Rat(best_num, best_den);
}

bool in_p(double x, double y, int n) {
  require(n >= 1, "in_p: n must be positive");
  double cap = (2.0 * n - 1.0) / n;
  return lt_strict(x, 1.0) && lt_strict(y, 1.0) && x >= 0.0 && y >= 0.0 &&
         lt_strict(x + y, cap);
}

bool in_p_exact(const Rat& x, const Rat& y, int n) {
  require(n >= 1, "in_p_exact: n must be positive");
  Rat one = rat_int(1);
  Rat cap(2LL * n - 1, n);
  return x < one && y < one && x >= Rat(0) && y >= Rat(0) && x + y < cap;
}

bool in_pa(double x, double y, int n, double a1, double a2) {
  require(a1 >= 1.0 && a2 >= 1.0, "in_pa: exponents must be >= 1");
  if (!in_p(x, y, n)) return false;
  double bx = 1.0 - pos_part(a2 - n) / (a2 * n);
  double by = 1.0 - pos_part(a1 - n) / (a1 * n);
  return lt_strict(x, bx) && lt_strict(y, by);
}

bool in_pa_exact(const Rat& x, const Rat& y, int n, const Rat& a1, const Rat& a2) {
  require(a1 >= Rat(1) && a2 >= Rat(1), "in_pa_exact: exponents must be >= 1");
  if (!in_p_exact(x, y, n)) return false;
  Rat nn = rat_int(n);
  Rat bx = rat_int(1) - (a2 > nn ? (a2 - nn) / (a2 * nn) : Rat(0));
  Rat by = rat_int(1) - (a1 > nn ? (a1 - nn) / (a1 * nn) : Rat(0));
  return x < bx && y < by;
}

bool necessary_ok(double x, double y, int n, double a1, double a2) {
  require(a1 >= 1.0 && a2 >= 1.0, "necessary_ok: exponents must be >= 1");
  double cap = (2.0 * n - 1.0) / n;
  if (!le_closed(x + y, cap)) return false;
  if (a2 > n && !le_closed(x, 1.0 - (1.0 / n - 1.0 / a2))) return false;
  if (a1 > n && !le_closed(y, 1.0 - (1.0 / n - 1.0 / a1))) return false;
  return true;
}

bool necessary_ok_exact(const Rat& x, const Rat& y, int n, const Rat& a1, const Rat& a2) {
  Rat nn = rat_int(n);
  Rat cap(2LL * n - 1, n);
  if (x + y > cap) return false;
  if (a2 > nn && x > rat_int(1) - (rat_int(1) / nn - rat_int(1) / a2)) return false;
  if (a1 > nn && y > rat_int(1) - (rat_int(1) / nn - rat_int(1) / a1)) return false;
  return true;
}

RegionCase classify_case(int n, double a1, double a2, bool* subcase_open, bool* mirrored) {
  require(n >= 1, "classify_case: n must be positive");
  require(a1 >= 1.0 && a2 >= 1.0, "classify_case: exponents must be >= 1");
  double mx = std::max(a1, a2), mn = std::min(a1, a2);
  double tol = kRelTol * n;
  if (mirrored) *mirrored = false;
  if (subcase_open) *subcase_open = false;
  if (mx <= n + tol) return RegionCase::A;
  if (mn <= n + tol) {
    if (mirrored) *mirrored = a1 > a2;
    return RegionCase::B;
  }
  if (subcase_open) *subcase_open = 1.0 / a1 + 1.0 / a2 > 1.0 / n + tol;
  return RegionCase::C;
}

namespace {

LabeledVertex lv(const char* label, Rat x, Rat y) { return {label, x, y}; }

}  // namespace

RegionReport region_report(int n, const Rat& a1, const Rat& a2) {
  require(n >= 1, "region_report: n must be positive");
  require(a1 >= Rat(1) && a2 >= Rat(1), "region_report: exponents must be >= 1");
  RegionReport rep;
  rep.n = n;
  rep.a1 = a1;
  rep.a2 = a2;
  Rat nn = rat_int(n);
  Rat one = rat_int(1);
  Rat inv_n = one / nn;
  Rat mx = std::max(a1, a2), mn = std::min(a1, a2);

  if (mx <= nn) {
    // whole base region; polygon of its closure, counterclockwise
    rep.kind = RegionCase::A;
    rep.vertices = {
        lv("O", Rat(0), Rat(0)),
        lv("G", one, Rat(0)),
        lv("Q", one, one - inv_n),
        lv("P", one - inv_n, one),
        lv("H", Rat(0), one),
    };
    return rep;
  }

  if (mn <= nn) {
    rep.kind = RegionCase::B;
    rep.mirrored = a1 > a2;
    if (!rep.mirrored) {
      Rat bx = one - inv_n + one / a2;
      rep.vertices = {
          lv("H", Rat(0), one),
          lv("P", one - inv_n, one),
          lv("Y", bx, one - one / a2),
          lv("B", bx, Rat(0)),
      };
    } else {
      Rat by = one - inv_n + one / a1;
      rep.vertices = {
          lv("G", one, Rat(0)),
          lv("Q", one, one - inv_n),
          lv("X", one - one / a1, by),
          lv("A", Rat(0), by),
      };
    }
    return rep;
  }

  rep.kind = RegionCase::C;
  Rat bx = one - inv_n + one / a2;
  Rat by = one - inv_n + one / a1;
  rep.subcase_open = one / a1 + one / a2 > inv_n;
  if (rep.subcase_open) {
    rep.vertices = {
        lv("O", Rat(0), Rat(0)),
        lv("A", Rat(0), by),
        lv("X", one - one / a1, by),
        lv("Y", bx, one - one / a2),
        lv("B", bx, Rat(0)),
    };
  } else {
    rep.vertices = {
        lv("O", Rat(0), Rat(0)),
        lv("A", Rat(0), by),
        lv("X", bx, by),
        lv("B", bx, Rat(0)),
    };
  }
  return rep;
}

RegionReport region_report(int n, double a1, double a2) {
  return region_report(n, rat_from_double(a1), rat_from_double(a2));
}

Rat trilinear_one_over_p3(int i, int n, const Rat& a1, const Rat& a2, const Rat& a3) {
  require(i >= 1 && i <= 3, "trilinear_one_over_p3: index must be 1, 2 or 3");
  require(n >= 1, "trilinear_one_over_p3: n must be positive");
  Rat a[3] = {a1, a2, a3};
  Rat oth[2];
  int k = 0;
  for (int j = 0; j < 3; ++j)
    if (j != i - 1) oth[k++] = a[j];
  if (oth[0] > oth[1]) std::swap(oth[0], oth[1]);
  Rat nn = rat_int(n);
  Rat one = rat_int(1);
  Rat lead = nn / oth[1];
  Rat gap = one / nn - one / oth[0];
  if (gap < Rat(0)) gap = Rat(0);
  return lead + (one - lead) * (one - gap);
}

double trilinear_one_over_p3(int i, int n, double a1, double a2, double a3) {
  return to_double(trilinear_one_over_p3(i, n, rat_from_double(a1),
                                         rat_from_double(a2), rat_from_double(a3)));
}

bool in_p3_tilde(const ExponentPoint& pt, int n, double a1, double a2, double a3) {
  require(pt.x.size() == 3, "in_p3_tilde: point must have three coordinates");
  double cap = (3.0 * n - 1.0) / n;
  double s = pt.x[0] + pt.x[1] + pt.x[2];
  if (!lt_strict(s, cap)) return false;
  for (int i = 1; i <= 3; ++i) {
    double bound = trilinear_one_over_p3(i, n, a1, a2, a3);
    if (!lt_strict(pt.x[static_cast<size_t>(i - 1)], bound)) return false;
  }
  return true;
}

bool multilinear_necessary(const ExponentPoint& pt, int n, const std::vector<double>& a) {
  size_t m = a.size();
  require(m >= 2, "multilinear_necessary: need at least two exponents");
  require(pt.x.size() == m, "multilinear_necessary: arity mismatch");
  for (double aj : a) require(aj >= 1.0, "multilinear_necessary: exponents must be >= 1");
  double cap = (static_cast<double>(m) * n - 1.0) / n;
  double s = 0.0;
  for (double xi : pt.x) s += xi;
  if (!le_closed(s, cap)) return false;
  for (size_t i = 0; i < m; ++i) {
    double inv_sum = 0.0;
    for (size_t j = 0; j < m; ++j)
      if (j != i) inv_sum += 1.0 / a[j];
    double bound = 1.0 - pos_part(1.0 / n - inv_sum);
    if (!lt_strict(pt.x[i], bound)) return false;
  }
  return true;
}

namespace {

// Sutherland-Hodgman clip of a convex polygon against c0*x + c1*y <= c2.
std::vector<std::pair<double, double>> clip_half(
    const std::vector<std::pair<double, double>>& poly, double c0, double c1, double c2) {
  std::vector<std::pair<double, double>> out;
  size_t np = poly.size();
  for (size_t i = 0; i < np; ++i) {
    auto [x1, y1] = poly[i];
    auto [x2, y2] = poly[(i + 1) % np];
    double d1 = c0 * x1 + c1 * y1 - c2;
    double d2 = c0 * x2 + c1 * y2 - c2;
    bool in1 = d1 <= 1e-12, in2 = d2 <= 1e-12;
    if (in1) out.push_back({x1, y1});
    if (in1 != in2) {
      double t = d1 / (d1 - d2);
      out.push_back({x1 + t * (x2 - x1), y1 + t * (y2 - y1)});
    }
  }
  // drop duplicate corners
  std::vector<std::pair<double, double>> ded;
  for (auto& p : out) {
    if (ded.empty() || std::abs(p.first - ded.back().first) > 1e-10 ||
        std::abs(p.second - ded.back().second) > 1e-10)
      ded.push_back(p);
  }
  if (ded.size() > 1 && std::abs(ded.front().first - ded.back().first) < 1e-10 &&
      std::abs(ded.front().second - ded.back().second) < 1e-10)
    ded.pop_back();
  return ded;
}

}  // namespace

Poly2 region_polygon(int n, double a1, double a2) {
  require(n >= 1 && a1 >= 1.0 && a2 >= 1.0, "region_polygon: bad parameters");
  std::vector<std::pair<double, double>> poly = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  poly = clip_half(poly, 1.0, 1.0, (2.0 * n - 1.0) / n);
  poly = clip_half(poly, 1.0, 0.0, 1.0 - pos_part(a2 - n) / (a2 * n));
  poly = clip_half(poly, 0.0, 1.0, 1.0 - pos_part(a1 - n) / (a1 * n));
  return {poly};
}

Poly2 curve_polygon_onesided(int m) {
  require(m >= 2, "curve_polygon_onesided: order must be >= 2");
  std::vector<std::pair<double, double>> poly = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  poly = clip_half(poly, 0.0, 1.0, 1.0 / m);
  poly = clip_half(poly, 1.0, 1.0, 1.0);
  return {poly};
}

Poly2 curve_polygon_interior(int m) {
  require(m >= 2, "curve_polygon_interior: order must be >= 2");
  std::vector<std::pair<double, double>> poly = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  poly = clip_half(poly, 1.0, static_cast<double>(m), 1.0);
  return {poly};
}

}  // namespace maxlab::regions
