#include <doctest.h>

#include <cmath>
#include <vector>

#include "maxlab/regions.hpp"

using namespace maxlab;
using namespace maxlab::regions;

namespace {

double shoelace(const Poly2& poly) {
  double twice = 0.0;
  size_t m = poly.pts.size();
  for (size_t i = 0; i < m; ++i) {
    auto [x0, y0] = poly.pts[i];
    auto [x1, y1] = poly.pts[(i + 1) % m];
    twice += x0 * y1 - x1 * y0;
  }
  return 0.5 * twice;
}

const LabeledVertex* find_vertex(const RegionReport& rep, const std::string& label) {
  for (const auto& v : rep.vertices)
    if (v.label == label) return &v;
  return nullptr;
}

}  // namespace

TEST_SUITE("regions") {

TEST_CASE("rational recovery accepts small denominators and rejects the rest") {
  CHECK(rat_from_double(0.5) == Rat(1, 2));
  CHECK(rat_from_double(5.0 / 6.0) == Rat(5, 6));
  CHECK(rat_from_double(-0.75) == Rat(-3, 4));
  CHECK(rat_from_double(2.0) == Rat(2));
  // closest fraction with denominator <= 1e6 is farther than 1e-9
  CHECK_THROWS_AS(rat_from_double(0.5 + 1e-7), domain_error);
}

TEST_CASE("coordinate caps for three factors match hand-reduced values") {
  CHECK(trilinear_one_over_p3(1, 2, Rat(2), Rat(2), Rat(6)) == Rat(1));
  CHECK(trilinear_one_over_p3(2, 2, Rat(2), Rat(2), Rat(6)) == Rat(1));
  CHECK(trilinear_one_over_p3(3, 2, Rat(4), Rat(6), Rat(6)) == Rat(5, 6));
  for (int i = 1; i <= 3; ++i)
    CHECK(trilinear_one_over_p3(i, 2, Rat(1), Rat(1), Rat(1)) == Rat(1));

  // double overload agrees with the exact one
  double d = trilinear_one_over_p3(3, 2, 4.0, 6.0, 6.0);
  CHECK(d == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("vertex table for the mixed case") {
  RegionReport rep = region_report(2, Rat(2), Rat(3));
  CHECK(rep.kind == RegionCase::B);
  CHECK_FALSE(rep.mirrored);

  const LabeledVertex* H = find_vertex(rep, "H");
  const LabeledVertex* P = find_vertex(rep, "P");
  const LabeledVertex* Y = find_vertex(rep, "Y");
  const LabeledVertex* B = find_vertex(rep, "B");
  REQUIRE(H != nullptr);
  REQUIRE(P != nullptr);
  REQUIRE(Y != nullptr);
  REQUIRE(B != nullptr);
  CHECK(H->x == Rat(0));
  CHECK(H->y == Rat(1));
  CHECK(P->x == Rat(1, 2));
  CHECK(P->y == Rat(1));
  CHECK(Y->x == Rat(5, 6));
  CHECK(Y->y == Rat(2, 3));
  CHECK(B->x == Rat(5, 6));
  CHECK(B->y == Rat(0));
}

TEST_CASE("case classification across exponent pairs") {
  bool open = false, mirrored = false;
  CHECK(classify_case(2, 2.0, 2.0) == RegionCase::A);
  CHECK(classify_case(2, 1.0, 2.0) == RegionCase::A);
  CHECK(classify_case(2, 2.0, 3.0, &open, &mirrored) == RegionCase::B);
  CHECK_FALSE(mirrored);
  CHECK(classify_case(2, 3.0, 2.0, &open, &mirrored) == RegionCase::B);
  CHECK(mirrored);
  CHECK(classify_case(2, 3.0, 3.0, &open) == RegionCase::C);
  CHECK(open);  // 1/3 + 1/3 > 1/2
  CHECK(classify_case(2, 6.0, 6.0, &open) == RegionCase::C);
  CHECK_FALSE(open);  // 1/6 + 1/6 < 1/2

  RegionReport rep = region_report(2, Rat(3), Rat(2));
  CHECK(rep.kind == RegionCase::B);
  CHECK(rep.mirrored);
}

TEST_CASE("base membership predicate") {
  CHECK(in_p(0.7, 0.7, 2));
  CHECK_FALSE(in_p(0.8, 0.8, 2));   // sum 1.6 > 3/2
  CHECK_FALSE(in_p(0.75, 0.75, 2)); // boundary is excluded
  CHECK(in_p(0.75 - 1e-6, 0.75, 2));
  CHECK_FALSE(in_p(1.0, 0.2, 2));
  CHECK(in_p_exact(Rat(7, 10), Rat(7, 10), 2));
  CHECK_FALSE(in_p_exact(Rat(3, 4), Rat(3, 4), 2));
}

TEST_CASE("membership implies the closed necessary region") {
  const std::vector<std::pair<double, double>> as = {
      {2, 2}, {2, 3}, {3, 3}, {2, 6}, {6, 2}, {1, 2}};
  CounterRng rng(11);
  for (uint64_t i = 0; i < 20000; ++i) {
    double x = 1.2 * rng.uniform(i, 0);
    double y = 1.2 * rng.uniform(i, 1);
    const auto& [a1, a2] = as[i % as.size()];
    if (in_pa(x, y, 2, a1, a2)) {
      CHECK(necessary_ok(x, y, 2, a1, a2));
      CHECK(in_p(x, y, 2));
    }
  }
}

TEST_CASE("exact and floating membership agree away from the boundary") {
  const std::vector<std::pair<Rat, Rat>> pts = {
      {Rat(1, 3), Rat(1, 3)}, {Rat(4, 5), Rat(1, 2)}, {Rat(9, 10), Rat(9, 10)},
      {Rat(1, 8), Rat(7, 8)}, {Rat(5, 6), Rat(1, 6)}};
  for (const auto& [xr, yr] : pts) {
    double x = to_double(xr), y = to_double(yr);
    CHECK(in_pa_exact(xr, yr, 2, Rat(2), Rat(3)) == in_pa(x, y, 2, 2.0, 3.0));
    CHECK(necessary_ok_exact(xr, yr, 2, Rat(2), Rat(3)) ==
          necessary_ok(x, y, 2, 2.0, 3.0));
  }
}

TEST_CASE("three-factor membership and its closed relaxation") {
  ExponentPoint inside{{0.3, 0.3, 0.3}};
  ExponentPoint outside{{0.9, 0.9, 0.9}};
  CHECK(in_p3_tilde(inside, 2, 2, 2, 2));
  CHECK_FALSE(in_p3_tilde(outside, 2, 2, 2, 2));
  // with exponents (2,2,6) every cap is 1, only the sum constraint binds
  CHECK(in_p3_tilde(ExponentPoint{{0.85, 0.85, 0.6}}, 2, 2, 2, 6));
  CHECK_FALSE(in_p3_tilde(ExponentPoint{{0.99, 0.99, 0.99}}, 2, 2, 2, 6));

  std::vector<double> sym{2, 2, 2};
  CHECK(multilinear_necessary(ExponentPoint{{0.8, 0.8, 0.8}}, 2, sym));
  CHECK_FALSE(multilinear_necessary(ExponentPoint{{0.85, 0.85, 0.85}}, 2, sym));
  // closed in the sum: 0.9 + 0.8 + 0.8 = 5/2 exactly
  CHECK(multilinear_necessary(ExponentPoint{{0.9, 0.8, 0.8}}, 2, sym));
  // strict in each coordinate
  CHECK_FALSE(multilinear_necessary(ExponentPoint{{1.0, 0.5, 0.5}}, 2, sym));
}

TEST_CASE("open three-factor region sits inside the closed one") {
  const std::vector<std::array<double, 3>> as = {
      {2, 2, 2}, {2, 2, 6}, {4, 6, 6}, {2, 4, 4}, {1, 2, 3}};
  CounterRng rng(23);
  for (uint64_t i = 0; i < 20000; ++i) {
    ExponentPoint pt{{1.1 * rng.uniform(i, 0), 1.1 * rng.uniform(i, 1),
                      1.1 * rng.uniform(i, 2)}};
    const auto& a = as[i % as.size()];
    if (in_p3_tilde(pt, 2, a[0], a[1], a[2]))
      CHECK(multilinear_necessary(pt, 2, {a[0], a[1], a[2]}));
  }
}

TEST_CASE("polygon areas for plotting match closed forms") {
  CHECK(shoelace(region_polygon(2, 2, 2)) == doctest::Approx(7.0 / 8.0).epsilon(1e-12));
  CHECK(shoelace(region_polygon(2, 2, 3)) == doctest::Approx(7.0 / 9.0).epsilon(1e-12));
  CHECK(shoelace(curve_polygon_onesided(3)) == doctest::Approx(5.0 / 18.0).epsilon(1e-12));
  CHECK(shoelace(curve_polygon_interior(3)) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  // vertices come out counterclockwise, so the signed area is positive
  CHECK(shoelace(region_polygon(2, 3, 3)) > 0.0);
  CHECK(shoelace(curve_polygon_onesided(2)) > 0.0);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(in_pa(0.5, 0.5, 2, 0.5, 2.0), domain_error);
  CHECK_THROWS_AS(region_report(0, Rat(2), Rat(2)), domain_error);
  CHECK_THROWS_AS(trilinear_one_over_p3(0, 2, Rat(2), Rat(2), Rat(2)), domain_error);
  CHECK_THROWS_AS(trilinear_one_over_p3(4, 2, Rat(2), Rat(2), Rat(2)), domain_error);
  CHECK_THROWS_AS(in_p3_tilde(ExponentPoint{{0.5, 0.5}}, 2, 2, 2, 2), domain_error);
}

}  // TEST_SUITE
