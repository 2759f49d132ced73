#include <doctest.h>

#include <cmath>
#include <vector>

#include "maxlab/bilinear.hpp"

using namespace maxlab;
using namespace maxlab::bilinear;

namespace {

AverageRequest smooth_request() {
  AverageRequest req;
  req.geom = SliceGeometry(2, 2.0, 3.0);
  req.f = FunctionSpec::bump(Vec(0.2, -0.1), 1.1);
  req.g = FunctionSpec::bump(Vec(-0.15, 0.25), 0.9);
  req.x = Vec(0.1, 0.2);
  req.t1 = 0.8;
  req.t2 = 1.25;
  return req;
}

// root of s^a1 + s^a2 = 1 by bisection, independent of the library solver
double bisect_s_star(double a1, double a2) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::pow(mid, a1) + std::pow(mid, a2) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("bilinear") {

TEST_CASE("total surface measure matches closed forms") {
  // n=2, round case: the surface |y|^2 + |z|^2 = 1 in R^4 has measure 2 pi^2
  CHECK(std::abs(surface_mass(SliceGeometry(2, 2.0, 2.0)) - 2.0 * M_PI * M_PI) <=
        1e-6);
  // n=1: the unit circle in R^2
  CHECK(std::abs(surface_mass(SliceGeometry(1, 2.0, 2.0)) - 2.0 * M_PI) <= 1e-7);
  // n=3: the unit sphere in R^6 has measure pi^3
  CHECK(std::abs(surface_mass(SliceGeometry(3, 2.0, 2.0)) - M_PI * M_PI * M_PI) <=
        1e-5);
  // swapping the blocks reproduces the identical cached number
  SliceGeometry g(2, 2.0, 3.0);
  CHECK(surface_mass(g) == surface_mass(g.swapped()));
}

TEST_CASE("slice weight identities") {
  SliceGeometry g(2, 2.0, 3.0);
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(g.area_weight(r) ==
          doctest::Approx(std::sqrt(1.0 + sq(g.omega_prime(r)))).epsilon(1e-12));
    CHECK(g.slice_weight(r) ==
          doctest::Approx(g.area_weight(r) * g.omega(r)).epsilon(1e-12));
    // derivative against a central difference
    double h = 1e-6;
    double fd = (g.omega(r + h) - g.omega(r - h)) / (2.0 * h);
    CHECK(g.omega_prime(r) == doctest::Approx(fd).epsilon(1e-6));
    // the two omega routes agree where both are well conditioned
    CHECK(g.omega_from_gap(1.0 - r) == doctest::Approx(g.omega(r)).epsilon(1e-12));
  }
  // gap route survives gaps far below double resolution near 1
  double u = 1e-18;
  double w = g.omega_from_gap(u);
  CHECK(w == doctest::Approx(std::pow(2.0 * u, 1.0 / 3.0)).epsilon(1e-6));
  CHECK(g.slice_weight_from_gap(1e-3) ==
        doctest::Approx(g.slice_weight(1.0 - 1e-3)).epsilon(1e-9));
  CHECK(g.omega_tilde(g.omega(0.4)) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("both slicing directions produce the same number") {
  std::vector<std::pair<double, double>> as = {{2, 2}, {2, 3}, {1, 2}, {3, 3}};
  for (const auto& [a1, a2] : as) {
    AverageRequest req = smooth_request();
    req.geom = SliceGeometry(2, a1, a2);
    double gs = average_gsliced(req);
    double fs = average_fsliced(req);
    CHECK(gs > 0.0);
    CHECK(std::abs(gs - fs) <= 1e-6 * std::abs(gs));
  }
}

TEST_CASE("both slicing directions agree on indicator data") {
  AverageRequest req;
  req.geom = SliceGeometry(2, 2.0, 3.0);
  req.f = FunctionSpec::ball(Vec(0.2, 0.0), 0.8);
  req.g = FunctionSpec::ball(Vec(0.0, 0.3), 1.1);
  req.x = Vec(0.3, 0.4);
  req.t1 = 0.7;
  req.t2 = 1.3;
  req.sphere_resolution = 2048;
  double gs = average_gsliced(req);
  double fs = average_fsliced(req);
  CHECK(gs > 0.0);
  CHECK(std::abs(gs - fs) <= 1e-4 * std::abs(gs));
}

TEST_CASE("Monte-Carlo graph sampler confirms the sliced value") {
  AverageRequest req = smooth_request();
  req.normalized = false;
  double sliced = average_gsliced(req);
  MCEstimate mc = average_param_oracle(req, 300000, 17);
  CHECK(mc.se > 0.0);
  CHECK(std::abs(sliced - mc.value) <= 3.5 * mc.se);
}

TEST_CASE("normalized average of the constant pair is one") {
  for (auto [a1, a2] : std::vector<std::pair<double, double>>{{2, 2}, {2, 3}}) {
    AverageRequest req;
    req.geom = SliceGeometry(2, a1, a2);
    req.f = FunctionSpec::constant(1.0);
    req.g = FunctionSpec::constant(1.0);
    req.x = Vec(0.0, 0.0);
    // request quadrature and the cached mass use different meshes
    CHECK(average_gsliced(req) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("joint dilation moves the evaluation point and the dilations") {
  // averaging f(lambda .), g(lambda .) at x/lambda equals averaging f, g at
  // x with both dilations multiplied by lambda
  AverageRequest req = smooth_request();
  // keep the enlarged dilations inside the joint support of the data
  double lambda = 1.25;

  AverageRequest scaled = req;
  scaled.f = req.f.dilated(lambda);
  scaled.g = req.g.dilated(lambda);
  scaled.x = req.x * (1.0 / lambda);
  double moved = average_gsliced(scaled);

  AverageRequest expect = req;
  expect.t1 = lambda * req.t1;
  expect.t2 = lambda * req.t2;
  double target = average_gsliced(expect);
  CHECK(target > 0.0);
  CHECK(moved == doctest::Approx(target).epsilon(1e-11));
}

TEST_CASE("swapping blocks, functions and dilations leaves the value fixed") {
  AverageRequest req = smooth_request();
  req.normalized = false;
  AverageRequest swapped = req;
  swapped.geom = req.geom.swapped();
  swapped.f = req.g;
  swapped.g = req.f;
  swapped.t1 = req.t2;
  swapped.t2 = req.t1;
  CHECK(average_gsliced(swapped) ==
        doctest::Approx(average_gsliced(req)).epsilon(1e-9));
}

TEST_CASE("dyadic shells partition the average") {
  SliceGeometry g(2, 2.0, 2.0);
  auto [lo1, hi1] = dyadic_shell_bounds(g, 1);
  CHECK(lo1 == 0.0);
  CHECK(hi1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  auto [lo2, hi2] = dyadic_shell_bounds(g, 2);
  CHECK(lo2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(hi2 == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));

  AverageRequest req = smooth_request();
  req.normalized = false;
  double total = average_gsliced(req);
  double sum = 0.0;
  for (int k = 1; k <= 45; ++k) sum += average_dyadic_piece(req, k);
  CHECK(sum == doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("radial windows split the outer integral") {
  AverageRequest req = smooth_request();
  req.normalized = false;
  double total = average_gsliced(req);
  AverageRequest left = req, right = req;
  left.radial_window = {0.0, 0.55};
  right.radial_window = {0.55, 1.0};
  CHECK(average_gsliced(left) + average_gsliced(right) ==
        doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("unreachable tolerance raises the accuracy signal") {
  AverageRequest req;
  req.geom = SliceGeometry(2, 2.0, 3.0);
  req.f = FunctionSpec::ball(Vec(0.2, 0.0), 0.8);
  req.g = FunctionSpec::ball(Vec(0.0, 0.3), 1.1);
  req.x = Vec(0.3, 0.4);
  req.t1 = 0.7;
  req.t2 = 1.3;
  req.sphere_resolution = 48;
  req.tolerance = 1e-15;
  CHECK_THROWS_AS((void)average_gsliced(req), accuracy_error);
}

TEST_CASE("maximal field of the constant pair is flat") {
  MaximalRequest req;
  req.geom = SliceGeometry(2, 2.0, 3.0);
  req.f = FunctionSpec::constant(1.0);
  req.g = FunctionSpec::constant(1.0);
  req.out_grid = Grid::square(-1.0, 1.0, 3);
  req.refine = false;
  SampledField field = maximal_estimate(req);
  // flat up to the mismatch between the field mesh and the cached mass
  for (double v : field.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("diagonal sup never exceeds the biparameter sup") {
  MaximalRequest req;
  req.geom = SliceGeometry(2, 2.0, 2.0);
  req.f = FunctionSpec::bump(Vec(0.4, 0.0), 0.8);
  req.g = FunctionSpec::ball(Vec(0.0, -0.3), 0.9);
  req.out_grid = Grid::square(-1.0, 1.0, 5);
  req.t_ratio = std::sqrt(2.0);
  req.refine = false;
  req.mode = MaxMode::Diagonal;
  SampledField diag = maximal_estimate(req);
  req.mode = MaxMode::Biparam;
  SampledField full = maximal_estimate(req);
  REQUIRE(diag.values.size() == full.values.size());
  for (size_t i = 0; i < diag.values.size(); ++i)
    CHECK(diag.values[i] <= full.values[i] + 1e-14);
}

TEST_CASE("maximal fields grow monotonically with the inputs") {
  MaximalRequest small;
  small.geom = SliceGeometry(2, 2.0, 3.0);
  small.f = FunctionSpec::bump(Vec(0.2, 0.1), 1.0);
  small.g = FunctionSpec::ball(Vec(0.0, 0.0), 0.7);
  small.out_grid = Grid::square(-1.0, 1.0, 5);
  small.t_ratio = std::sqrt(2.0);
  small.refine = false;
  MaximalRequest big = small;
  big.g = FunctionSpec::ball(Vec(0.0, 0.0), 1.1);  // pointwise larger indicator
  SampledField lowf = maximal_estimate(small);
  SampledField highf = maximal_estimate(big);
  for (size_t i = 0; i < lowf.values.size(); ++i)
    CHECK(lowf.values[i] <= highf.values[i] + 1e-14);
}

TEST_CASE("norm ratio wiring") {
  FunctionSpec f = FunctionSpec::ball(Vec(0.0), 1.0);
  FunctionSpec g = FunctionSpec::ball(Vec(0.0), 1.0);
  Grid grid = Grid::line(0.0, 1.0, 11);
  SampledField ones{grid, std::vector<double>(11, 1.0)};
  // ||ones||_2 / (||f||_4 ||g||_4) with ||f||_4 = 2^(1/4) on the line
  double expect = std::sqrt(1.1) / std::sqrt(2.0);
  CHECK(norm_ratio(f, g, 4.0, 4.0, 2.0, ones) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS((void)norm_ratio(f, g, 4.0, 4.0, 3.0, ones), domain_error);
}

TEST_CASE("balanced root finder matches bisection") {
  for (auto [a1, a2] : std::vector<std::pair<double, double>>{
           {2, 2}, {2, 3}, {1, 2}, {3, 7}}) {
    CHECK(solve_s_star(a1, a2) ==
          doctest::Approx(bisect_s_star(a1, a2)).epsilon(1e-12));
  }
  CHECK(solve_s_star(2.0, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
}

TEST_CASE("concentrated data reproduces the pointwise blow-up rate") {
  SharpnessOptions opt;
  opt.tolerance = 0.25;
  SharpnessReport rep =
      sharpness_nec1(SliceGeometry(2, 2.0, 2.0), {0.125, 0.0625, 0.03125}, opt);
  CHECK(rep.s_star == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(rep.fit.predicted_slope == doctest::Approx(3.0));
  CHECK(rep.fit.pass);
  CHECK(std::abs(rep.fit.slope - 3.0) <= 0.25);
}

TEST_CASE("thin second-block slabs reproduce the mixed blow-up rate") {
  SharpnessOptions opt;
  opt.tolerance = 0.2;
  std::vector<double> deltas = {0.125, 0.0625, 0.03125};
  SharpnessReport rep = sharpness_nec2(SliceGeometry(2, 2.0, 6.0), deltas, false, opt);
  CHECK(rep.fit.predicted_slope == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(rep.fit.pass);

  // swapping the blocks probes the first exponent instead
  SharpnessReport mir = sharpness_nec2(SliceGeometry(2, 6.0, 2.0), deltas, true, opt);
  CHECK(mir.fit.predicted_slope == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(mir.fit.pass);
}

TEST_CASE("flat data defeats an endpoint bound while the mass still grows") {
  L1FailureReport rep =
      l1_failure_probe(SliceGeometry(2, 2.0, 2.0), {4.0, 8.0, 16.0, 32.0});
  CHECK(rep.pass);
  CHECK(rep.min_pointwise_ratio >= 0.05);
  CHECK(rep.fit.pass);
  for (size_t i = 1; i < rep.masses.size(); ++i)
    CHECK(rep.masses[i].second > rep.masses[i - 1].second);
  CHECK_THROWS_AS((void)l1_failure_probe(SliceGeometry(2, 2.0, 3.0), {4.0, 8.0, 16.0}),
                  domain_error);
}

}  // TEST_SUITE
