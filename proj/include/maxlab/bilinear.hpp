#pragma once

// Bilinear averages over the surface |y|^a1 + |z|^a2 = 1 in R^n x R^n and
// the associated maximal fields and sharpness experiments.
//
// Writing w(r) = (1 - r^a1)^(1/a2), the surface integral of
// f(x - t1 y) g(x - t2 z) reduces to the radial form
//
//   int_0^1 r^(n-1) * S(r) * Af(x, t1 r) * Ag(x, t2 w(r)) dr,
//   S(r) = sqrt(a1^2 r^(2a1-2) + a2^2 w(r)^(2a2-2)) * w(r)^(n-a2) / a2,
//
// where Af, Ag are unnormalized spherical averages. S(r) * w(r)^(a2-n)
// equals sqrt(1 + w'(r)^2), so the same value is also the graph-area
// integral used by the Monte-Carlo oracle, and swapping the roles of the
// two blocks (outer variable z, weight built from a2 first) gives a second
// independent evaluation path for the identical number.

#include <optional>
#include <utility>

#include "maxlab/fields.hpp"
#include "maxlab/fitting.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab::bilinear {

using fields::FunctionSpec;
using fields::Grid;
using fields::SampledField;
using fields::SphereRule;

// unique root of s^a1 + s^a2 = 1 in (0, 1)
double solve_s_star(double a1, double a2);

struct SliceGeometry {
  int n = 2;
  double a1 = 2.0;
  double a2 = 2.0;

  SliceGeometry() = default;
  SliceGeometry(int n_, double a1_, double a2_);

  double omega(double r) const;        // (1 - r^a1)^(1/a2)
  double omega_tilde(double rho) const;  // (1 - rho^a2)^(1/a1)
  double omega_prime(double r) const;

  // graph-area weight sqrt(1 + w'(r)^2)
  double area_weight(double r) const;

  // S(r) = area_weight(r) * w(r)^(n-1) evaluated in cancellation-safe form
  double slice_weight(double r) const;

  // forms taking u = 1 - r directly; stable when u is far below the spacing
  // of doubles near 1, where forming r first would round the gap away
  double omega_from_gap(double u) const;
  double slice_weight_from_gap(double u) const;

  SliceGeometry swapped() const { return SliceGeometry(n, a2, a1); }
};

struct AverageRequest {
  SliceGeometry geom;
  FunctionSpec f;
  FunctionSpec g;
  Vec x;
  double t1 = 1.0;
  double t2 = 1.0;

  int radial_nodes = 8;       // Gauss nodes per radial cell
  int radial_depth = 40;      // dyadic grading levels toward the slice edge (4..50)
  int window_cells = 16;      // cells when a radial window is given
  int sphere_resolution = 96;
  bool normalized = true;
  bool auto_breakpoints = true;

  // Restrict the outer radial integral to this interval (intersected with
  // [0,1]). Used by lower-bound experiments whose integrand vanishes
  // outside a known window.
  std::optional<std::pair<double, double>> radial_window;

  // When positive, the evaluation refines until two successive resolutions
  // agree to this relative tolerance, else throws accuracy_error.
  double tolerance = 0.0;
};

// outer variable runs over the first block (y); inner spherical average of g
double average_gsliced(const AverageRequest& req);
// outer variable runs over the second block (z); same value, independent path
double average_fsliced(const AverageRequest& req);

// Monte-Carlo estimate of the same unnormalized surface integral via the
// graph parametrization, with a boundary-flattening substitution so the
// weight stays bounded. Deterministic for a fixed seed.
MCEstimate average_param_oracle(const AverageRequest& req, uint64_t samples,
                                uint64_t seed);

// Total surface measure, cached per (n, a1, a2, depth, nodes). Computed by
// splitting the radial integral at s_star and mapping the outer half onto
// the swapped geometry, so no quadrature cell touches the slice edge.
double surface_mass(const SliceGeometry& geom, int radial_depth = 36,
                    int radial_nodes = 16);

// radial interval where 2^-k <= 1 - r^a1 <= 2^(1-k); empty (lo == hi) once
// the shell falls below the resolution of doubles near 1
std::pair<double, double> dyadic_shell_bounds(const SliceGeometry& geom, int k);

// contribution of the dyadic shell 2^-k <= 1 - |y|^a1 <= 2^(1-k)
double average_dyadic_piece(const AverageRequest& req, int k);

enum class MaxMode { Diagonal, Biparam };

struct MaximalRequest {
  SliceGeometry geom;
  FunctionSpec f;
  FunctionSpec g;
  Grid out_grid;
  double t_min = 0.25;
  double t_max = 4.0;
  double t_ratio = 1.0905077326652577;  // 2^(1/8)
  std::vector<double> t2_override;      // optional separate second grid
  MaxMode mode = MaxMode::Diagonal;

  int radial_nodes = 5;
  int radial_depth = 32;
  int sphere_resolution = 64;
  bool normalized = true;
  int dyadic_shell = 0;  // when > 0, restrict to that shell

  bool refine = true;            // densify the t grid until the field settles
  double refine_rel_change = 0.005;
  int max_refine_rounds = 4;
  size_t t_node_cap = 1024;
};

// Discrete sup over the t grid of |average|; a lower bound of the true sup,
// nondecreasing under t-grid refinement. Parallel over grid points with
// thread-count-independent results.
SampledField maximal_estimate(const MaximalRequest& req);

// ||field||_r / (||f||_p ||g||_q) with the input norms in closed/graded
// form; requires 1/r = 1/p + 1/q within 1e-12.
double norm_ratio(const FunctionSpec& f, const FunctionSpec& g, double p, double q,
                  double r, const SampledField& field);

struct SharpnessReport {
  std::vector<std::pair<double, double>> rows;  // (delta, measured value)
  ScalingFit fit;
  double s_star = 0.0;
};

struct SharpnessOptions {
  double c1 = 4.0;       // concentric-route ball radius multiplier
  double c_small = 4.0;  // thin-slab-route ball radius multiplier
  double eps0 = 0.0;     // annulus thickness; 0 -> (1 - s_star) / 2
  int radii = 3;
  double tolerance = 0.2;
  int sphere_scale = 128;  // sphere resolution ~ sphere_scale / delta
};

// Concentric construction: f and g are delta-balls at the origin, the
// average is evaluated at t = |x| / s_star on the annulus just outside
// radius s_star; the measured pointwise value scales like delta^(2n-1).
SharpnessReport sharpness_nec1(const SliceGeometry& geom,
                               const std::vector<double>& deltas,
                               const SharpnessOptions& opt = {});

// Thin-slab construction: the second-block radial window is |z|^a2 <= delta
// and the value on 1 <= |x| <= 2 scales like delta^(n/a2 + n - 1).
// mirrored = true swaps the roles of the blocks (rate n/a1 + n - 1).
SharpnessReport sharpness_nec2(const SliceGeometry& geom,
                               const std::vector<double>& deltas, bool mirrored,
                               const SharpnessOptions& opt = {});

struct L1FailureReport {
  double min_pointwise_ratio = 0.0;  // field / centered maximal on 1<=|x|<=2
  std::vector<std::pair<double, double>> masses;  // (R, L1 mass on [-R,R]^n)
  ScalingFit fit;  // mass versus log R
  bool pass = false;
};

// With g = 1 and f a unit-ball indicator the maximal field dominates a
// multiple of the centered maximal function of f, so its L1 mass over
// [-R,R]^n grows like log R. The field is radial; cube masses come from its
// radial profile with exact in-cube arc measures, implemented for n <= 2.
// Requires a1, a2 <= n and at least three increasing scales.
L1FailureReport l1_failure_probe(const SliceGeometry& geom,
                                 const std::vector<double>& scales);

}  // namespace maxlab::bilinear
