#pragma once

// Trilinear and quadrilinear averages over the product surfaces
// |y^1|^a1 + ... + |y^m|^am = 1 by pivot slicing: the pivot block is
// integrated over its sphere of radius nu = (1 - sum of the other
// |y^j|^aj)^(1/a_l), the remaining blocks are sampled by deterministic
// Monte Carlo over the unit-ball product, and the surface measure enters
// through the exact gradient-ratio weight
//   sqrt(sum_j a_j^2 |y^j|^(2 a_j - 2)) * nu^(n - a_l) / a_l,
// which at m = 2 is the bilinear engine's radial slice weight. Includes
// dyadic gap shells, discrete maximal fields, a tensor-quadrature oracle
// for m = 3, and the small-ball scaling experiment for the necessity
// exponent.

#include <cstdint>
#include <vector>

#include "maxlab/common.hpp"
#include "maxlab/fields.hpp"
#include "maxlab/fitting.hpp"

namespace maxlab::multilinear {

using fields::FunctionSpec;
using fields::Grid;
using fields::SampledField;

// (1 - t)_+^(1/a)
double nu(double a, double t);

// measure of the spherical cap {theta : |x - s*theta| <= R} on S^{n-1},
// for |x| = rho; closed form in n = 1, 2, 3
double cap_measure(int n, double rho, double s, double R);

struct MultiAverageRequest {
  int n = 2;
  std::vector<double> a;            // block exponents, one per factor
  std::vector<FunctionSpec> fs;     // factors f_1..f_m
  Vec x;
  std::vector<double> ts;           // dilations t_1..t_m
  // 1-based slicing pivot. Any choice gives the same value; the sample
  // variance stays finite only when the pivot exponent is below 2n, so
  // prefer a small exponent as the pivot.
  int pivot = 1;
  uint64_t samples = 1000000;
  uint64_t seed = 1;
  bool normalized = true;           // divide by the surface mass measured
                                    // from the same sample stream
  int sphere_resolution = 64;       // pivot-factor sphere rule
  double tolerance = 0.0;           // if > 0, required standard error
};

// Monte-Carlo estimate of the m-linear average; deterministic given seed
// (chunked reduction independent of thread count). Throws accuracy_error
// when tolerance > 0 and the standard error misses it.
MCEstimate multilinear_average(const MultiAverageRequest& req);

// same sampler restricted to the pivot gap shell
// 2^-k <= 1 - sum_{j != pivot} |y^j|^a_j < 2^(1-k)
MCEstimate multilinear_dyadic_piece(const MultiAverageRequest& req, int k);

// deterministic 2-D radial tensor quadrature of the same sliced form,
// m = 3 only; independent cross-check on the sampler
double trilinear_radial_oracle(const MultiAverageRequest& req,
                               int radial_depth = 30, int radial_cells = 48,
                               int nodes = 6);

struct MultiMaximalRequest {
  int n = 2;
  std::vector<double> a;
  std::vector<FunctionSpec> fs;
  Grid out_grid;
  int pivot = 1;
  double t_min = 0.5;
  double t_max = 2.0;
  double t_ratio = 1.189207115002721;  // 2^(1/4)
  bool full_sup = false;  // sup over the full t-grid product vs diagonal
  uint64_t samples = 20000;
  uint64_t seed = 1;
  int sphere_resolution = 32;
  bool normalized = true;
};

// discrete sup over the t grid (diagonal or full product) of the sampled
// average at each grid point; one sample stream per point, shared across
// the whole t grid
SampledField multilinear_maximal(const MultiMaximalRequest& req);

// sup over a geometric t grid of the normalized spherical average of f
double spherical_max(const FunctionSpec& f, const Vec& x, double t_min,
                     double t_max, double t_ratio, int resolution = 64);

double predicted_necessity_slope(int n, const std::vector<double>& a);

// Small-ball lower-bound scaling: f_1 an indicator of radius 4*delta,
// the other factors indicators of radius 4, t = |x| on 1 <= |x| <= 2,
// sampled over the product of balls |y^j| <= delta^(1/a_j) where the
// pivot cap stays nonempty; fits log value against log delta, predicted
// slope (n-1) + sum_{j>=2} n/a_j.
ScalingFit necessity_experiment(int n, const std::vector<double>& a,
                                const std::vector<double>& deltas,
                                uint64_t samples = 1000000, uint64_t seed = 1,
                                double tolerance = 0.3);

}  // namespace maxlab::multilinear
