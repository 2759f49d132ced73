#pragma once

// Input function catalogue, grids and sampled fields, sphere quadrature,
// spherical averages, Riemann-sum norms, and a centered maximal-function
// comparator. Supported ambient dimensions: 1, 2, 3 (sphere rules: 2, 3).

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "maxlab/common.hpp"

namespace maxlab::fields {

enum class SpecKind { Constant, BallIndicator, SmoothBump, LogPower, RadialProfile };

// Closed under the evaluations the engines need; every member is radial
// about `center` except Constant. LogPower is |x|^-beta * log(1/|x|)^-gamma
// on |x| < 1/e and zero outside, with values frozen below eps_floor.
struct FunctionSpec {
  SpecKind kind = SpecKind::Constant;
  double value = 1.0;                     // Constant
  Vec center;                             // BallIndicator, SmoothBump
  double radius = 1.0;                    // BallIndicator
  double width = 1.0;                     // SmoothBump
  double beta = 0.0, gamma = 0.0;         // LogPower
  std::vector<std::pair<double, double>> profile;  // RadialProfile knots (r, v)

  static constexpr double eps_floor = 1e-9;

  static FunctionSpec constant(double c);
  static FunctionSpec ball(Vec center, double radius);
  static FunctionSpec bump(Vec center, double width);
  static FunctionSpec log_power(double beta, double gamma);
  static FunctionSpec radial_profile(std::vector<std::pair<double, double>> knots);

  double operator()(const Vec& x) const;

  // f(lambda * .) for catalogue members closed under dilation
  FunctionSpec dilated(double lambda) const;

  // radius of a ball about `center` containing the support, if compact
  std::optional<double> support_radius() const;
};

struct Grid {
  int n = 0;
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
  std::array<int, 3> count{1, 1, 1};

  static Grid line(double lo, double hi, int count);
  static Grid square(double lo, double hi, int count);
  static Grid cube(double lo, double hi, int count);

  double spacing(int axis) const;
  double cell_volume() const;
  size_t size() const;
  Vec point(size_t flat) const;
};

struct SampledField {
  Grid grid;
  std::vector<double> values;
};

void write_csv(const SampledField& f, std::ostream& os);
SampledField sample(const FunctionSpec& f, const Grid& grid);

struct SphereRule {
  int n = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;  // sum to |S^{n-1}|
};

// n = 2: `resolution` equispaced angles starting at 0, weight 2*pi/res.
// n = 3: product rule, `resolution` azimuths x Gauss nodes in cos(theta).
SphereRule sphere_rule(int n, int resolution);

// unnormalized: integral of g(x - t*theta) over the unit sphere
double spherical_average(const FunctionSpec& g, const Vec& x, double t,
                         const SphereRule& rule);

// Riemann sum norm (sum |v|^p * h^n)^(1/p); p = inf -> max |v|
double lp_norm(const SampledField& f, double p);

// L^p norm of a catalogue member over R^n by graded quadrature / closed
// form. LogPower requires beta*p < n, or beta*p == n with gamma*p > 1.
double spec_lp_norm(const FunctionSpec& f, double p, int n);

// centered maximal comparator: max over radii of the ball average of f
SampledField hl_max(const FunctionSpec& f, const Grid& grid,
                    const std::vector<double>& radii, int sphere_resolution = 64);

double ball_average(const FunctionSpec& f, const Vec& x, double r,
                    const SphereRule& rule, int radial_nodes = 8);

std::vector<double> geometric_sequence(double lo, double hi, double ratio);

}  // namespace maxlab::fields
