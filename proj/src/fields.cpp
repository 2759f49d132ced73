#include "maxlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "maxlab/quadrature.hpp"

namespace maxlab::fields {

namespace {
const double kPi = 3.14159265358979323846;
}

FunctionSpec FunctionSpec::constant(double c) {
  FunctionSpec f;
  f.kind = SpecKind::Constant;
  f.value = c;
  return f;
}

FunctionSpec FunctionSpec::ball(Vec center, double radius) {
  require(radius > 0.0, "FunctionSpec::ball: radius must be positive");
  FunctionSpec f;
  f.kind = SpecKind::BallIndicator;
  f.center = center;
  f.radius = radius;
  return f;
}

FunctionSpec FunctionSpec::bump(Vec center, double width) {
  require(width > 0.0, "FunctionSpec::bump: width must be positive");
  FunctionSpec f;
  f.kind = SpecKind::SmoothBump;
  f.center = center;
  f.width = width;
  return f;
}

FunctionSpec FunctionSpec::log_power(double beta, double gamma) {
  require(beta >= 0.0 && gamma >= 0.0, "FunctionSpec::log_power: parameters must be >= 0");
  FunctionSpec f;
  f.kind = SpecKind::LogPower;
  f.beta = beta;
  f.gamma = gamma;
  return f;
}

FunctionSpec FunctionSpec::radial_profile(std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, "FunctionSpec::radial_profile: need at least two knots");
  for (size_t i = 1; i < knots.size(); ++i)
    require(knots[i].first > knots[i - 1].first,
            "FunctionSpec::radial_profile: radii must increase");
  require(knots.front().first >= 0.0, "FunctionSpec::radial_profile: radii must be >= 0");
  FunctionSpec f;
  f.kind = SpecKind::RadialProfile;
  f.profile = std::move(knots);
  return f;
}

double FunctionSpec::operator()(const Vec& x) const {
  switch (kind) {
    case SpecKind::Constant:
      return value;
    case SpecKind::BallIndicator:
      return (x - center).norm2() <= radius * radius ? 1.0 : 0.0;
    case SpecKind::SmoothBump: {
      double u2 = (x - center).norm2() / (width * width);
      if (u2 >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - u2));
    }
    case SpecKind::LogPower: {
      double r = x.norm();
      if (r >= 1.0 / std::exp(1.0)) return 0.0;
      if (r < eps_floor) r = eps_floor;
      double lg = std::log(1.0 / r);
      return std::pow(r, -beta) * std::pow(lg, -gamma);
    }
    case SpecKind::RadialProfile: {
      double r = x.norm();
      if (r <= profile.front().first) return profile.front().second;
      if (r >= profile.back().first) return profile.back().second;
      auto it = std::upper_bound(profile.begin(), profile.end(), r,
                                 [](double v, const std::pair<double, double>& k) {
                                   return v < k.first;
                                 });
      auto [r1, v1] = *it;
      auto [r0, v0] = *(it - 1);
      double t = (r - r0) / (r1 - r0);
      return v0 + t * (v1 - v0);
    }
  }
  return 0.0;
}

FunctionSpec FunctionSpec::dilated(double lambda) const {
  require(lambda > 0.0, "FunctionSpec::dilated: lambda must be positive");
  FunctionSpec f = *this;
  switch (kind) {
    case SpecKind::Constant:
      return f;
    case SpecKind::BallIndicator:
      f.center = center * (1.0 / lambda);
      f.radius = radius / lambda;
      return f;
    case SpecKind::SmoothBump:
      f.center = center * (1.0 / lambda);
      f.width = width / lambda;
      return f;
    default:
      throw domain_error("FunctionSpec::dilated: member not closed under dilation");
  }
}

std::optional<double> FunctionSpec::support_radius() const {
  switch (kind) {
    case SpecKind::BallIndicator:
      return radius;
    case SpecKind::SmoothBump:
      return width;
    case SpecKind::LogPower:
      return 1.0 / std::exp(1.0);
    case SpecKind::RadialProfile:
      return profile.back().second == 0.0 ? std::optional<double>(profile.back().first)
                                          : std::nullopt;
    default:
      return std::nullopt;
  }
}

Grid Grid::line(double lo, double hi, int count) {
  require(hi > lo && count >= 2, "Grid::line: need hi > lo and count >= 2");
  Grid g;
  g.n = 1;
  g.lo[0] = lo;
  g.hi[0] = hi;
  g.count[0] = count;
  return g;
}

Grid Grid::square(double lo, double hi, int count) {
  require(hi > lo && count >= 2, "Grid::square: need hi > lo and count >= 2");
  Grid g;
  g.n = 2;
  for (int i = 0; i < 2; ++i) {
    g.lo[static_cast<size_t>(i)] = lo;
    g.hi[static_cast<size_t>(i)] = hi;
    g.count[static_cast<size_t>(i)] = count;
  }
  return g;
}

Grid Grid::cube(double lo, double hi, int count) {
  require(hi > lo && count >= 2, "Grid::cube: need hi > lo and count >= 2");
  Grid g;
  g.n = 3;
  for (int i = 0; i < 3; ++i) {
    g.lo[static_cast<size_t>(i)] = lo;
    g.hi[static_cast<size_t>(i)] = hi;
    g.count[static_cast<size_t>(i)] = count;
  }
  return g;
}

double Grid::spacing(int axis) const {
  require(axis >= 0 && axis < n, "Grid::spacing: bad axis");
  size_t a = static_cast<size_t>(axis);
  return (hi[a] - lo[a]) / (count[a] - 1);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= spacing(i);
  return v;
}

size_t Grid::size() const {
  size_t s = 1;
  for (int i = 0; i < n; ++i) s *= static_cast<size_t>(count[static_cast<size_t>(i)]);
  return s;
}

Vec Grid::point(size_t flat) const {
  Vec p = zero_vec(n);
  size_t rem = flat;
  for (int i = n - 1; i >= 0; --i) {
    size_t a = static_cast<size_t>(i);
    size_t ci = static_cast<size_t>(count[a]);
    size_t idx = rem % ci;
    rem /= ci;
    p[i] = lo[a] + spacing(i) * static_cast<double>(idx);
  }
  return p;
}

void write_csv(const SampledField& f, std::ostream& os) {
  static const char* headers[3] = {"x,value", "x,y,value", "x,y,z,value"};
  os << headers[f.grid.n - 1] << "\n";
  for (size_t i = 0; i < f.values.size(); ++i) {
    Vec p = f.grid.point(i);
    for (int d = 0; d < f.grid.n; ++d) os << format_double(p[d]) << ",";
    os << format_double(f.values[i]) << "\n";
  }
}

SampledField sample(const FunctionSpec& f, const Grid& grid) {
  SampledField s;
  s.grid = grid;
  s.values.resize(grid.size());
  for (size_t i = 0; i < s.values.size(); ++i) s.values[i] = f(grid.point(i));
  return s;
}

SphereRule sphere_rule(int n, int resolution) {
  require(n == 2 || n == 3, "sphere_rule: n must be 2 or 3");
  require(resolution >= 4, "sphere_rule: resolution must be >= 4");
  SphereRule rule;
  rule.n = n;
  if (n == 2) {
    rule.nodes.reserve(static_cast<size_t>(resolution));
    double w = 2.0 * kPi / resolution;
    for (int j = 0; j < resolution; ++j) {
      double th = 2.0 * kPi * j / resolution;
      rule.nodes.push_back(Vec(std::cos(th), std::sin(th)));
      rule.weights.push_back(w);
    }
  } else {
    int npolar = std::max(4, resolution / 2);
    const GaussRule& g = gauss_legendre(npolar);
    double waz = 2.0 * kPi / resolution;
    for (int jp = 0; jp < npolar; ++jp) {
      double u = g.nodes[static_cast<size_t>(jp)];  // cos(theta)
      double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int ja = 0; ja < resolution; ++ja) {
        double phi = 2.0 * kPi * ja / resolution;
        rule.nodes.push_back(Vec(s * std::cos(phi), s * std::sin(phi), u));
        rule.weights.push_back(waz * g.weights[static_cast<size_t>(jp)]);
      }
    }
  }
  return rule;
}

double spherical_average(const FunctionSpec& g, const Vec& x, double t,
                         const SphereRule& rule) {
  require(t >= 0.0, "spherical_average: t must be >= 0");
  require(x.n == rule.n, "spherical_average: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * g(x - rule.nodes[i] * t);
  return s;
}

double lp_norm(const SampledField& f, double p) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double vol = f.grid.cell_volume();
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * vol, 1.0 / p);
}

namespace {

// sphere-measure factor times the radial integral of r^{n-1} |f(r)|^p
double radial_power_integral(const std::function<double(double)>& fr, double p, int n,
                             double lo, double hi, bool grade_origin) {
  CompositeMesh mesh;
  if (grade_origin && lo == 0.0) {
    mesh = graded_mesh(0.0, hi, 0.0, 48);
  } else if (grade_origin && lo > 0.0) {
    mesh = geometric_mesh(lo, hi, 1.25);
  } else {
    mesh = uniform_mesh(lo, hi, 64);
  }
  double val = integrate(mesh, 10, [&](double r) {
    return std::pow(r, n - 1) * std::pow(std::abs(fr(r)), p);
  });
  return val;
}

}  // namespace

double spec_lp_norm(const FunctionSpec& f, double p, int n) {
  require(p >= 1.0, "spec_lp_norm: p must be >= 1");
  require(n >= 1 && n <= 3, "spec_lp_norm: n must be 1, 2 or 3");
  if (std::isinf(p)) {
    switch (f.kind) {
      case SpecKind::Constant:
        return std::abs(f.value);
      case SpecKind::BallIndicator:
        return 1.0;
      case SpecKind::SmoothBump:
        return 1.0;
      case SpecKind::LogPower: {
        Vec x = zero_vec(n);
        x[0] = FunctionSpec::eps_floor;
        return f(x);
      }
      case SpecKind::RadialProfile: {
        double m = 0.0;
        for (auto& [r, v] : f.profile) m = std::max(m, std::abs(v));
        return m;
      }
    }
  }
  switch (f.kind) {
    case SpecKind::Constant:
      if (f.value == 0.0) return 0.0;
      throw domain_error("spec_lp_norm: nonzero constant has infinite L^p mass");
    case SpecKind::BallIndicator:
      return std::pow(ball_volume(n) * std::pow(f.radius, n), 1.0 / p);
    case SpecKind::SmoothBump: {
      double val = radial_power_integral(
          [&](double r) {
            double u2 = r * r / (f.width * f.width);
            return u2 >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u2));
          },
          p, n, 0.0, f.width, false);
      return std::pow(val * sphere_measure(n), 1.0 / p);
    }
    case SpecKind::LogPower: {
      bool ok = f.beta * p < n || (f.beta * p == n && f.gamma * p > 1.0);
      if (!ok) throw domain_error("spec_lp_norm: log-power member has infinite L^p mass");
      double r_edge = 1.0 / std::exp(1.0);
      // frozen plateau below eps_floor, graded quadrature above it
      double plateau = std::pow(FunctionSpec::eps_floor, -f.beta) *
                       std::pow(std::log(1.0 / FunctionSpec::eps_floor), -f.gamma);
      double head = std::pow(plateau, p) * std::pow(FunctionSpec::eps_floor, n) / n;
      double body = radial_power_integral(
          [&](double r) {
            return std::pow(r, -f.beta) * std::pow(std::log(1.0 / r), -f.gamma);
          },
          p, n, FunctionSpec::eps_floor, r_edge, true);
      return std::pow((head + body) * sphere_measure(n), 1.0 / p);
    }
    case SpecKind::RadialProfile: {
      double val = 0.0;
      for (size_t i = 1; i < f.profile.size(); ++i) {
        double lo = f.profile[i - 1].first, hi = f.profile[i].first;
        if (hi <= lo) continue;
        CompositeMesh mesh = uniform_mesh(lo, hi, 8);
        val += integrate(mesh, 8, [&](double r) {
          Vec x = zero_vec(n);
          x[0] = r;
          return std::pow(r, n - 1) * std::pow(std::abs(f(x)), p);
        });
      }
      return std::pow(val * sphere_measure(n), 1.0 / p);
    }
  }
  return 0.0;
}

double ball_average(const FunctionSpec& f, const Vec& x, double r,
                    const SphereRule& rule, int radial_nodes) {
  require(r > 0.0, "ball_average: radius must be positive");
  int n = x.n;
  CompositeMesh mesh = uniform_mesh(0.0, r, 4);
  double val;
  if (n == 1) {
    val = integrate(mesh, radial_nodes, [&](double rho) {
      return f(Vec(x[0] - rho)) + f(Vec(x[0] + rho));
    });
  } else {
    require(rule.n == n, "ball_average: rule dimension mismatch");
    val = integrate(mesh, radial_nodes, [&](double rho) {
      return std::pow(rho, n - 1) * spherical_average(f, x, rho, rule);
    });
  }
  double ball_mass = sphere_measure(n) * std::pow(r, n) / n;
  return val / ball_mass;
}

SampledField hl_max(const FunctionSpec& f, const Grid& grid,
                    const std::vector<double>& radii, int sphere_resolution) {
  require(!radii.empty(), "hl_max: need at least one radius");
  for (double r : radii) require(r > 0.0, "hl_max: radii must be positive");
  std::vector<double> rs = radii;
  std::sort(rs.begin(), rs.end());

  SphereRule rule;
  if (grid.n >= 2) rule = sphere_rule(grid.n, sphere_resolution);
  const GaussRule& g = gauss_legendre(6);
  int n = grid.n;

  SampledField out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  parallel_for_index(grid.size(), [&](size_t i) {
    Vec x = grid.point(i);
    // cumulative integral of rho^{n-1} * (sphere integral) over increasing radii
    double cum = 0.0;
    double prev = 0.0;
    double best = 0.0;
    for (double r : rs) {
      double mid = 0.5 * (prev + r), hw = 0.5 * (r - prev);
      double seg = 0.0;
      for (size_t k = 0; k < g.nodes.size(); ++k) {
        double rho = mid + hw * g.nodes[k];
        double shell = n == 1 ? f(Vec(x[0] - rho)) + f(Vec(x[0] + rho))
                              : std::pow(rho, n - 1) * spherical_average(f, x, rho, rule);
        seg += g.weights[k] * shell;
      }
      cum += seg * hw;
      double ball_mass = sphere_measure(n) * std::pow(r, n) / n;
      best = std::max(best, cum / ball_mass);
      prev = r;
    }
    out.values[i] = best;
  });
  return out;
}

std::vector<double> geometric_sequence(double lo, double hi, double ratio) {
  require(lo > 0.0 && hi >= lo, "geometric_sequence: need 0 < lo <= hi");
  require(ratio > 1.0, "geometric_sequence: ratio must exceed 1");
  std::vector<double> out;
  for (double t = lo; t <= hi * (1.0 + 1e-12); t *= ratio) {
    out.push_back(t);
    if (out.size() > 100000) throw domain_error("geometric_sequence: too many terms");
  }
  return out;
}

}  // namespace maxlab::fields
