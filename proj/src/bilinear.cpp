#include "maxlab/bilinear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace maxlab::bilinear {

namespace {

using fields::SpecKind;

constexpr double kTiny = 1e-300;
// rms residual (in log coordinates) above which a scaling fit is reported
// as inconclusive rather than pass/fail
constexpr double kFitResidualLimit = 0.5;

double sph_avg(const FunctionSpec& h, const Vec& x, double t,
               const SphereRule& rule) {
  if (x.n == 1) return h(Vec(x[0] - t)) + h(Vec(x[0] + t));
  return fields::spherical_average(h, x, t, rule);
}

Vec axis_point(int n, double rho) {
  Vec v = zero_vec(n);
  v[0] = rho;
  return v;
}

// radii about the member's own center where its spherical integral has
// kinks or support edges
std::vector<double> feature_radii(const FunctionSpec& s) {
  switch (s.kind) {
    case SpecKind::BallIndicator:
      return {s.radius};
    case SpecKind::SmoothBump:
      return {s.width};
    case SpecKind::LogPower:
      return {std::exp(-1.0)};
    case SpecKind::RadialProfile: {
      std::vector<double> out;
      if (s.profile.size() <= 16)
        for (const auto& kv : s.profile)
          if (kv.first > 0.0) out.push_back(kv.first);
      return out;
    }
    default:
      return {};
  }
}

Vec spec_center(const FunctionSpec& s, int n) {
  if (s.kind == SpecKind::BallIndicator || s.kind == SpecKind::SmoothBump)
    return s.center;
  return zero_vec(n);
}

// values of s at which s -> (spherical integral of h about x at radius s)
// loses smoothness
std::vector<double> argument_kinks(const FunctionSpec& h, const Vec& x) {
  std::vector<double> out;
  double d = (x - spec_center(h, x.n)).norm();
  for (double rho : feature_radii(h)) {
    out.push_back(std::abs(d - rho));
    out.push_back(d + rho);
  }
  return out;
}

CompositeMesh radial_mesh_for(const SliceGeometry& geom, const FunctionSpec& f,
                              const FunctionSpec& g, const Vec& x, double t1,
                              double t2,
                              const std::optional<std::pair<double, double>>& window,
                              bool auto_bp, int depth, int window_cells) {
  CompositeMesh mesh;
  if (window) {
    double lo = std::max(0.0, window->first);
    double hi = std::min(1.0, window->second);
    if (!(hi > lo)) return mesh;
    if (hi > 1.0 - 1e-9)
      mesh = graded_mesh(lo, hi, hi, std::min(depth, 40));
    else
      mesh = uniform_mesh(lo, hi, window_cells);
  } else {
    mesh = graded_mesh(0.0, 1.0, 1.0, depth);
    // mild grading toward 0 for fractional powers of r
    mesh.insert_breakpoints({0x1p-20, 0x1p-16, 0x1p-12, 0x1p-8, 0x1p-4});
  }
  if (auto_bp) {
    std::vector<double> bps;
    for (double s : argument_kinks(f, x)) bps.push_back(s / t1);
    for (double s : argument_kinks(g, x)) {
      double v = s / t2;
      if (v > 0.0 && v < 1.0) bps.push_back(geom.omega_tilde(v));
    }
    mesh.insert_breakpoints(bps);
    // indicator caps give root-type radial behavior at these points
    mesh.grade_at(bps, 8);
  }
  return mesh;
}

struct EvalParams {
  int radial_nodes;
  int radial_depth;
  int window_cells;
  int sphere_res;
};

// unnormalized surface integral, outer variable on the first block
double eval_sliced(const SliceGeometry& geom, const FunctionSpec& f,
                   const FunctionSpec& g, const Vec& x, double t1, double t2,
                   const std::optional<std::pair<double, double>>& window,
                   bool auto_bp, const EvalParams& p) {
  CompositeMesh mesh = radial_mesh_for(geom, f, g, x, t1, t2, window, auto_bp,
                                       p.radial_depth, p.window_cells);
  if (mesh.cells.empty()) return 0.0;
  SphereRule rule;
  if (geom.n >= 2) rule = fields::sphere_rule(geom.n, p.sphere_res);
  const int n = geom.n;
  return integrate(mesh, p.radial_nodes, [&](double r) {
    double u = 1.0 - r;
    if (u <= 0.0) return 0.0;
    double w = geom.slice_weight_from_gap(u);
    if (w == 0.0) return 0.0;
    double af = sph_avg(f, x, t1 * r, rule);
    if (af == 0.0) return 0.0;
    double ag = sph_avg(g, x, t2 * geom.omega_from_gap(u), rule);
    if (ag == 0.0) return 0.0;
    return std::pow(r, n - 1) * w * af * ag;
  });
}

void validate(const AverageRequest& req) {
  require(req.x.n == req.geom.n, "average: point dimension mismatch");
  require(req.t1 > 0.0 && req.t2 > 0.0,
          "average: dilation parameters must be positive");
  require(req.radial_nodes >= 2 && req.radial_nodes <= 32,
          "average: radial_nodes out of range (2..32)");
  require(req.radial_depth >= 4 && req.radial_depth <= 50,
          "average: radial_depth out of range (4..50)");
  require(req.window_cells >= 1 && req.window_cells <= 4096,
          "average: window_cells out of range");
  require(req.sphere_resolution >= 4, "average: sphere_resolution too small");
}

AverageRequest swapped_request(const AverageRequest& req) {
  AverageRequest s = req;
  s.geom = req.geom.swapped();
  s.f = req.g;
  s.g = req.f;
  s.t1 = req.t2;
  s.t2 = req.t1;
  return s;
}

// run a parallel loop whose body may throw; rethrow the first failure after
// the loop so exceptions never unwind through the worker threads
void parallel_for_checked(size_t count, const std::function<void(size_t)>& body) {
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  parallel_for_index(count, [&](size_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failed.exchange(true)) first = std::current_exception();
    }
  });
  if (failed) std::rethrow_exception(first);
}

}  // namespace

double solve_s_star(double a1, double a2) {
  require(a1 >= 1.0 && a2 >= 1.0, "solve_s_star: exponents must be >= 1");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    double mid = 0.5 * (lo + hi);
    double h = std::pow(mid, a1) + std::pow(mid, a2) - 1.0;
    (h < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SliceGeometry::SliceGeometry(int n_, double a1_, double a2_)
    : n(n_), a1(a1_), a2(a2_) {
  require(n >= 1 && n <= 3, "SliceGeometry: n must be 1, 2 or 3");
  require(a1 >= 1.0 && a2 >= 1.0, "SliceGeometry: exponents must be >= 1");
  require(std::isfinite(a1) && std::isfinite(a2),
          "SliceGeometry: exponents must be finite");
}

double SliceGeometry::omega_from_gap(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // 1 - (1-u)^a1 without cancellation
  double gap = -std::expm1(a1 * std::log1p(-u));
  return std::pow(gap, 1.0 / a2);
}

double SliceGeometry::omega(double r) const {
  require(r >= 0.0 && r <= 1.0, "omega: radius outside [0,1]");
  return omega_from_gap(1.0 - r);
}

double SliceGeometry::omega_tilde(double rho) const {
  return swapped().omega(rho);
}

double SliceGeometry::omega_prime(double r) const {
  require(r >= 0.0 && r <= 1.0, "omega_prime: radius outside [0,1]");
  double gap = -std::expm1(a1 * std::log1p(-(1.0 - r)));
  return -(a1 / a2) * std::pow(r, a1 - 1.0) *
         std::pow(gap, (1.0 - a2) / a2);
}

double SliceGeometry::area_weight(double r) const {
  double d = omega_prime(r);
  return std::sqrt(1.0 + d * d);
}

double SliceGeometry::slice_weight_from_gap(double u) const {
  if (u <= 0.0 || u > 1.0) return 0.0;
  double r = 1.0 - u;
  double w = omega_from_gap(u);
  double t1 = a1 * a1 * std::pow(r, 2.0 * (a1 - 1.0));
  double t2 = a2 * a2 * std::pow(w, 2.0 * (a2 - 1.0));
  return std::sqrt(t1 + t2) * std::pow(w, static_cast<double>(n) - a2) / a2;
}

double SliceGeometry::slice_weight(double r) const {
  require(r >= 0.0 && r <= 1.0, "slice_weight: radius outside [0,1]");
  return slice_weight_from_gap(1.0 - r);
}

double average_gsliced(const AverageRequest& req) {
  validate(req);
  EvalParams p{req.radial_nodes, req.radial_depth, req.window_cells,
               req.sphere_resolution};
  double val = eval_sliced(req.geom, req.f, req.g, req.x, req.t1, req.t2,
                           req.radial_window, req.auto_breakpoints, p);
  if (req.tolerance > 0.0) {
    bool converged = false;
    double diff = 0.0;
    for (int round = 0; round < 4; ++round) {
      p.radial_nodes = std::min(p.radial_nodes + 4, 32);
      p.radial_depth = std::min(p.radial_depth + 4, 50);
      p.window_cells = std::min(p.window_cells * 2, 4096);
      p.sphere_res *= 2;
      double next = eval_sliced(req.geom, req.f, req.g, req.x, req.t1, req.t2,
                                req.radial_window, req.auto_breakpoints, p);
      diff = std::abs(next - val);
      val = next;
      if (diff <= req.tolerance * std::max(std::abs(next), kTiny)) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw accuracy_error("average: quadrature did not reach tolerance", val,
                           diff);
  }
  if (req.normalized) val /= surface_mass(req.geom);
  return val;
}

double average_fsliced(const AverageRequest& req) {
  return average_gsliced(swapped_request(req));
}

MCEstimate average_param_oracle(const AverageRequest& req, uint64_t samples,
                                uint64_t seed) {
  validate(req);
  require(samples >= 1000, "average_param_oracle: need at least 1000 samples");
  const SliceGeometry geom = req.geom;
  const int n = geom.n;
  const double sm = sphere_measure(n);
  const double expo = geom.a2 / n;
  const double two_pi = 2.0 * 3.14159265358979323846;
  CounterRng rng(seed);

  double wlo = 0.0, whi = 1.0;
  if (req.radial_window) {
    wlo = std::max(0.0, req.radial_window->first);
    whi = std::min(1.0, req.radial_window->second);
  }

  auto direction = [&](uint64_t i, uint64_t lane) -> Vec {
    if (n == 1) return Vec(rng.uniform(i, lane) < 0.5 ? -1.0 : 1.0);
    if (n == 2) {
      double ang = two_pi * rng.uniform(i, lane);
      return Vec(std::cos(ang), std::sin(ang));
    }
    double z = 2.0 * rng.uniform(i, lane) - 1.0;
    double ang = two_pi * rng.uniform(i, lane + 1);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec(s * std::cos(ang), s * std::sin(ang), z);
  };

  // radial substitution u = v^(a2/n) flattens the edge weight, so the
  // sampled values stay bounded for every admissible anisotropy
  auto value = [&](uint64_t i) -> double {
    double v = 1.0 - rng.uniform(i, 0);  // in (0, 1]
    double u = std::pow(v, expo);        // 1 - r
    if (u < 1e-280) return 0.0;
    double r = 1.0 - u;
    if (r < wlo || r > whi) return 0.0;
    double jac = expo * u / v;
    Vec th = direction(i, 1);
    double fv = req.f(req.x - th * (req.t1 * r));
    if (fv == 0.0) return 0.0;
    Vec ph = direction(i, 3);
    double gv = req.g(req.x - ph * (req.t2 * geom.omega_from_gap(u)));
    if (gv == 0.0) return 0.0;
    return sm * sm * fv * gv * std::pow(r, n - 1) *
           geom.slice_weight_from_gap(u) * jac;
  };

  double s1 = chunked_sum(samples, 4096, [&](uint64_t lo, uint64_t hi) {
    double acc = 0.0;
    for (uint64_t i = lo; i < hi; ++i) acc += value(i);
    return acc;
  });
  double s2 = chunked_sum(samples, 4096, [&](uint64_t lo, uint64_t hi) {
    double acc = 0.0;
    for (uint64_t i = lo; i < hi; ++i) acc += sq(value(i));
    return acc;
  });

  double mean = s1 / static_cast<double>(samples);
  double var = std::max(0.0, s2 / static_cast<double>(samples) - mean * mean);
  MCEstimate est;
  est.value = mean;
  est.se = std::sqrt(var / static_cast<double>(samples > 1 ? samples - 1 : 1));
  est.samples = samples;
  return est;
}

namespace {

// half of the radial mass integral, graded toward the r = 0 end; the outer
// half of the full integral equals this on the swapped geometry
double mass_half(const SliceGeometry& geom, double s_star, int depth,
                 int nodes) {
  CompositeMesh mesh = graded_mesh(0.0, s_star, 0.0, depth);
  const int n = geom.n;
  return integrate(mesh, nodes, [&](double r) {
    return std::pow(r, n - 1) * geom.slice_weight(r);
  });
}

}  // namespace

double surface_mass(const SliceGeometry& geom, int radial_depth,
                    int radial_nodes) {
  require(radial_depth >= 8 && radial_depth <= 50,
          "surface_mass: radial_depth out of range (8..50)");
  require(radial_nodes >= 4 && radial_nodes <= 64,
          "surface_mass: radial_nodes out of range (4..64)");
  using Key = std::tuple<int, double, double, int, int>;
  static std::mutex mu;
  static std::map<Key, double> cache;
  Key key{geom.n, geom.a1, geom.a2, radial_depth, radial_nodes};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double s = solve_s_star(geom.a1, geom.a2);
  double sm = sphere_measure(geom.n);
  double val = sm * sm *
               (mass_half(geom, s, radial_depth, radial_nodes) +
                mass_half(geom.swapped(), s, radial_depth, radial_nodes));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, val);
  return val;
}

std::pair<double, double> dyadic_shell_bounds(const SliceGeometry& geom,
                                              int k) {
  require(k >= 1, "dyadic_shell_bounds: k must be >= 1");
  if (k >= 54) return {1.0, 1.0};
  double hi_gap = std::pow(2.0, 1 - k);  // upper bound on 1 - r^a1
  double lo_gap = std::pow(2.0, -k);
  double r_lo = k == 1 ? 0.0 : std::pow(1.0 - hi_gap, 1.0 / geom.a1);
  double r_hi = std::pow(1.0 - lo_gap, 1.0 / geom.a1);
  return {r_lo, r_hi};
}

double average_dyadic_piece(const AverageRequest& req, int k) {
  auto [lo, hi] = dyadic_shell_bounds(req.geom, k);
  if (!(lo < hi)) return 0.0;
  AverageRequest shell = req;
  if (req.radial_window) {
    lo = std::max(lo, req.radial_window->first);
    hi = std::min(hi, req.radial_window->second);
    if (!(lo < hi)) return 0.0;
  }
  shell.radial_window = {{lo, hi}};
  return average_gsliced(shell);
}

namespace {

struct RadialTable {
  std::vector<double> pts;
  std::vector<double> omega_pts;
  std::vector<double> wq;  // quadrature weight * r^(n-1) * slice weight
  SphereRule rule;
};

RadialTable build_table(const SliceGeometry& geom, const CompositeMesh& mesh,
                        int nodes, int sphere_res) {
  RadialTable t;
  std::vector<double> wts;
  mesh_points(mesh, nodes, t.pts, wts);
  t.omega_pts.resize(t.pts.size());
  t.wq.resize(t.pts.size());
  for (size_t j = 0; j < t.pts.size(); ++j) {
    double r = t.pts[j];
    double u = 1.0 - r;
    t.omega_pts[j] = geom.omega_from_gap(u);
    t.wq[j] = wts[j] * std::pow(r, geom.n - 1) *
              geom.slice_weight_from_gap(u);
  }
  if (geom.n >= 2) t.rule = fields::sphere_rule(geom.n, sphere_res);
  return t;
}

double sup_at_point(const FunctionSpec& f, const FunctionSpec& g, const Vec& x,
                    const std::vector<double>& t1s,
                    const std::vector<double>& t2s, MaxMode mode,
                    const RadialTable& tab) {
  const size_t R = tab.pts.size();
  const size_t T1 = t1s.size();
  const size_t T2 = t2s.size();
  std::vector<double> F(T1 * R), G(T2 * R);
  for (size_t i = 0; i < T1; ++i)
    for (size_t j = 0; j < R; ++j)
      F[i * R + j] = sph_avg(f, x, t1s[i] * tab.pts[j], tab.rule);
  for (size_t l = 0; l < T2; ++l)
    for (size_t j = 0; j < R; ++j)
      G[l * R + j] = sph_avg(g, x, t2s[l] * tab.omega_pts[j], tab.rule);

  double best = 0.0;
  auto contract = [&](size_t i, size_t l) {
    double acc = 0.0;
    const double* fi = &F[i * R];
    const double* gl = &G[l * R];
    for (size_t j = 0; j < R; ++j) acc += tab.wq[j] * fi[j] * gl[j];
    best = std::max(best, std::abs(acc));
  };
  if (mode == MaxMode::Diagonal) {
    for (size_t i = 0; i < T1; ++i) contract(i, i);
  } else {
    for (size_t i = 0; i < T1; ++i)
      for (size_t l = 0; l < T2; ++l) contract(i, l);
  }
  return best;
}

std::vector<double> midpoint_refine(const std::vector<double>& t) {
  std::vector<double> out;
  out.reserve(2 * t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    out.push_back(t[i]);
    if (i + 1 < t.size()) out.push_back(std::sqrt(t[i] * t[i + 1]));
  }
  return out;
}

}  // namespace

SampledField maximal_estimate(const MaximalRequest& req) {
  const SliceGeometry& geom = req.geom;
  require(req.out_grid.n == geom.n, "maximal: grid dimension mismatch");
  require(req.t_min > 0.0 && req.t_max >= req.t_min,
          "maximal: need 0 < t_min <= t_max");
  require(req.t_ratio > 1.0, "maximal: t_ratio must exceed 1");
  require(req.radial_nodes >= 2 && req.radial_nodes <= 32,
          "maximal: radial_nodes out of range");
  require(req.radial_depth >= 4 && req.radial_depth <= 50,
          "maximal: radial_depth out of range");
  require(req.sphere_resolution >= 4, "maximal: sphere_resolution too small");
  require(req.t2_override.empty() || req.mode == MaxMode::Biparam,
          "maximal: a separate second grid needs biparametric mode");
  for (double t : req.t2_override)
    require(t > 0.0, "maximal: second-grid values must be positive");

  SampledField out;
  out.grid = req.out_grid;
  out.values.assign(req.out_grid.size(), 0.0);

  std::optional<std::pair<double, double>> window;
  if (req.dyadic_shell > 0) {
    auto b = dyadic_shell_bounds(geom, req.dyadic_shell);
    if (!(b.first < b.second)) return out;
    window = b;
  }
  CompositeMesh mesh =
      radial_mesh_for(geom, req.f, req.g, zero_vec(geom.n), 1.0, 1.0, window,
                      false, req.radial_depth, 16);
  RadialTable tab =
      build_table(geom, mesh, req.radial_nodes, req.sphere_resolution);
  const double mass = req.normalized ? surface_mass(geom) : 1.0;

  std::vector<double> t1s =
      fields::geometric_sequence(req.t_min, req.t_max, req.t_ratio);

  auto compute = [&](const std::vector<double>& t1v,
                     const std::vector<double>& t2v, std::vector<double>& vals) {
    parallel_for_checked(out.grid.size(), [&](size_t idx) {
      Vec x = out.grid.point(idx);
      vals[idx] =
          sup_at_point(req.f, req.g, x, t1v, t2v, req.mode, tab) / mass;
    });
  };

  auto second_grid = [&](const std::vector<double>& t1v) {
    return req.t2_override.empty() ? t1v : req.t2_override;
  };

  compute(t1s, second_grid(t1s), out.values);
  if (req.refine) {
    for (int round = 0; round < req.max_refine_rounds; ++round) {
      if (2 * t1s.size() - 1 > req.t_node_cap) break;
      std::vector<double> t1r = midpoint_refine(t1s);
      std::vector<double> vals(out.values.size());
      compute(t1r, second_grid(t1r), vals);
      double peak = kTiny;
      for (double v : vals) peak = std::max(peak, std::abs(v));
      double change = 0.0;
      for (size_t i = 0; i < vals.size(); ++i)
        change = std::max(change, std::abs(vals[i] - out.values[i]));
      t1s = std::move(t1r);
      out.values = std::move(vals);
      if (change < req.refine_rel_change * peak) break;
    }
  }
  return out;
}

double norm_ratio(const FunctionSpec& f, const FunctionSpec& g, double p,
                  double q, double r, const SampledField& field) {
  require(p >= 1.0 && q >= 1.0, "norm_ratio: input exponents must be >= 1");
  require(r > 0.0, "norm_ratio: output exponent must be positive");
  auto recip = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
  require(std::abs(recip(r) - recip(p) - recip(q)) <= 1e-12,
          "norm_ratio: exponents must satisfy 1/r = 1/p + 1/q");

  double cell = field.grid.cell_volume();
  double acc = 0.0;
  for (double v : field.values) acc += std::pow(std::abs(v), r) * cell;
  double num = std::pow(acc, 1.0 / r);

  double den = fields::spec_lp_norm(f, p, field.grid.n) *
               fields::spec_lp_norm(g, q, field.grid.n);
  if (!(den > 0.0) || !std::isfinite(den))
    throw domain_error("norm_ratio: degenerate input norms");
  return num / den;
}

namespace {

void check_deltas(const std::vector<double>& deltas) {
  require(deltas.size() >= 1, "sharpness: need at least one delta");
  for (size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] >= 0x1p-10 && deltas[i] < 0.5,
            "sharpness: deltas must lie in [2^-10, 1/2)");
    if (i > 0)
      require(deltas[i] < deltas[i - 1], "sharpness: deltas must decrease");
  }
}

int cap_sphere_resolution(int n, double scale, double delta) {
  long res = std::lround(scale / delta);
  long cap = n == 3 ? 2048 : 32768;
  return static_cast<int>(std::clamp(res, 64l, cap));
}

ScalingFit checked_fit(const std::vector<std::pair<double, double>>& rows,
                       double predicted, double tolerance) {
  ScalingFit fit = fit_loglog(rows, predicted, tolerance);
  if (fit.residual > kFitResidualLimit) {
    std::ostringstream os;
    os << "sharpness: fit residual " << fit.residual
       << " too large for a conclusive rate (slope " << fit.slope << ")";
    throw fit_error(os.str());
  }
  return fit;
}

}  // namespace

SharpnessReport sharpness_nec1(const SliceGeometry& geom,
                               const std::vector<double>& deltas,
                               const SharpnessOptions& opt) {
  check_deltas(deltas);
  const int n = geom.n;
  double s = solve_s_star(geom.a1, geom.a2);
  double eps0 = opt.eps0 > 0.0 ? opt.eps0 : 0.5 * (1.0 - s);
  require(s + eps0 < 1.0, "sharpness: annulus must stay inside the unit ball");
  require(opt.radii >= 1, "sharpness: need at least one probe radius");

  SharpnessReport rep;
  rep.s_star = s;
  for (double d : deltas) {
    double rf = 2.0 * d / s;
    FunctionSpec f = FunctionSpec::ball(zero_vec(n), rf);
    FunctionSpec g = FunctionSpec::ball(zero_vec(n), opt.c1 * d);
    int res = cap_sphere_resolution(n, opt.sphere_scale, d);
    double low = 0.0;
    for (int i = 0; i < opt.radii; ++i) {
      double rho = s + eps0 * (i + 1) / (opt.radii + 1);
      double t = rho / s;
      AverageRequest req;
      req.geom = geom;
      req.f = f;
      req.g = g;
      req.x = axis_point(n, rho);
      req.t1 = req.t2 = t;
      req.sphere_resolution = res;
      req.radial_window = {{(rho - rf) / t, (rho + rf) / t}};
      double v = average_gsliced(req);
      low = i == 0 ? v : std::min(low, v);
    }
    rep.rows.push_back({d, low});
  }
  rep.fit = checked_fit(rep.rows, 2.0 * n - 1.0, opt.tolerance);
  return rep;
}

SharpnessReport sharpness_nec2(const SliceGeometry& geom0,
                               const std::vector<double>& deltas, bool mirrored,
                               const SharpnessOptions& opt) {
  check_deltas(deltas);
  const SliceGeometry geom = mirrored ? geom0.swapped() : geom0;
  const int n = geom.n;
  require(opt.radii >= 1, "sharpness: need at least one probe radius");
  double rate = n / geom.a2 + n - 1.0;

  SharpnessReport rep;
  rep.s_star = solve_s_star(geom.a1, geom.a2);
  for (double d : deltas) {
    double rf = opt.c_small * d;
    FunctionSpec f = FunctionSpec::ball(zero_vec(n), rf);
    FunctionSpec g = FunctionSpec::ball(zero_vec(n), 10.0);
    int res = cap_sphere_resolution(n, opt.sphere_scale, d);
    double low = 0.0;
    for (int i = 0; i < opt.radii; ++i) {
      double rho = 1.0 + (i + 1.0) / (opt.radii + 1.0);
      AverageRequest req;
      req.geom = geom;
      req.f = f;
      req.g = g;
      req.x = axis_point(n, rho);
      req.t1 = req.t2 = rho;
      req.sphere_resolution = res;
      // support of the inner factor in the outer (second block) variable
      double edge = 1.0 - rf / rho;
      double rho_max = edge <= 0.0 ? 1.0 : geom.omega(edge);
      req.radial_window = {{0.0, rho_max}};
      double v = average_fsliced(req);
      low = i == 0 ? v : std::min(low, v);
    }
    rep.rows.push_back({d, low});
  }
  rep.fit = checked_fit(rep.rows, rate, opt.tolerance);
  return rep;
}

L1FailureReport l1_failure_probe(const SliceGeometry& geom,
                                 const std::vector<double>& scales) {
  const int n = geom.n;
  require(geom.a1 <= n && geom.a2 <= n,
          "l1 probe: requires a1, a2 <= n");
  require(n <= 2, "l1 probe: cube masses implemented for n <= 2");
  require(scales.size() >= 3, "l1 probe: need at least three scales");
  for (size_t i = 0; i < scales.size(); ++i) {
    require(scales[i] >= 4.0, "l1 probe: scales must be >= 4");
    if (i > 0)
      require(scales[i] > scales[i - 1], "l1 probe: scales must increase");
  }

  const FunctionSpec f = FunctionSpec::ball(zero_vec(n), 1.0);
  const FunctionSpec g = FunctionSpec::constant(1.0);
  const double ratio6 = std::pow(2.0, 1.0 / 6.0);

  // diagonal maximal field at |x| = rho; the t sweep covers the dilations
  // whose sphere through x meets the unit ball
  auto field_at = [&](double rho) -> double {
    int res = static_cast<int>(
        std::clamp(std::lround(48.0 * std::max(1.0, rho)), 96l, 8192l));
    double tlo = std::max(0.05, 0.9 * (rho - 1.0));
    double thi = 2.5 * (rho + 1.0);
    double best = 0.0;
    for (double t : fields::geometric_sequence(tlo, thi, ratio6)) {
      double wlo = std::max(0.0, (rho - 1.0) / t);
      if (wlo >= 1.0) continue;
      AverageRequest req;
      req.geom = geom;
      req.f = f;
      req.g = g;
      req.x = axis_point(n, rho);
      req.t1 = req.t2 = t;
      req.sphere_resolution = res;
      req.radial_window = {{wlo, std::min(1.0, (rho + 1.0) / t)}};
      best = std::max(best, average_gsliced(req));
    }
    return best;
  };

  L1FailureReport rep;

  // pointwise domination over the centered maximal function on 1 <= |x| <= 2
  {
    SphereRule rule;
    if (n >= 2) rule = fields::sphere_rule(n, 512);
    double min_ratio = 0.0;
    for (int i = 0; i < 3; ++i) {
      double rho = 1.25 + 0.25 * i;
      double hl = 0.0;
      for (double rb : fields::geometric_sequence(0.5, 2.0 * (rho + 1.0), ratio6))
        hl = std::max(hl, fields::ball_average(f, axis_point(n, rho), rb, rule));
      double ratio = field_at(rho) / std::max(hl, kTiny);
      min_ratio = i == 0 ? ratio : std::min(min_ratio, ratio);
    }
    rep.min_pointwise_ratio = min_ratio;
  }

  // radial profile out to the far corner of the largest cube
  double reach = std::sqrt(static_cast<double>(n)) * scales.back() * 1.0001;
  std::vector<double> rho_nodes;
  rho_nodes.push_back(0.0);
  for (double rho : fields::geometric_sequence(0.125, reach * ratio6, ratio6))
    rho_nodes.push_back(rho);
  std::vector<double> profile(rho_nodes.size(), 0.0);
  parallel_for_checked(rho_nodes.size(), [&](size_t i) {
    profile[i] = rho_nodes[i] == 0.0 ? field_at(0.01) : field_at(rho_nodes[i]);
  });

  // log-linear interpolation of the profile
  auto interp = [&](double rho) -> double {
    auto it = std::upper_bound(rho_nodes.begin(), rho_nodes.end(), rho);
    size_t hi = std::min<size_t>(rho_nodes.size() - 1,
                                 static_cast<size_t>(it - rho_nodes.begin()));
    if (hi == 0) return profile[0];
    size_t lo = hi - 1;
    double pl = std::max(profile[lo], kTiny);
    double ph = std::max(profile[hi], kTiny);
    double span = rho_nodes[hi] - rho_nodes[lo];
    double s = span > 0.0 ? (rho - rho_nodes[lo]) / span : 0.0;
    return pl * std::pow(ph / pl, s);
  };

  // in-cube arc measure of the sphere of radius rho for the cube [-R,R]^n
  auto arc = [&](double rho, double R) -> double {
    if (rho <= R) return sphere_measure(n);
    if (n == 1) return 0.0;
    if (rho >= R * std::sqrt(2.0)) return 0.0;
    return 2.0 * 3.14159265358979323846 - 8.0 * std::acos(R / rho);
  };

  for (double R : scales) {
    CompositeMesh mesh;
    double top = n == 1 ? R : R * std::sqrt(2.0);
    for (size_t i = 0; i + 1 < rho_nodes.size() && rho_nodes[i] < top; ++i)
      mesh.cells.push_back({rho_nodes[i], std::min(rho_nodes[i + 1], top)});
    mesh.insert_breakpoints({R});
    double mass = integrate(mesh, 4, [&](double rho) {
      return arc(rho, R) * std::pow(rho, n - 1) * interp(rho);
    });
    rep.masses.push_back({R, mass});
  }

  std::vector<std::pair<double, double>> pts;
  for (auto& m : rep.masses) pts.push_back({std::log(m.first), m.second});
  rep.fit = fit_linear(pts, 0.0, 0.0, FitComparison::AtLeast);
  rep.pass = rep.fit.pass && rep.fit.slope > 0.0 &&
             rep.fit.residual <= 0.1 * rep.fit.slope &&
             rep.min_pointwise_ratio >= 0.05;
  return rep;
}

}  // namespace maxlab::bilinear
