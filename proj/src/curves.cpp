#include "maxlab/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxlab/common.hpp"

namespace maxlab::curves {

namespace {

double binom(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// q(s - s0) expanded in powers of s
std::vector<double> poly_shift(const std::vector<double>& q, double s0) {
  std::vector<double> out(q.size(), 0.0);
  for (size_t k = 0; k < q.size(); ++k) {
    double pw = 1.0;
    for (size_t j = 0; j <= k; ++j) {
      // coefficient of s^{k-j} in (s - s0)^k, walked from the top power down
      out[k - j] += q[k] * binom(static_cast<int>(k), static_cast<int>(j)) * pw;
      pw *= -s0;
    }
  }
  return out;
}

double horner(const std::vector<double>& coeffs, double s) {
  double v = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) v = v * s + coeffs[i];
  return v;
}

// k-th central difference of width h (half-integer offsets for odd k)
double central_diff(const std::function<double(double)>& fn, double s, int k,
                    double h) {
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    double off = (0.5 * k - j) * h;
    double c = binom(k, j);
    acc += (j % 2 == 0 ? c : -c) * fn(s + off);
  }
  return acc / std::pow(h, k);
}

// values of the argument at which a catalogue member is not smooth
std::vector<double> kink_arguments(const fields::FunctionSpec& spec) {
  using fields::SpecKind;
  double c = spec.center.n > 0 ? spec.center[0] : 0.0;
  switch (spec.kind) {
    case SpecKind::Constant:
      return {};
    case SpecKind::BallIndicator:
      return {c - spec.radius, c + spec.radius};
    case SpecKind::SmoothBump:
      return {c - spec.width, c + spec.width};
    case SpecKind::LogPower: {
      double edge = std::exp(-1.0);
      return {-edge, 0.0, edge};
    }
    case SpecKind::RadialProfile: {
      std::vector<double> out;
      for (const auto& kv : spec.profile) {
        out.push_back(c - kv.first);
        out.push_back(c + kv.first);
      }
      return out;
    }
  }
  return {};
}

bool is_singular(const fields::FunctionSpec& spec) {
  return spec.kind == fields::SpecKind::LogPower && spec.beta > 0.0;
}

// roots of comp(s) == target on [lo, hi] by scan and bisection
void add_crossings(const CurveFn& comp, double target, double lo, double hi,
                   std::vector<double>& out) {
  const int scan = 384;
  double prev_s = lo;
  double prev_v = comp(lo) - target;
  for (int i = 1; i <= scan; ++i) {
    double s = lo + (hi - lo) * i / scan;
    double v = comp(s) - target;
    if (prev_v == 0.0) out.push_back(prev_s);
    if (prev_v * v < 0.0) {
      double a = prev_s, b = s, fa = prev_v;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        double fm = comp(m) - target;
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0)
          b = m;
        else
          a = m, fa = fm;
      }
      out.push_back(0.5 * (a + b));
    }
    prev_s = s;
    prev_v = v;
  }
  if (prev_v == 0.0) out.push_back(prev_s);
}

void check_scalar_spec(const fields::FunctionSpec& spec, const char* slot) {
  using fields::SpecKind;
  if ((spec.kind == SpecKind::BallIndicator ||
       spec.kind == SpecKind::SmoothBump) &&
      spec.center.n != 1)
    throw domain_error(std::string(slot) + ": center must be one-dimensional");
}

struct AverageSetup {
  double lo, hi;
  std::function<double(double)> integrand;
};

AverageSetup make_setup(const fields::FunctionSpec& f,
                        const fields::FunctionSpec& g, double x, double t1,
                        double t2, const CurveSpec& curve) {
  require(std::isfinite(x), "curve_average: x must be finite");
  require(t1 > 0.0 && t2 > 0.0, "curve_average: t1, t2 must be positive");
  require(curve.psi.width > 0.0, "curve_average: cutoff width must be positive");
  check_scalar_spec(f, "curve_average f");
  check_scalar_spec(g, "curve_average g");
  auto [lo, hi] = curve.psi.support();
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  require(hi > lo, "curve_average: cutoff support misses the parameter interval");
  AverageSetup setup;
  setup.lo = lo;
  setup.hi = hi;
  setup.integrand = [&f, &g, x, t1, t2, &curve](double s) {
    double ps = curve.psi(s);
    if (ps == 0.0) return 0.0;
    double fv = f(Vec(x - t1 * curve.gamma1(s)));
    if (fv == 0.0) return 0.0;
    double gv = g(Vec(x - t2 * curve.gamma2(s)));
    return fv * gv * ps;
  };
  return setup;
}

// breakpoints where either factor's argument crosses a non-smooth value
std::vector<double> argument_breakpoints(const fields::FunctionSpec& f,
                                         const fields::FunctionSpec& g,
                                         double x, double t1, double t2,
                                         const CurveSpec& curve, double lo,
                                         double hi) {
  std::vector<double> bps;
  for (double v : kink_arguments(f))
    add_crossings(curve.gamma1, (x - v) / t1, lo, hi, bps);
  for (double v : kink_arguments(g))
    add_crossings(curve.gamma2, (x - v) / t2, lo, hi, bps);
  return bps;
}

double sup_norm_of(const fields::FunctionSpec& spec) {
  using fields::SpecKind;
  switch (spec.kind) {
    case SpecKind::Constant:
      return std::abs(spec.value);
    case SpecKind::BallIndicator:
    case SpecKind::SmoothBump:
      return 1.0;
    default:
      throw domain_error("sup norm: unbounded catalogue member");
  }
}

// two-sided geometric mesh on eta <= |s - s0| <= width, mapped to s
CompositeMesh cutoff_mesh(double s0, double width, double eta) {
  CompositeMesh radial = geometric_mesh(eta, width, std::pow(2.0, 0.25));
  CompositeMesh out;
  for (size_t i = radial.cells.size(); i-- > 0;)
    out.cells.push_back({s0 - radial.cells[i].hi, s0 - radial.cells[i].lo});
  for (const Cell& c : radial.cells) out.cells.push_back({s0 + c.lo, s0 + c.hi});
  return out;
}

std::vector<double> default_etas(double start_log2, int count) {
  std::vector<double> etas;
  for (int i = 0; i < count; ++i)
    etas.push_back(std::pow(2.0, start_log2 - i));
  return etas;
}

void check_etas(const std::vector<double>& etas, double width) {
  require(etas.size() >= 3, "curve_sharpness: need at least three cutoffs");
  for (size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] > 0.0 && etas[i] < width,
            "curve_sharpness: cutoffs must lie inside the cutoff support");
    if (i > 0)
      require(etas[i] < etas[i - 1],
              "curve_sharpness: cutoffs must be strictly decreasing");
  }
}

constexpr double kProbeFloorMargin = 2e-9;  // keep arguments above the
                                            // catalogue's frozen zone
constexpr double kHalvingLogTol = 0.13750352374993502;   // log2(1.1)
constexpr double kConvergedLogTol = 0.07038932789139524; // log2(1.05)
constexpr double kDivergenceMargin = 0.05;  // slack on measured e >= 1

}  // namespace

double CurveFn::operator()(double s) const {
  if (kind == Kind::Polynomial) return horner(coeffs, s);
  return fn(s);
}

double CurveFn::derivative(double s, int order) const {
  require(order >= 0, "CurveFn::derivative: order must be nonnegative");
  if (order == 0) return (*this)(s);
  if (kind == Kind::Polynomial) {
    std::vector<double> d = coeffs;
    for (int k = 0; k < order; ++k) {
      if (d.size() <= 1) return 0.0;
      std::vector<double> nd(d.size() - 1);
      for (size_t i = 1; i < d.size(); ++i) nd[i - 1] = d[i] * static_cast<double>(i);
      d = std::move(nd);
    }
    return horner(d, s);
  }
  // Richardson-extrapolated central differences; amplified rounding makes
  // the extrapolation counterproductive at high orders
  double h = order <= 2 ? 1.0 / 128.0 : (order <= 4 ? 1.0 / 32.0 : 1.0 / 16.0);
  double coarse = central_diff(fn, s, order, h);
  double fine = central_diff(fn, s, order, 0.5 * h);
  if (order >= 5) return fine;
  return (4.0 * fine - coarse) / 3.0;
}

CurveFn CurveFn::polynomial(std::vector<double> coefficients) {
  require(!coefficients.empty(), "CurveFn: empty coefficient list");
  CurveFn c;
  c.kind = Kind::Polynomial;
  c.coeffs = std::move(coefficients);
  return c;
}

CurveFn CurveFn::identity() { return polynomial({0.0, 1.0}); }

CurveFn CurveFn::flat_point(double c_star, double s0, int m,
                            std::vector<double> phi) {
  require(m >= 1, "flat_point: order must be >= 1");
  require(!phi.empty() && phi[0] != 0.0,
          "flat_point: phi must not vanish at the flat point");
  // phi is given in powers of (s - s0); expand c* - (s-s0)^m phi(s-s0)
  std::vector<double> monomial(static_cast<size_t>(m) + 1, 0.0);
  monomial.back() = 1.0;
  std::vector<double> q = poly_mul(monomial, phi);
  for (double& c : q) c = -c;
  std::vector<double> p = poly_shift(q, s0);
  p[0] += c_star;
  return polynomial(std::move(p));
}

CurveFn CurveFn::generic(std::function<double(double)> callable) {
  CurveFn c;
  c.kind = Kind::Generic;
  c.fn = std::move(callable);
  return c;
}

double Cutoff::operator()(double s) const {
  if (one_sided_right && s < center) return 0.0;
  double u = (s - center) / width;
  if (std::abs(u) >= 1.0) return 0.0;
  return sq(1.0 - u * u);
}

std::pair<double, double> Cutoff::support() const {
  return {one_sided_right ? center : center - width, center + width};
}

TypeReport detect_type(const CurveSpec& curve, double s0, double tol,
                       int m_max) {
  require(s0 >= 0.0 && s0 <= 1.0, "detect_type: s0 outside [0, 1]");
  require(tol > 0.0 && tol < 1.0, "detect_type: tol must be in (0, 1)");
  require(m_max >= 1, "detect_type: m_max must be >= 1");
  std::vector<double> mags;
  double scale = 0.0;
  for (int k = 1; k <= m_max; ++k) {
    mags.push_back(std::abs(curve.gamma2.derivative(s0, k)));
    scale = std::max(scale, mags.back());
  }
  if (!(scale > 0.0))
    throw domain_error(
        "detect_type: every derivative vanishes at s0, no finite order");
  for (int k = 1; k <= m_max; ++k) {
    if (mags[static_cast<size_t>(k - 1)] > tol * scale) {
      TypeReport rep;
      rep.s0 = s0;
      rep.m = k;
      rep.derivative_magnitudes.assign(mags.begin(), mags.begin() + k);
      return rep;
    }
  }
  throw domain_error(
      "detect_type: no derivative clears the tolerance up to m_max");
}

double curve_average(const fields::FunctionSpec& f,
                     const fields::FunctionSpec& g, double x, double t1,
                     double t2, const CurveSpec& curve,
                     const CurveQuadrature& rule) {
  require(rule.cells >= 1 && rule.nodes >= 2 && rule.nodes <= 32,
          "curve_average: bad quadrature parameters");
  AverageSetup setup = make_setup(f, g, x, t1, t2, curve);
  CompositeMesh mesh = uniform_mesh(setup.lo, setup.hi, rule.cells);
  std::vector<double> bps =
      argument_breakpoints(f, g, x, t1, t2, curve, setup.lo, setup.hi);
  if (!bps.empty()) {
    mesh.insert_breakpoints(bps);
    if (is_singular(f) || is_singular(g)) mesh.grade_at(bps, 20);
  }
  return integrate(mesh, rule.nodes, setup.integrand);
}

double curve_average_on_mesh(const fields::FunctionSpec& f,
                             const fields::FunctionSpec& g, double x,
                             double t1, double t2, const CurveSpec& curve,
                             const CompositeMesh& mesh, int nodes) {
  require(!mesh.cells.empty(), "curve_average_on_mesh: empty mesh");
  require(nodes >= 2 && nodes <= 32, "curve_average_on_mesh: bad node count");
  AverageSetup setup = make_setup(f, g, x, t1, t2, curve);
  return integrate(mesh, nodes, setup.integrand);
}

SampledField curve_maximal(const CurveMaximalRequest& req) {
  require(req.out_grid.n == 1, "curve_maximal: output grid must be 1-D");
  require(req.t_min > 0.0 && req.t_max >= req.t_min,
          "curve_maximal: bad t range");
  require(req.t_ratio > 1.0, "curve_maximal: t_ratio must exceed 1");
  require(req.cells >= 1 && req.nodes >= 2 && req.nodes <= 32,
          "curve_maximal: bad quadrature parameters");
  require(req.curve.psi.width > 0.0, "curve_maximal: cutoff width must be positive");
  check_scalar_spec(req.f, "curve_maximal f");
  check_scalar_spec(req.g, "curve_maximal g");
  auto [lo, hi] = req.curve.psi.support();
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  require(hi > lo, "curve_maximal: cutoff support misses the parameter interval");

  std::vector<double> ts =
      fields::geometric_sequence(req.t_min, req.t_max, req.t_ratio);
  CompositeMesh mesh = uniform_mesh(lo, hi, req.cells);
  std::vector<double> pts, wts;
  mesh_points(mesh, req.nodes, pts, wts);
  size_t J = pts.size();
  std::vector<double> g1(J), g2(J), pw(J);
  for (size_t j = 0; j < J; ++j) {
    g1[j] = req.curve.gamma1(pts[j]);
    g2[j] = req.curve.gamma2(pts[j]);
    pw[j] = wts[j] * req.curve.psi(pts[j]);
  }

  SampledField out;
  out.grid = req.out_grid;
  out.values.assign(req.out_grid.size(), 0.0);
  size_t T = ts.size();
  parallel_for_index(out.grid.size(), [&](size_t idx) {
    double x = out.grid.point(idx)[0];
    std::vector<double> fv(T * J), gv(T * J);
    for (size_t i = 0; i < T; ++i)
      for (size_t j = 0; j < J; ++j) {
        fv[i * J + j] = req.f(Vec(x - ts[i] * g1[j]));
        gv[i * J + j] = req.g(Vec(x - ts[i] * g2[j]));
      }
    double best = 0.0;
    auto value_at = [&](size_t i, size_t l) {
      double acc = 0.0;
      const double* fi = fv.data() + i * J;
      const double* gl = gv.data() + l * J;
      for (size_t j = 0; j < J; ++j) acc += pw[j] * fi[j] * gl[j];
      return std::abs(acc);
    };
    if (req.mode == MaxMode::Diagonal) {
      for (size_t i = 0; i < T; ++i) best = std::max(best, value_at(i, i));
    } else {
      for (size_t i = 0; i < T; ++i)
        for (size_t l = 0; l < T; ++l) best = std::max(best, value_at(i, l));
    }
    out.values[idx] = best;
  });
  return out;
}

SampledField mstar(const fields::FunctionSpec& f, double h, const Grid& grid,
                   const std::vector<double>& ts, int cells, int nodes) {
  require(grid.n == 1, "mstar: grid must be 1-D");
  require(!ts.empty(), "mstar: need at least one t");
  for (double t : ts) require(t > 0.0, "mstar: all t must be positive");
  require(cells >= 1 && nodes >= 2 && nodes <= 32,
          "mstar: bad quadrature parameters");
  check_scalar_spec(f, "mstar f");

  bool exact = f.kind == fields::SpecKind::BallIndicator;
  double c = exact && f.center.n > 0 ? f.center[0] : 0.0;
  double R = f.radius;

  SampledField out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  parallel_for_index(grid.size(), [&](size_t idx) {
    double x = grid.point(idx)[0];
    double best = 0.0;
    for (double t : ts) {
      double v;
      if (exact) {
        double lo = (x - c - R) / t, hi = (x - c + R) / t;
        v = pos_part(std::min(h + 2.0, hi) - std::max(h - 2.0, lo));
      } else {
        CompositeMesh mesh = uniform_mesh(h - 2.0, h + 2.0, cells);
        v = integrate(mesh, nodes, [&](double y) { return f(Vec(x - t * y)); });
      }
      best = std::max(best, v);
    }
    out.values[idx] = best;
  });
  return out;
}

ScalingFit mstar_exponent(double p, const std::vector<double>& hs) {
  require(p > 1.0, "mstar_exponent: p must exceed 1");
  require(hs.size() >= 3, "mstar_exponent: need at least three offsets");
  for (size_t i = 0; i < hs.size(); ++i) {
    require(hs[i] > 2.0, "mstar_exponent: offsets must exceed the window half-width");
    if (i > 0)
      require(hs[i] > hs[i - 1], "mstar_exponent: offsets must be increasing");
  }
  bool inf = std::isinf(p);

  std::vector<std::pair<double, double>> points;
  for (double h : hs) {
    // sup over window alignments: right edge at x/t, left edge at (x-1)/t,
    // plus geometric brackets around both
    auto value = [h](double x) {
      auto overlap = [h, x](double t) {
        double lo = (x - 1.0) / t, hi = x / t;
        return pos_part(std::min(h + 2.0, hi) - std::max(h - 2.0, lo));
      };
      double best = 0.0;
      double ta = x / (h + 2.0);
      double tb = (x - 1.0) / (h - 2.0);
      for (int j = -8; j <= 8; ++j) {
        double fac = std::pow(2.0, j / 8.0);
        if (ta > 0.0) best = std::max(best, overlap(ta * fac));
        if (tb > 0.0) best = std::max(best, overlap(tb * fac));
      }
      return best;
    };

    double knee = 0.25 * (h + 2.0);
    for (int i = 0; i < 64; ++i) {
      // 64 log-spaced probes on (h/64, 4h]
      double x = h * std::pow(2.0, -6.0 + 8.0 * (i + 1.0) / 64.0);
      double v = value(x) * (1.0 + x / h);
      if (!(v >= 1.0 && v <= 12.0)) {
        std::ostringstream os;
        os << "mstar_exponent: profile bound violated at x=" << x
           << " h=" << h << " value=" << v;
        throw fit_error(os.str());
      }
    }

    double norm;
    if (inf) {
      CompositeMesh mesh = uniform_mesh(0.0, 4.0 * (h + 2.0), 64);
      std::vector<double> pts, wts;
      mesh_points(mesh, 6, pts, wts);
      norm = 0.0;
      for (double x : pts) norm = std::max(norm, value(x));
    } else {
      // tail cutoff chosen so the truncated share of the p-th power scales
      // identically across offsets
      double tail_factor = std::min(1e8, std::pow(1000.0, std::max(1.0, 1.0 / (p - 1.0))));
      CompositeMesh mesh = uniform_mesh(0.0, knee, 16);
      CompositeMesh decay =
          geometric_mesh(knee, tail_factor * (h + 2.0), std::pow(2.0, 0.125));
      for (const Cell& cell : decay.cells) mesh.cells.push_back(cell);
      mesh.insert_breakpoints({1.0});
      double integral = integrate(
          mesh, 8, [&](double x) { return std::pow(value(x), p); });
      norm = std::pow(integral, 1.0 / p);
    }
    points.emplace_back(h, norm);
  }
  double predicted = inf ? 0.0 : 1.0 / p;
  return fit_loglog(points, predicted, 0.05, FitComparison::TwoSided);
}

namespace {

// shared cutoff-shrinking sweep: values of the curve average restricted to
// |s - s0| >= eta
std::vector<std::pair<double, double>> cutoff_sweep(
    const fields::FunctionSpec& f, const fields::FunctionSpec& g, double x,
    double t1, double t2, const CurveSpec& curve, double s0, double width,
    const std::vector<double>& etas, int m) {
  // cell edges where the singular factor's argument leaves its support
  std::vector<double> bps;
  double u_edge = std::pow(std::exp(-1.0) / t2, 1.0 / m);
  if (u_edge < width) {
    bps.push_back(s0 - u_edge);
    bps.push_back(s0 + u_edge);
  }
  std::vector<std::pair<double, double>> rows;
  for (double eta : etas) {
    CompositeMesh mesh = cutoff_mesh(s0, width, eta);
    if (!bps.empty()) mesh.insert_breakpoints(bps);
    rows.emplace_back(eta,
                      curve_average_on_mesh(f, g, x, t1, t2, curve, mesh, 8));
  }
  return rows;
}

CurveSharpnessReport flat_growth(const CurveSharpnessRequest& req) {
  require(req.m >= 2 && req.m <= 6, "curve_sharpness: order must be in [2, 6]");
  require(req.q > 0.0, "curve_sharpness: q must be positive");
  if (std::abs(req.q - req.m) < 1e-12)
    throw domain_error(
        "curve_sharpness: q equal to the flatness order converges too slowly "
        "to certify at feasible cutoffs");
  // wide cutoff keeps the integral's constant term small next to the
  // growing cutoff term, so halving ratios settle within a few percent
  const double s0 = 0.5, c_star = 0.125, width = 0.45;
  const double t1 = 1.0, t2 = 4.0, x = t2 * c_star;
  CurveSpec curve;
  curve.gamma2 = CurveFn::flat_point(c_star, s0, req.m, {1.0});
  curve.psi = Cutoff{s0, width, false};
  fields::FunctionSpec f = fields::FunctionSpec::ball(Vec(0.0), 1.0);
  fields::FunctionSpec g = fields::FunctionSpec::log_power(1.0 / req.q, 0.0);

  bool growing = req.q < req.m;
  std::vector<double> etas = req.etas;
  if (etas.empty()) etas = growing ? default_etas(-7.0, 4) : default_etas(-12.0, 4);
  check_etas(etas, width);
  require(t2 * std::pow(etas.back(), req.m) >= kProbeFloorMargin || !growing,
          "curve_sharpness: cutoff reaches the probe floor");

  CurveSharpnessReport rep;
  rep.rows = cutoff_sweep(f, g, x, t1, t2, curve, s0, width, etas, req.m);
  for (size_t i = 1; i < rep.rows.size(); ++i)
    rep.ratios.push_back(rep.rows[i].second / rep.rows[i - 1].second);
  rep.predicted_ratio = growing ? std::pow(2.0, req.m / req.q - 1.0) : 1.0;
  double slope = growing ? 1.0 - req.m / req.q : 0.0;
  double tol = growing ? kHalvingLogTol : kConvergedLogTol;
  rep.fit = fit_loglog(rep.rows, slope, tol, FitComparison::TwoSided);
  if (growing && rep.ratios.size() >= 3) {
    bool all = true;
    for (double r : rep.ratios)
      if (r < rep.predicted_ratio * (1.0 - req.ratio_tolerance)) all = false;
    rep.divergent = all && rep.predicted_ratio > 1.0;
  }
  return rep;
}

CurveSharpnessReport joint_divergence(const CurveSharpnessRequest& req) {
  require(req.m >= 2 && req.m <= 6, "curve_sharpness: order must be in [2, 6]");
  require(req.p >= 1.0 && req.q >= 1.0,
          "curve_sharpness: exponents must be >= 1");
  const double s0 = 0.5, c_star = 0.25, width = 0.25;
  const double t1 = 1.0, t2 = 2.0, x = t2 * c_star;
  CurveSpec curve;
  curve.gamma2 = CurveFn::flat_point(c_star, s0, req.m, {1.0});
  curve.psi = Cutoff{s0, width, false};
  fields::FunctionSpec f = fields::FunctionSpec::log_power(1.0 / req.p, 0.0);
  fields::FunctionSpec g = fields::FunctionSpec::log_power(1.0 / req.q, 0.0);

  std::vector<double> etas = req.etas;
  if (etas.empty()) {
    if (req.m == 2)
      etas = default_etas(-8.0, 6);
    else if (req.m == 3)
      etas = default_etas(-5.0, 5);
    else
      etas = default_etas(-4.0, 4);
  }
  check_etas(etas, width);
  require(etas.size() >= 4,
          "curve_sharpness: divergence probe needs at least four cutoffs");
  require(t2 * std::pow(etas.back(), req.m) >= kProbeFloorMargin,
          "curve_sharpness: cutoff reaches the probe floor");

  double e = 1.0 / req.p + req.m / req.q;
  CurveSharpnessReport rep;
  rep.rows = cutoff_sweep(f, g, x, t1, t2, curve, s0, width, etas, req.m);
  std::vector<std::pair<double, double>> increments;
  for (size_t i = 1; i < rep.rows.size(); ++i)
    increments.emplace_back(rep.rows[i - 1].first,
                            rep.rows[i].second - rep.rows[i - 1].second);
  for (size_t i = 1; i < increments.size(); ++i)
    rep.ratios.push_back(increments[i].second / increments[i - 1].second);
  rep.predicted_ratio = std::pow(2.0, e - 1.0);
  rep.fit = fit_loglog(increments, 1.0 - e, kHalvingLogTol,
                       FitComparison::TwoSided);
  double e_hat = 1.0 - rep.fit.slope;
  rep.divergent = e_hat >= 1.0 - kDivergenceMargin;
  return rep;
}

CurveSharpnessReport nondegenerate_bound(const CurveSharpnessRequest&) {
  CurveSpec curve;
  curve.gamma2 = CurveFn::polynomial({1.0, -0.5, -0.125});
  curve.psi = Cutoff{0.5, 0.3, false};
  Grid grid = Grid::line(-2.0, 2.0, 81);
  std::vector<double> radii = fields::geometric_sequence(0.0625, 8.0, 2.0);

  std::vector<fields::FunctionSpec> probes = {
      fields::FunctionSpec::ball(Vec(0.0), 1.0),
      fields::FunctionSpec::ball(Vec(0.3), 0.5),
      fields::FunctionSpec::bump(Vec(0.0), 0.7)};

  CurveSharpnessReport rep;
  std::vector<SampledField> maxes;
  for (const auto& s : probes) maxes.push_back(fields::hl_max(s, grid, radii));

  double worst = 0.0;
  for (size_t a = 0; a < probes.size(); ++a)
    for (size_t b = 0; b < probes.size(); ++b) {
      CurveMaximalRequest mreq;
      mreq.curve = curve;
      mreq.f = probes[a];
      mreq.g = probes[b];
      mreq.out_grid = grid;
      SampledField field = curve_maximal(mreq);
      double sup_f = sup_norm_of(probes[a]);
      double sup_g = sup_norm_of(probes[b]);
      double pair_worst = 0.0;
      for (size_t i = 0; i < field.values.size(); ++i) {
        double bound = std::min(maxes[a].values[i] * sup_g,
                                sup_f * maxes[b].values[i]);
        if (bound > 0.0)
          pair_worst = std::max(pair_worst, field.values[i] / bound);
      }
      rep.rows.emplace_back(static_cast<double>(a * probes.size() + b),
                            pair_worst);
      worst = std::max(worst, pair_worst);
    }
  rep.bound_ratio = worst;
  rep.predicted_ratio = 1.0;
  return rep;
}

}  // namespace

CurveSharpnessReport curve_sharpness(const CurveSharpnessRequest& req) {
  require(req.ratio_tolerance > 0.0 && req.ratio_tolerance < 1.0,
          "curve_sharpness: ratio tolerance must be in (0, 1)");
  switch (req.which) {
    case CurveCase::FlatGrowth:
      return flat_growth(req);
    case CurveCase::JointDivergence:
      return joint_divergence(req);
    case CurveCase::NondegenerateBound:
      return nondegenerate_bound(req);
  }
  throw config_error("curve_sharpness: unknown case");
}

}  // namespace maxlab::curves
