#include "maxlab/multilinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "maxlab/bilinear.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab::multilinear {

namespace {

// below this gap the weight's square could overflow the variance sums
constexpr double kGapFloor = 1e-30;

Vec sample_ball(const CounterRng& rng, uint64_t i, uint64_t lane_base, int n,
                double radius) {
  if (n == 1) {
    double u = rng.uniform(i, lane_base);
    return Vec(radius * (2.0 * u - 1.0));
  }
  if (n == 2) {
    double r = radius * std::sqrt(rng.uniform(i, lane_base));
    double th = 2.0 * M_PI * rng.uniform(i, lane_base + 1);
    return Vec(r * std::cos(th), r * std::sin(th));
  }
  double r = radius * std::cbrt(rng.uniform(i, lane_base));
  double c = 2.0 * rng.uniform(i, lane_base + 1) - 1.0;
  double s = std::sqrt(pos_part(1.0 - c * c));
  double phi = 2.0 * M_PI * rng.uniform(i, lane_base + 2);
  return Vec(r * s * std::cos(phi), r * s * std::sin(phi), r * c);
}

double sphere_integral(const fields::FunctionSpec& f, const Vec& x, double s,
                       int n, const fields::SphereRule& rule) {
  if (n == 1) return f(Vec(x[0] - s)) + f(Vec(x[0] + s));
  return fields::spherical_average(f, x, s, rule);
}

void validate(const MultiAverageRequest& req) {
  size_t m = req.a.size();
  require(m >= 2 && m <= 4, "multilinear: need 2 to 4 factors");
  require(req.fs.size() == m && req.ts.size() == m,
          "multilinear: factor, exponent, and dilation counts must agree");
  require(req.n >= 1 && req.n <= 3, "multilinear: n must be 1, 2, or 3");
  require(req.x.n == req.n, "multilinear: x dimension mismatch");
  require(req.pivot >= 1 && req.pivot <= static_cast<int>(m),
          "multilinear: pivot out of range");
  for (double aj : req.a) require(aj >= 1.0, "multilinear: exponents must be >= 1");
  for (double tj : req.ts) require(tj > 0.0, "multilinear: dilations must be positive");
  require(req.samples >= 100, "multilinear: need at least 100 samples");
  if (req.n >= 2)
    require(req.sphere_resolution >= 8, "multilinear: sphere resolution too small");
  require(req.tolerance >= 0.0, "multilinear: tolerance must be >= 0");
}

// deterministic multi-accumulator reduction in fixed chunk order
template <size_t K>
std::array<double, K> chunked_accumulate(
    uint64_t count, uint64_t chunk,
    const std::function<void(uint64_t, uint64_t, std::array<double, K>&)>&
        body) {
  size_t nchunks = static_cast<size_t>((count + chunk - 1) / chunk);
  std::vector<std::array<double, K>> acc(nchunks);
  parallel_for_index(nchunks, [&](size_t c) {
    std::array<double, K> a{};
    uint64_t lo = static_cast<uint64_t>(c) * chunk;
    uint64_t hi = std::min(count, lo + chunk);
    body(lo, hi, a);
    acc[c] = a;
  });
  std::array<double, K> total{};
  for (const auto& a : acc)
    for (size_t k = 0; k < K; ++k) total[k] += a[k];
  return total;
}

struct DrawResult {
  double gap = 0.0;        // 1 - sum of the non-pivot |y^j|^a_j
  double nu_v = 0.0;       // pivot sphere radius
  double weight = 0.0;     // gradient-ratio surface weight
  std::array<Vec, 3> ys;   // non-pivot blocks in factor order
  bool ok = false;
};

// draws the non-pivot blocks of sample i; radii scale each block's ball
DrawResult draw_outer(const CounterRng& rng, uint64_t i, int n,
                      const std::vector<double>& a, int pivot0,
                      const std::array<double, 3>& radii) {
  DrawResult d;
  size_t m = a.size();
  double that = 0.0, grad = 0.0;
  int b = 0;
  for (size_t j = 0; j < m; ++j) {
    if (static_cast<int>(j) == pivot0) continue;
    Vec y = sample_ball(rng, i, static_cast<uint64_t>(b) * 4, n,
                        radii[static_cast<size_t>(b)]);
    double rho = y.norm();
    that += std::pow(rho, a[j]);
    grad += sq(a[j]) * std::pow(rho, 2.0 * a[j] - 2.0);
    d.ys[static_cast<size_t>(b)] = y;
    ++b;
  }
  double u = 1.0 - that;
  if (u <= kGapFloor) return d;
  double a_l = a[static_cast<size_t>(pivot0)];
  d.gap = u;
  d.nu_v = std::pow(u, 1.0 / a_l);
  grad += sq(a_l) * std::pow(d.nu_v, 2.0 * a_l - 2.0);
  d.weight = std::sqrt(grad) * std::pow(d.nu_v, n - a_l) / a_l;
  d.ok = true;
  return d;
}

MCEstimate run_sampler(const MultiAverageRequest& req, double shell_lo,
                       double shell_hi) {
  validate(req);
  size_t m = req.a.size();
  int pivot0 = req.pivot - 1;
  const fields::FunctionSpec& fl = req.fs[static_cast<size_t>(pivot0)];
  double tl = req.ts[static_cast<size_t>(pivot0)];
  fields::SphereRule rule;
  if (req.n >= 2) rule = fields::sphere_rule(req.n, req.sphere_resolution);
  CounterRng rng(req.seed);
  std::array<double, 3> radii{1.0, 1.0, 1.0};
  double smeas = sphere_measure(req.n);

  // factor indices of the non-pivot blocks, in order
  std::vector<size_t> others;
  for (size_t j = 0; j < m; ++j)
    if (static_cast<int>(j) != pivot0) others.push_back(j);

  auto total = chunked_accumulate<5>(
      req.samples, 4096,
      [&](uint64_t lo, uint64_t hi, std::array<double, 5>& acc) {
        for (uint64_t i = lo; i < hi; ++i) {
          DrawResult d = draw_outer(rng, i, req.n, req.a, pivot0, radii);
          if (!d.ok) continue;
          double den = d.weight * smeas;
          double num = 0.0;
          if (d.gap >= shell_lo && d.gap < shell_hi) {
            double prod = 1.0;
            for (size_t b = 0; b < others.size() && prod != 0.0; ++b) {
              size_t j = others[b];
              prod *= req.fs[j](req.x - d.ys[b] * req.ts[j]);
            }
            if (prod != 0.0)
              num = d.weight * prod *
                    sphere_integral(fl, req.x, tl * d.nu_v, req.n, rule);
          }
          acc[0] += num;
          acc[1] += den;
          acc[2] += num * num;
          acc[3] += den * den;
          acc[4] += num * den;
        }
      });

  double N = static_cast<double>(req.samples);
  MCEstimate est;
  est.samples = req.samples;
  if (req.normalized) {
    require(total[1] > 0.0, "multilinear: sampled surface mass is zero");
    double R = total[0] / total[1];
    double var = (total[2] - 2.0 * R * total[4] + R * R * total[3]) / (N - 1.0);
    est.value = R;
    est.se = std::sqrt(pos_part(var) / N) / (total[1] / N);
  } else {
    double vbox = 1.0;
    for (size_t b = 0; b < m - 1; ++b) vbox *= ball_volume(req.n);
    double mean = total[0] / N;
    double var = (total[2] - N * mean * mean) / (N - 1.0);
    est.value = vbox * mean;
    est.se = vbox * std::sqrt(pos_part(var) / N);
  }
  if (req.tolerance > 0.0 && est.se > req.tolerance)
    throw accuracy_error("multilinear: standard error above tolerance at budget",
                         est.value, est.se);
  return est;
}

}  // namespace

double nu(double a, double t) {
  require(a >= 1.0, "nu: exponent must be >= 1");
  return std::pow(pos_part(1.0 - t), 1.0 / a);
}

double cap_measure(int n, double rho, double s, double R) {
  require(n >= 1 && n <= 3, "cap_measure: n must be 1, 2, or 3");
  require(rho >= 0.0 && s >= 0.0 && R >= 0.0, "cap_measure: negative input");
  if (n == 1) {
    double c = 0.0;
    if (std::abs(rho - s) <= R) c += 1.0;
    if (rho + s <= R) c += 1.0;
    return c;
  }
  if (s == 0.0 || rho == 0.0) {
    double d = std::abs(rho - s);
    return d <= R ? sphere_measure(n) : 0.0;
  }
  double cosphi = (rho * rho + s * s - R * R) / (2.0 * rho * s);
  if (cosphi >= 1.0) return 0.0;
  if (cosphi <= -1.0) return sphere_measure(n);
  if (n == 2) return 2.0 * std::acos(cosphi);
  return 2.0 * M_PI * (1.0 - cosphi);
}

MCEstimate multilinear_average(const MultiAverageRequest& req) {
  return run_sampler(req, 0.0, 2.0);
}

MCEstimate multilinear_dyadic_piece(const MultiAverageRequest& req, int k) {
  require(k >= 1 && k <= 60, "multilinear_dyadic_piece: k out of range");
  return run_sampler(req, std::pow(2.0, -k), std::pow(2.0, 1 - k));
}

double trilinear_radial_oracle(const MultiAverageRequest& req,
                               int radial_depth, int radial_cells, int nodes) {
  validate(req);
  require(req.a.size() == 3, "trilinear_radial_oracle: exactly three factors");
  require(radial_depth >= 4 && radial_depth <= 50 && radial_cells >= 4 &&
              nodes >= 2 && nodes <= 16,
          "trilinear_radial_oracle: bad quadrature parameters");
  int pivot0 = req.pivot - 1;
  size_t P = pivot0 == 0 ? 1 : 0;
  size_t Q = pivot0 == 2 ? 1 : 2;
  double aP = req.a[P], aQ = req.a[Q], aL = req.a[static_cast<size_t>(pivot0)];
  fields::SphereRule rule;
  if (req.n >= 2) rule = fields::sphere_rule(req.n, req.sphere_resolution);
  double smeas = sphere_measure(req.n);
  int n = req.n;

  auto block = [&](bool ones) {
    CompositeMesh outer = uniform_mesh(0.0, 1.0, radial_cells);
    outer.grade_at({1.0}, radial_depth);
    return integrate(outer, nodes, [&](double rp) {
      double sp = ones ? smeas
                       : sphere_integral(req.fs[P], req.x, req.ts[P] * rp, n,
                                         rule);
      if (sp == 0.0) return 0.0;
      double capq = std::pow(pos_part(1.0 - std::pow(rp, aP)), 1.0 / aQ);
      if (capq <= 0.0) return 0.0;
      CompositeMesh inner = uniform_mesh(0.0, capq, radial_cells);
      inner.grade_at({capq}, radial_depth);
      double inner_val = integrate(inner, nodes, [&](double rq) {
        double that = std::pow(rp, aP) + std::pow(rq, aQ);
        double u = 1.0 - that;
        if (u <= kGapFloor) return 0.0;
        double nu_v = std::pow(u, 1.0 / aL);
        double grad = sq(aP) * std::pow(rp, 2.0 * aP - 2.0) +
                      sq(aQ) * std::pow(rq, 2.0 * aQ - 2.0) +
                      sq(aL) * std::pow(nu_v, 2.0 * aL - 2.0);
        double w = std::sqrt(grad) * std::pow(nu_v, n - aL) / aL;
        double sq_v = ones ? smeas
                           : sphere_integral(req.fs[Q], req.x, req.ts[Q] * rq,
                                             n, rule);
        if (sq_v == 0.0) return 0.0;
        double sl = ones ? smeas
                         : sphere_integral(req.fs[static_cast<size_t>(pivot0)],
                                           req.x,
                                           req.ts[static_cast<size_t>(pivot0)] *
                                               nu_v,
                                           n, rule);
        return std::pow(rp, n - 1) * std::pow(rq, n - 1) * w * sq_v * sl;
      });
      return sp * inner_val;
    });
  };

  double value = block(false);
  if (!req.normalized) return value;
  double mass = block(true);
  require(mass > 0.0, "trilinear_radial_oracle: zero mass");
  return value / mass;
}

SampledField multilinear_maximal(const MultiMaximalRequest& req) {
  MultiAverageRequest base;
  base.n = req.n;
  base.a = req.a;
  base.fs = req.fs;
  base.x = zero_vec(req.n);
  base.ts.assign(req.a.size(), 1.0);
  base.pivot = req.pivot;
  base.samples = req.samples;
  base.seed = req.seed;
  base.sphere_resolution = req.sphere_resolution;
  validate(base);
  require(req.out_grid.n == req.n, "multilinear_maximal: grid dimension mismatch");
  require(req.t_min > 0.0 && req.t_max >= req.t_min && req.t_ratio > 1.0,
          "multilinear_maximal: bad t grid");

  size_t m = req.a.size();
  int pivot0 = req.pivot - 1;
  std::vector<double> ts =
      fields::geometric_sequence(req.t_min, req.t_max, req.t_ratio);
  size_t T = ts.size();
  size_t N = static_cast<size_t>(req.samples);
  fields::SphereRule rule;
  if (req.n >= 2) rule = fields::sphere_rule(req.n, req.sphere_resolution);
  double smeas = sphere_measure(req.n);
  std::array<double, 3> radii{1.0, 1.0, 1.0};
  std::vector<size_t> others;
  for (size_t j = 0; j < m; ++j)
    if (static_cast<int>(j) != pivot0) others.push_back(j);

  SampledField out;
  out.grid = req.out_grid;
  out.values.assign(req.out_grid.size(), 0.0);

  parallel_for_index(out.grid.size(), [&](size_t idx) {
    Vec x = out.grid.point(idx);
    CounterRng rng(mix64(req.seed ^ (0x9e3779b97f4a7c15ull * (idx + 1))));

    std::vector<double> w(N, 0.0), nu_s(N, 0.0);
    std::vector<std::array<Vec, 3>> ys(N);
    double mass_sum = 0.0;
    for (size_t i = 0; i < N; ++i) {
      DrawResult d = draw_outer(rng, i, req.n, req.a, pivot0, radii);
      if (!d.ok) continue;
      w[i] = d.weight;
      nu_s[i] = d.nu_v;
      ys[i] = d.ys;
      mass_sum += d.weight * smeas;
    }

    // factor tables over the shared sample stream
    std::vector<std::vector<double>> ftab(others.size(),
                                          std::vector<double>(T * N));
    for (size_t b = 0; b < others.size(); ++b) {
      size_t j = others[b];
      for (size_t t = 0; t < T; ++t)
        for (size_t i = 0; i < N; ++i)
          ftab[b][t * N + i] =
              w[i] == 0.0 ? 0.0 : req.fs[j](x - ys[i][b] * ts[t]);
    }
    std::vector<double> ptab(T * N);
    const fields::FunctionSpec& fl = req.fs[static_cast<size_t>(pivot0)];
    for (size_t t = 0; t < T; ++t)
      for (size_t i = 0; i < N; ++i)
        ptab[t * N + i] =
            w[i] == 0.0 ? 0.0
                        : sphere_integral(fl, x, ts[t] * nu_s[i], req.n, rule);

    double norm;
    if (req.normalized) {
      norm = mass_sum;
    } else {
      double vbox = 1.0;
      for (size_t b = 0; b < m - 1; ++b) vbox *= ball_volume(req.n);
      norm = static_cast<double>(N) / vbox;
    }

    // combo[b] indexes the t grid per factor slot (others..., then pivot)
    auto combo_value = [&](const std::vector<size_t>& combo) {
      double acc = 0.0;
      const double* pv = ptab.data() + combo[m - 1] * N;
      for (size_t i = 0; i < N; ++i) {
        double v = w[i];
        if (v == 0.0) continue;
        for (size_t b = 0; b < others.size(); ++b)
          v *= ftab[b][combo[b] * N + i];
        acc += v * pv[i];
      }
      return std::abs(acc) / norm;
    };

    double best = 0.0;
    std::vector<size_t> combo(m, 0);
    if (!req.full_sup) {
      for (size_t t = 0; t < T; ++t) {
        std::fill(combo.begin(), combo.end(), t);
        best = std::max(best, combo_value(combo));
      }
    } else {
      while (true) {
        best = std::max(best, combo_value(combo));
        size_t slot = 0;
        while (slot < m && ++combo[slot] == T) combo[slot++] = 0;
        if (slot == m) break;
      }
    }
    out.values[idx] = best;
  });
  return out;
}

double spherical_max(const fields::FunctionSpec& f, const Vec& x, double t_min,
                     double t_max, double t_ratio, int resolution) {
  require(t_min > 0.0 && t_max >= t_min && t_ratio > 1.0,
          "spherical_max: bad t grid");
  int n = x.n;
  require(n >= 1 && n <= 3, "spherical_max: x dimension must be 1, 2, or 3");
  fields::SphereRule rule;
  if (n >= 2) rule = fields::sphere_rule(n, resolution);
  double best = 0.0;
  for (double t : fields::geometric_sequence(t_min, t_max, t_ratio))
    best = std::max(best,
                    std::abs(sphere_integral(f, x, t, n, rule)) /
                        sphere_measure(n));
  return best;
}

double predicted_necessity_slope(int n, const std::vector<double>& a) {
  require(a.size() >= 2, "predicted_necessity_slope: need at least two factors");
  double s = n - 1.0;
  for (size_t j = 1; j < a.size(); ++j) s += n / a[j];
  return s;
}

ScalingFit necessity_experiment(int n, const std::vector<double>& a,
                                const std::vector<double>& deltas,
                                uint64_t samples, uint64_t seed,
                                double tolerance) {
  require(a.size() == 3, "necessity_experiment: exactly three factors");
  require(n == 2, "necessity_experiment: n must be 2 at this scale");
  for (double aj : a) require(aj >= 1.0, "necessity_experiment: exponents must be >= 1");
  require(deltas.size() >= 3, "necessity_experiment: need at least three deltas");
  for (size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] > 0.0 && deltas[i] <= 0.25,
            "necessity_experiment: deltas must lie in (0, 1/4]");
    if (i > 0)
      require(deltas[i] < deltas[i - 1],
              "necessity_experiment: deltas must be strictly decreasing");
  }
  require(samples >= 1000, "necessity_experiment: need at least 1000 samples");

  const double probe_radius = 4.0;  // the big-ball factors
  const std::array<double, 3> ring{1.25, 1.5, 1.75};
  double a1 = a[0];

  std::vector<std::pair<double, double>> points;
  for (double delta : deltas) {
    std::array<double, 3> radii{std::pow(delta, 1.0 / a[1]),
                                std::pow(delta, 1.0 / a[2]), 1.0};
    double vbox = ball_volume(n) * ball_volume(n) *
                  std::pow(radii[0], n) * std::pow(radii[1], n);
    fields::FunctionSpec fbig =
        fields::FunctionSpec::ball(zero_vec(n), probe_radius);
    double worst = 0.0;
    bool first = true;
    for (double rho : ring) {
      Vec x = zero_vec(n);
      x[0] = rho;
      CounterRng rng(seed ^ mix64(static_cast<uint64_t>(rho * 1024.0)));
      auto total = chunked_accumulate<1>(
          samples, 4096, [&](uint64_t lo, uint64_t hi, std::array<double, 1>& acc) {
            for (uint64_t i = lo; i < hi; ++i) {
              double that = 0.0, grad = 0.0;
              Vec y2 = sample_ball(rng, i, 0, n, radii[0]);
              Vec y3 = sample_ball(rng, i, 4, n, radii[1]);
              double r2 = y2.norm(), r3 = y3.norm();
              that += std::pow(r2, a[1]) + std::pow(r3, a[2]);
              grad += sq(a[1]) * std::pow(r2, 2.0 * a[1] - 2.0) +
                      sq(a[2]) * std::pow(r3, 2.0 * a[2] - 2.0);
              double u = 1.0 - that;
              if (u <= kGapFloor) continue;
              double nu_v = std::pow(u, 1.0 / a1);
              grad += sq(a1) * std::pow(nu_v, 2.0 * a1 - 2.0);
              double w = std::sqrt(grad) * std::pow(nu_v, n - a1) / a1;
              double cap = cap_measure(n, rho, rho * nu_v, probe_radius * delta);
              if (cap == 0.0) continue;
              double others = fbig(x - y2 * rho) * fbig(x - y3 * rho);
              acc[0] += w * cap * others;
            }
          });
      double value = vbox * total[0] / static_cast<double>(samples);
      if (first || value < worst) worst = value;
      first = false;
    }
    points.emplace_back(delta, worst);
  }
  return fit_loglog(points, predicted_necessity_slope(n, a), tolerance,
                    FitComparison::TwoSided);
}

}  // namespace maxlab::multilinear
