// Acceptance gate. Each invocation runs one numbered criterion and prints a
// single line "criterion N: PASS (...)" or "criterion N: FAIL (...)"; the
// exit code is 0 on pass and 1 on fail. Every tolerance and budget is pinned
// here as a named constant.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "maxlab/bilinear.hpp"
#include "maxlab/common.hpp"
#include "maxlab/curves.hpp"
#include "maxlab/fields.hpp"
#include "maxlab/fitting.hpp"
#include "maxlab/multilinear.hpp"
#include "maxlab/regions.hpp"

namespace {

using maxlab::CounterRng;
using maxlab::Vec;
namespace bi = maxlab::bilinear;
namespace cu = maxlab::curves;
namespace fl = maxlab::fields;
namespace mu = maxlab::multilinear;
namespace re = maxlab::regions;
using fl::FunctionSpec;
using fl::Grid;

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// deterministic stream of uniforms for building randomized requests
struct Draw {
  CounterRng rng;
  uint64_t idx = 0;
  explicit Draw(uint64_t seed) : rng(seed) {}
  double in(double lo, double hi) { return lo + (hi - lo) * rng.uniform(idx++, 0); }
};

const std::array<std::array<double, 2>, 4> kExponentPairs = {
    {{2.0, 2.0}, {2.0, 3.0}, {3.0, 3.0}, {1.0, 2.0}}};

std::vector<double> halved_deltas(int k_lo, int k_hi) {
  std::vector<double> out;
  for (int k = k_lo; k <= k_hi; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

// 1. The two slicing orders of the bilinear average agree to a relative
//    1e-4 on randomized smooth requests for four exponent pairs.
Outcome criterion1() {
  constexpr double kRelTol = 1e-4;
  constexpr double kBudgetSeconds = 120.0;
  constexpr int kTrialsPerPair = 20;
  const auto t0 = Clock::now();

  Draw d(41);
  double worst = 0.0;
  int done = 0;
  for (const auto& ab : kExponentPairs) {
    bi::SliceGeometry geom(2, ab[0], ab[1]);
    for (int trial = 0; trial < kTrialsPerPair; ++trial) {
      bi::AverageRequest req;
      req.geom = geom;
      req.f = FunctionSpec::bump(Vec(d.in(-0.2, 0.2), d.in(-0.2, 0.2)),
                                 d.in(1.0, 1.5));
      req.g = FunctionSpec::bump(Vec(d.in(-0.2, 0.2), d.in(-0.2, 0.2)),
                                 d.in(1.0, 1.5));
      req.x = Vec(d.in(-0.2, 0.2), d.in(-0.2, 0.2));
      req.t1 = d.in(0.6, 1.2);
      req.t2 = d.in(0.6, 1.2);
      double gs = bi::average_gsliced(req);
      double fs = bi::average_fsliced(req);
      double rel = std::abs(gs - fs) / std::abs(gs);
      worst = std::max(worst, rel);
      ++done;
      if (rel > kRelTol)
        return {false, "request " + std::to_string(done) + " (a1=" + num(ab[0]) +
                           ", a2=" + num(ab[1]) + "): relative gap " + num(rel) +
                           " > " + num(kRelTol)};
    }
  }
  double secs = seconds_since(t0);
  if (secs > kBudgetSeconds)
    return {false, "agreement holds but took " + num(secs) + " s > " +
                       num(kBudgetSeconds) + " s budget"};
  return {true, "worst relative gap " + num(worst) + " over " +
                    std::to_string(done) + " requests, " + num(secs) + " s"};
}

// 2. Unnormalized surface mass for n=2, a=(2,2) equals 2*pi^2.
Outcome criterion2() {
  constexpr double kAbsTol = 1e-6;
  double mass = bi::surface_mass(bi::SliceGeometry(2, 2.0, 2.0));
  double target = 2.0 * kPi * kPi;
  double err = std::abs(mass - target);
  bool ok = err <= kAbsTol;
  return {ok, "surface mass " + num(mass) + ", |mass - 2*pi^2| = " + num(err) +
                  (ok ? " <= " : " > ") + num(kAbsTol)};
}

// 3. The parameter-space Monte-Carlo oracle matches the sliced quadrature
//    within three standard errors on randomized indicator and bump requests.
Outcome criterion3() {
  constexpr double kSigmas = 3.0;
  constexpr uint64_t kSamples = 1000000;
  constexpr int kTrialsPerPair = 10;
  constexpr int kIndicatorSphere = 768;

  Draw d(1009);
  double worst_z = 0.0;
  int set_index = 0;
  for (const auto& ab : kExponentPairs) {
    for (int trial = 0; trial < kTrialsPerPair; ++trial) {
      bool indicator = trial % 2 == 0;
      bi::AverageRequest req;
      req.geom = bi::SliceGeometry(2, ab[0], ab[1]);
      Vec cf(d.in(-0.2, 0.2), d.in(-0.2, 0.2));
      Vec cg(d.in(-0.2, 0.2), d.in(-0.2, 0.2));
      if (indicator) {
        req.f = FunctionSpec::ball(cf, d.in(0.8, 1.3));
        req.g = FunctionSpec::ball(cg, d.in(0.8, 1.3));
        req.sphere_resolution = kIndicatorSphere;
      } else {
        req.f = FunctionSpec::bump(cf, d.in(1.0, 1.5));
        req.g = FunctionSpec::bump(cg, d.in(1.0, 1.5));
      }
      req.x = Vec(d.in(-0.2, 0.2), d.in(-0.2, 0.2));
      req.t1 = d.in(0.6, 1.2);
      req.t2 = d.in(0.6, 1.2);
      req.normalized = false;

      double sliced = bi::average_gsliced(req);
      uint64_t seed = 900 + 100 * static_cast<uint64_t>(set_index) +
                      static_cast<uint64_t>(trial);
      maxlab::MCEstimate mc = bi::average_param_oracle(req, kSamples, seed);
      double z = std::abs(sliced - mc.value) / mc.se;
      worst_z = std::max(worst_z, z);
      if (z > kSigmas)
        return {false, std::string(indicator ? "indicator" : "bump") +
                           " request (a1=" + num(ab[0]) + ", a2=" + num(ab[1]) +
                           ", trial " + std::to_string(trial) + "): |sliced - mc| = " +
                           num(z) + " standard errors > " + num(kSigmas)};
    }
    ++set_index;
  }
  return {true, "worst deviation " + num(worst_z) + " standard errors over 40 requests"};
}

// 4. Exact vertex table for n=2, a=(2,3), and the fuzzed implication that
//    membership in the candidate polygon forces the closed necessary region.
Outcome criterion4() {
  constexpr int kFuzzPoints = 100000;
  using re::Rat;

  re::RegionReport rep = re::region_report(2, Rat(2), Rat(3));
  const std::array<std::pair<const char*, std::pair<Rat, Rat>>, 4> want = {
      {{"H", {Rat(0), Rat(1)}},
       {"P", {Rat(1, 2), Rat(1)}},
       {"Y", {Rat(5, 6), Rat(2, 3)}},
       {"B", {Rat(5, 6), Rat(0)}}}};
  for (const auto& [label, xy] : want) {
    bool found = false;
    for (const auto& v : rep.vertices)
      if (v.label == label) {
        found = true;
        if (!(v.x == xy.first && v.y == xy.second))
          return {false, std::string("vertex ") + label + " is (" +
                             num(re::to_double(v.x)) + ", " + num(re::to_double(v.y)) +
                             "), expected exact rational match"};
      }
    if (!found) return {false, std::string("vertex ") + label + " missing from report"};
  }

  const std::array<std::array<double, 2>, 8> pairs = {{{2, 3},
                                                       {2, 2},
                                                       {3, 2},
                                                       {3, 3},
                                                       {6, 2},
                                                       {1, 2},
                                                       {2, 6},
                                                       {4, 5}}};
  CounterRng rng(77);
  for (int i = 0; i < kFuzzPoints; ++i) {
    const auto& ab = pairs[static_cast<size_t>(i) % pairs.size()];
    double x = 1.2 * rng.uniform(static_cast<uint64_t>(i), 0);
    double y = 1.2 * rng.uniform(static_cast<uint64_t>(i), 1);
    if (re::in_pa(x, y, 2, ab[0], ab[1]) && !re::necessary_ok(x, y, 2, ab[0], ab[1]))
      return {false, "candidate point (" + num(x) + ", " + num(y) + ") at a=(" +
                         num(ab[0]) + "," + num(ab[1]) +
                         ") escapes the closed necessary region"};
  }
  return {true, "vertex table exact; implication held on " +
                    std::to_string(kFuzzPoints) + " fuzzed points"};
}

// 5. Concentric small-ball scaling: measured blow-up exponent 3 +- 0.2 for
//    a=(2,2) and a=(2,3) at n=2.
Outcome criterion5() {
  constexpr double kSlopeTol = 0.2;
  constexpr double kBudgetSeconds = 300.0;
  constexpr double kPredicted = 3.0;  // 2n - 1 at n = 2
  const auto t0 = Clock::now();
  const std::vector<double> deltas = halved_deltas(3, 7);

  std::string measured;
  for (const auto& ab : {std::array<double, 2>{2, 2}, std::array<double, 2>{2, 3}}) {
    bi::SharpnessOptions opt;
    opt.tolerance = kSlopeTol;
    bi::SharpnessReport rep =
        bi::sharpness_nec1(bi::SliceGeometry(2, ab[0], ab[1]), deltas, opt);
    double gap = std::abs(rep.fit.slope - kPredicted);
    if (!rep.fit.pass || gap > kSlopeTol)
      return {false, "a=(" + num(ab[0]) + "," + num(ab[1]) + "): slope " +
                         num(rep.fit.slope) + " not within " + num(kSlopeTol) +
                         " of " + num(kPredicted)};
    if (!measured.empty()) measured += ", ";
    measured += "a=(" + num(ab[0]) + "," + num(ab[1]) + ") slope " + num(rep.fit.slope);
  }
  double secs = seconds_since(t0);
  if (secs > kBudgetSeconds)
    return {false, "slopes in range but took " + num(secs) + " s > " +
                       num(kBudgetSeconds) + " s budget"};
  return {true, measured + ", " + num(secs) + " s"};
}

// 6. Thin-slab scaling: exponent n/a2 + n - 1 = 4/3 +- 0.15 for a=(2,6),
//    and the mirrored construction on a=(6,2) gives the same rate.
Outcome criterion6() {
  constexpr double kSlopeTol = 0.15;
  const double predicted = 4.0 / 3.0;  // n/a2 + n - 1 at n = 2, a2 = 6
  const std::vector<double> deltas = halved_deltas(3, 7);

  bi::SharpnessOptions opt;
  opt.tolerance = kSlopeTol;
  bi::SharpnessReport plain =
      bi::sharpness_nec2(bi::SliceGeometry(2, 2.0, 6.0), deltas, false, opt);
  if (!plain.fit.pass || std::abs(plain.fit.slope - predicted) > kSlopeTol)
    return {false, "a=(2,6): slope " + num(plain.fit.slope) + " not within " +
                       num(kSlopeTol) + " of " + num(predicted)};

  bi::SharpnessReport mirrored =
      bi::sharpness_nec2(bi::SliceGeometry(2, 6.0, 2.0), deltas, true, opt);
  if (!mirrored.fit.pass || std::abs(mirrored.fit.slope - predicted) > kSlopeTol)
    return {false, "mirrored a=(6,2): slope " + num(mirrored.fit.slope) +
                       " not within " + num(kSlopeTol) + " of " + num(predicted)};

  return {true, "slope " + num(plain.fit.slope) + ", mirrored slope " +
                    num(mirrored.fit.slope) + ", target " + num(predicted)};
}

// 7. Dyadic decay toward the flat side of the surface: L^r norms of the
//    per-shell sup-in-t fields decay geometrically in the shell index.
Outcome criterion7() {
  constexpr double kSlopeCap = -0.1;  // log2 of the per-shell norm ratio
  constexpr int kShellLo = 2;
  constexpr int kShellHi = 8;
  const double inv_p = 0.6;
  const double inv_q = 0.35;
  const double r = 1.0 / (inv_p + inv_q);

  bi::MaximalRequest req;
  req.geom = bi::SliceGeometry(2, 2.0, 4.0);
  req.f = FunctionSpec::ball(Vec(0.0, 0.0), 1.0);
  req.g = FunctionSpec::ball(Vec(0.0, 0.0), 1.0);
  req.out_grid = Grid::square(-3.0, 3.0, 31);
  req.mode = bi::MaxMode::Diagonal;
  req.sphere_resolution = 48;
  req.refine = false;

  std::vector<std::pair<double, double>> points;
  std::string norms;
  for (int k = kShellLo; k <= kShellHi; ++k) {
    req.dyadic_shell = k;
    fl::SampledField field = bi::maximal_estimate(req);
    double nk = fl::lp_norm(field, r);
    if (!(nk > 0.0)) return {false, "shell " + std::to_string(k) + " norm vanished"};
    points.emplace_back(double(k), std::log2(nk));
    if (!norms.empty()) norms += ", ";
    norms += num(nk);
  }
  maxlab::ScalingFit fit =
      maxlab::fit_linear(points, kSlopeCap, 0.0, maxlab::FitComparison::AtMost);
  if (!fit.pass)
    return {false, "log2 norm slope " + num(fit.slope) + " > cap " + num(kSlopeCap) +
                       " (norms " + norms + ")"};
  return {true, "log2 norm slope " + num(fit.slope) + " <= " + num(kSlopeCap) +
                    ", shell norms " + norms};
}

// 8. Window maximal operator of a unit interval: the L^p growth exponent in
//    the window height matches 1/p, with the flat profile bound enforced.
Outcome criterion8() {
  constexpr double kSlopeTol = 0.05;
  const std::vector<double> hs = fl::geometric_sequence(4.0, 256.0, 2.0);

  std::string measured;
  for (double p : {2.0, 4.0}) {
    maxlab::ScalingFit fit;
    try {
      fit = cu::mstar_exponent(p, hs);
    } catch (const maxlab::fit_error& e) {
      return {false, "p=" + num(p) + ": profile bound violated (" + e.what() + ")"};
    }
    double gap = std::abs(fit.slope - 1.0 / p);
    if (!fit.pass || gap > kSlopeTol)
      return {false, "p=" + num(p) + ": slope " + num(fit.slope) + " not within " +
                         num(kSlopeTol) + " of " + num(1.0 / p)};
    if (!measured.empty()) measured += ", ";
    measured += "p=" + num(p) + " slope " + num(fit.slope);
  }
  return {true, measured + ", profile bounds held"};
}

// 9. Flat curve growth under cutoff halving: ratio 2^(1/2) per halving when
//    q = 2 < m = 3, and ratios settling to 1 when q = 4 > m.
Outcome criterion9() {
  constexpr double kGrowthRelTol = 0.10;
  constexpr double kConvergedTol = 0.05;

  cu::CurveSharpnessRequest growing;
  growing.which = cu::CurveCase::FlatGrowth;
  growing.m = 3;
  growing.q = 2.0;
  cu::CurveSharpnessReport rep = cu::curve_sharpness(growing);
  const double target = std::sqrt(2.0);
  if (rep.ratios.size() < 3)
    return {false, "expected three halving ratios, got " +
                       std::to_string(rep.ratios.size())};
  std::string seen;
  for (double ratio : rep.ratios) {
    if (std::abs(ratio / target - 1.0) > kGrowthRelTol)
      return {false, "q=2 halving ratio " + num(ratio) + " not within " +
                         num(kGrowthRelTol) + " of " + num(target)};
    if (!seen.empty()) seen += ", ";
    seen += num(ratio);
  }
  if (!rep.fit.pass)
    return {false, "q=2 log-log fit rejected slope " + num(rep.fit.slope)};

  cu::CurveSharpnessRequest settled = growing;
  settled.q = 4.0;
  cu::CurveSharpnessReport rep2 = cu::curve_sharpness(settled);
  for (double ratio : rep2.ratios)
    if (std::abs(ratio - 1.0) > kConvergedTol)
      return {false, "q=4 halving ratio " + num(ratio) + " not within " +
                         num(kConvergedTol) + " of 1"};
  if (!rep2.fit.pass)
    return {false, "q=4 log-log fit rejected slope " + num(rep2.fit.slope)};

  return {true, "q=2 ratios " + seen + " track " + num(target) +
                    "; q=4 ratios settle to 1"};
}

// 10. Trilinear small-ball scaling at n=2, a=(2,2,2): measured exponent
//     3 +- 0.3 from the Monte-Carlo lower-bound experiment.
Outcome criterion10() {
  constexpr double kSlopeTol = 0.3;
  constexpr double kBudgetSeconds = 600.0;
  constexpr uint64_t kSamples = 1000000;
  constexpr double kPredicted = 3.0;  // (n-1) + n/a2 + n/a3 at n=2, a=(2,2,2)
  const auto t0 = Clock::now();

  maxlab::ScalingFit fit = mu::necessity_experiment(
      2, {2.0, 2.0, 2.0}, halved_deltas(2, 5), kSamples, 1, kSlopeTol);
  double secs = seconds_since(t0);
  double gap = std::abs(fit.slope - kPredicted);
  if (!fit.pass || gap > kSlopeTol)
    return {false, "slope " + num(fit.slope) + " not within " + num(kSlopeTol) +
                       " of " + num(kPredicted)};
  if (secs > kBudgetSeconds)
    return {false, "slope in range but took " + num(secs) + " s > " +
                       num(kBudgetSeconds) + " s budget"};
  return {true, "slope " + num(fit.slope) + ", " + num(secs) + " s"};
}

// 11. Structural invariants: dilation covariance, reflection symmetry,
//     data monotonicity, diagonal vs biparametric ordering, dilation
//     invariance of the norm ratio, and bit-identical reruns.
Outcome criterion11() {
  constexpr double kDilationRelTol = 1e-10;
  constexpr double kReflectionRelTol = 1e-12;
  constexpr double kOrderSlack = 1e-14;
  constexpr double kNormRatioRelTol = 1e-9;
  const double lambda = 2.0;

  // dilation covariance of the maximal field, and the dilation-invariant
  // norm ratio computed from the same pair of runs
  bi::MaximalRequest narrow;
  narrow.geom = bi::SliceGeometry(1, 2.0, 3.0);
  narrow.f = FunctionSpec::bump(Vec(0.3), 1.0).dilated(lambda);
  narrow.g = FunctionSpec::bump(Vec(-0.2), 0.8).dilated(lambda);
  narrow.out_grid = Grid::line(-1.0, 1.0, 9);
  narrow.t_min = 0.5;
  narrow.t_max = 2.0;
  narrow.t_ratio = std::pow(2.0, 0.25);
  narrow.refine = false;

  bi::MaximalRequest wide = narrow;
  wide.f = FunctionSpec::bump(Vec(0.3), 1.0);
  wide.g = FunctionSpec::bump(Vec(-0.2), 0.8);
  wide.out_grid = Grid::line(-2.0, 2.0, 9);
  wide.t_min = 1.0;
  wide.t_max = 4.0;

  fl::SampledField field_narrow = bi::maximal_estimate(narrow);
  fl::SampledField field_wide = bi::maximal_estimate(wide);
  for (size_t i = 0; i < field_narrow.values.size(); ++i) {
    double a = field_narrow.values[i];
    double b = field_wide.values[i];
    double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
    if (rel > kDilationRelTol)
      return {false, "dilation covariance: grid point " + std::to_string(i) +
                         " differs by relative " + num(rel)};
  }

  double ratio_narrow =
      bi::norm_ratio(narrow.f, narrow.g, 4.0, 4.0, 2.0, field_narrow);
  double ratio_wide = bi::norm_ratio(wide.f, wide.g, 4.0, 4.0, 2.0, field_wide);
  double ratio_rel = std::abs(ratio_narrow - ratio_wide) / ratio_wide;
  if (ratio_rel > kNormRatioRelTol)
    return {false, "norm ratio under dilation: " + num(ratio_narrow) + " vs " +
                       num(ratio_wide) + " (relative " + num(ratio_rel) + ")"};

  // reflection symmetry of the bilinear average through the origin
  bi::AverageRequest avg;
  avg.geom = bi::SliceGeometry(2, 2.0, 3.0);
  avg.f = FunctionSpec::bump(Vec(0.2, -0.1), 1.1);
  avg.g = FunctionSpec::bump(Vec(-0.15, 0.25), 0.9);
  avg.x = Vec(0.1, 0.2);
  avg.t1 = 0.8;
  avg.t2 = 1.25;
  bi::AverageRequest mirrored = avg;
  mirrored.f = FunctionSpec::bump(Vec(-0.2, 0.1), 1.1);
  mirrored.g = FunctionSpec::bump(Vec(0.15, -0.25), 0.9);
  mirrored.x = Vec(-0.1, -0.2);
  double v1 = bi::average_gsliced(avg);
  double v2 = bi::average_gsliced(mirrored);
  double refl_rel = std::abs(v1 - v2) / std::abs(v1);
  if (refl_rel > kReflectionRelTol)
    return {false, "reflection symmetry: values differ by relative " + num(refl_rel)};

  // pointwise monotonicity in the data, and diagonal <= biparametric
  bi::MaximalRequest small;
  small.geom = bi::SliceGeometry(2, 2.0, 3.0);
  small.f = FunctionSpec::ball(Vec(0.1, 0.0), 0.7);
  small.g = FunctionSpec::ball(Vec(0.0, 0.0), 1.0);
  small.out_grid = Grid::square(-1.0, 1.0, 5);
  small.t_ratio = std::sqrt(2.0);
  small.sphere_resolution = 48;
  small.refine = false;

  bi::MaximalRequest large = small;
  large.f = FunctionSpec::ball(Vec(0.1, 0.0), 1.1);

  fl::SampledField m_small = bi::maximal_estimate(small);
  fl::SampledField m_large = bi::maximal_estimate(large);
  for (size_t i = 0; i < m_small.values.size(); ++i)
    if (m_small.values[i] > m_large.values[i] + kOrderSlack)
      return {false, "monotonicity: enlarging the first factor lowered the field at point " +
                         std::to_string(i)};

  bi::MaximalRequest biparam = small;
  biparam.mode = bi::MaxMode::Biparam;
  fl::SampledField m_biparam = bi::maximal_estimate(biparam);
  for (size_t i = 0; i < m_small.values.size(); ++i)
    if (m_small.values[i] > m_biparam.values[i] + kOrderSlack)
      return {false, "mode ordering: diagonal exceeds biparametric at point " +
                         std::to_string(i)};

  // bit-identical reruns, including across thread counts
  mu::MultiAverageRequest tri;
  tri.n = 2;
  tri.a = {2.0, 2.0, 4.0};
  tri.fs = {FunctionSpec::bump(Vec(0.1, 0.0), 1.2),
            FunctionSpec::bump(Vec(0.0, -0.1), 1.0),
            FunctionSpec::bump(Vec(-0.1, 0.1), 1.1)};
  tri.x = Vec(0.1, 0.2);
  tri.ts = {0.8, 1.25, 1.0};
  tri.samples = 200000;
  tri.seed = 7;

  std::string saved_threads;
  if (const char* env = std::getenv("MAXLAB_THREADS")) saved_threads = env;
  setenv("MAXLAB_THREADS", "1", 1);
  maxlab::MCEstimate est1 = mu::multilinear_average(tri);
  setenv("MAXLAB_THREADS", "5", 1);
  maxlab::MCEstimate est2 = mu::multilinear_average(tri);
  fl::SampledField rerun = bi::maximal_estimate(small);
  if (saved_threads.empty())
    unsetenv("MAXLAB_THREADS");
  else
    setenv("MAXLAB_THREADS", saved_threads.c_str(), 1);

  if (est1.value != est2.value || est1.se != est2.se)
    return {false, "determinism: sampler output depends on the thread count"};
  if (!std::equal(rerun.values.begin(), rerun.values.end(), m_small.values.begin(),
                  m_small.values.end(),
                  [](double a, double b) { return a == b; }))
    return {false, "determinism: rerun of the maximal field is not bit-identical"};

  return {true, "dilation, reflection, monotonicity, mode ordering, norm ratio, "
                "determinism all hold"};
}

Outcome run_criterion(int k) {
  switch (k) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
    case 11: return criterion11();
    default: return {false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..11>\n", argv[0]);
    return 2;
  }
  int k = std::atoi(argv[1]);
  if (k < 1 || k > 11) {
    std::fprintf(stderr, "criterion must be between 1 and 11\n");
    return 2;
  }
  Outcome out;
  try {
    out = run_criterion(k);
  } catch (const std::exception& e) {
    out = {false, std::string("unexpected exception: ") + e.what()};
  }
  std::printf("criterion %d: %s (%s)\n", k, out.pass ? "PASS" : "FAIL",
              out.detail.c_str());
  return out.pass ? 0 : 1;
}
