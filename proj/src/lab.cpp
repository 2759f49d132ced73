#include "maxlab/lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maxlab/bilinear.hpp"
#include "maxlab/curves.hpp"
#include "maxlab/multilinear.hpp"
#include "maxlab/regions.hpp"

namespace maxlab::lab {

namespace {

namespace fsys = std::filesystem;
using nlohmann::ordered_json;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// shortest round-trip decimal form
std::string fmt(double v) {
  char b[48];
  auto r = std::to_chars(b, b + sizeof b, v);
  return std::string(b, r.ptr);
}

std::string fmt4(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

std::string join_numbers(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += fmt(vs[i]);
  }
  return out;
}

std::string rat_str(const regions::Rat& r) {
  std::string s = std::to_string(r.numerator());
  if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
  return s;
}

// ---------------------------------------------------------------- svg

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

std::string px(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

struct Svg {
  std::ostringstream o;
  Svg(int w, int h) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke,
            double sw, const char* dash = nullptr) {
    o << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\""
      << px(x2) << "\" y2=\"" << px(y2) << "\" stroke=\"" << stroke
      << "\" stroke-width=\"" << px(sw) << "\"";
    if (dash) o << " stroke-dasharray=\"" << dash << "\"";
    o << "/>\n";
  }
  void poly(const std::vector<std::pair<double, double>>& pts,
            const char* fill, double fill_opacity, const char* stroke,
            bool closed) {
    if (pts.empty()) return;
    o << (closed ? "<polygon" : "<polyline") << " points=\"";
    for (auto& [x, y] : pts) o << px(x) << "," << px(y) << " ";
    o << "\" fill=\"" << fill << "\"";
    if (fill_opacity < 1.0) o << " fill-opacity=\"" << px(fill_opacity) << "\"";
    o << " stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
  }
  void circle(double cx, double cy, double r, const char* fill) {
    o << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy) << "\" r=\""
      << px(r) << "\" fill=\"" << fill << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill) {
    o << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w)
      << "\" height=\"" << px(h) << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size,
            const char* anchor = "start", const char* fill = "#1a1a1a") {
    o << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\""
      << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
      << "\">" << svg_escape(s) << "</text>\n";
  }
  std::string str() { return o.str() + "</svg>\n"; }
};

struct Frame {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  // data window
  double L = 62, R = 18, T = 40, B = 52;  // pixel margins
  int W = 560, H = 420;

  double X(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
  double Y(double y) const {
    return H - B - (y - y0) / (y1 - y0) * (H - T - B);
  }
};

void pad_range(double& lo, double& hi, double frac) {
  if (!(hi > lo)) {
    double c = lo;
    lo = c - 1.0;
    hi = c + 1.0;
    return;
  }
  double p = (hi - lo) * frac;
  lo -= p;
  hi += p;
}

void draw_axes(Svg& svg, const Frame& f, const std::string& x_label,
               const std::string& y_label, const std::string& title,
               const std::function<std::string(double)>& tick_fmt) {
  svg.o << "<rect x=\"" << px(f.L) << "\" y=\"" << px(f.T) << "\" width=\""
        << px(f.W - f.L - f.R) << "\" height=\"" << px(f.H - f.T - f.B)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double tx = f.x0 + (f.x1 - f.x0) * i / 4.0;
    double ty = f.y0 + (f.y1 - f.y0) * i / 4.0;
    double X = f.X(tx), Y = f.Y(ty);
    if (i > 0 && i < 4) {
      svg.line(X, f.T, X, f.H - f.B, "#e5e5e5", 0.8);
      svg.line(f.L, Y, f.W - f.R, Y, "#e5e5e5", 0.8);
    }
    svg.line(X, f.H - f.B, X, f.H - f.B + 4, "#444444", 1);
    svg.text(X, f.H - f.B + 17, tick_fmt(tx), 11, "middle");
    svg.line(f.L - 4, Y, f.L, Y, "#444444", 1);
    svg.text(f.L - 7, Y + 4, tick_fmt(ty), 11, "end");
  }
  svg.text((f.L + f.W - f.R) / 2.0, f.H - 14, x_label, 12, "middle");
  svg.text(f.L, f.T - 8, y_label, 12, "start");
  svg.text(f.W / 2.0, 20, title, 13, "middle");
}

std::string comparison_text(const ScalingFit& fit) {
  std::string rel = fit.comparison == FitComparison::AtMost
                        ? "<="
                        : fit.comparison == FitComparison::AtLeast ? ">=" : "~";
  return "slope " + fmt4(fit.slope) + "  predicted " + rel + " " +
         fmt4(fit.predicted_slope) +
         (fit.tolerance > 0 ? " tol " + fmt4(fit.tolerance) : "") +
         (fit.pass ? "  [pass]" : "  [fail]");
}

std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r = static_cast<int>(std::lround(16 + t * (255 - 16)));
  int g = static_cast<int>(std::lround(36 + t * (209 - 36)));
  int b = static_cast<int>(std::lround(62 + t * (102 - 62)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string summary_svg(const std::string& title,
                        const std::vector<std::string>& lines) {
  Svg svg(560, 70 + 22 * static_cast<int>(lines.size()));
  svg.text(280, 28, title, 14, "middle");
  for (size_t i = 0; i < lines.size(); ++i)
    svg.text(40, 58 + 22 * static_cast<double>(i), lines[i], 12);
  return svg.str();
}

// keep a*x + b*y <= c
std::vector<std::pair<double, double>> clip_halfplane(
    const std::vector<std::pair<double, double>>& pts, double a, double b,
    double c) {
  std::vector<std::pair<double, double>> out;
  size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    auto [x1, y1] = pts[i];
    auto [x2, y2] = pts[(i + 1) % n];
    double d1 = a * x1 + b * y1 - c;
    double d2 = a * x2 + b * y2 - c;
    if (d1 <= 0) out.push_back(pts[i]);
    if ((d1 < 0 && d2 > 0) || (d1 > 0 && d2 < 0)) {
      double t = d1 / (d1 - d2);
      out.push_back({x1 + t * (x2 - x1), y1 + t * (y2 - y1)});
    }
  }
  return out;
}

Svg unit_square_plot(const Frame& f, const std::string& title) {
  Svg svg(560, 560);
  svg.o << "<rect x=\"" << px(f.L) << "\" y=\"" << px(f.T) << "\" width=\""
        << px(f.W - f.L - f.R) << "\" height=\"" << px(f.H - f.T - f.B)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double t = i / 4.0;
    double X = f.X(t), Y = f.Y(t);
    svg.line(X, f.T, X, f.H - f.B, "#e5e5e5", 0.8);
    svg.line(f.L, Y, f.W - f.R, Y, "#e5e5e5", 0.8);
    svg.line(X, f.H - f.B, X, f.H - f.B + 4, "#444444", 1);
    svg.text(X, f.H - f.B + 17, fmt4(t), 11, "middle");
    svg.line(f.L - 4, Y, f.L, Y, "#444444", 1);
    svg.text(f.L - 7, Y + 4, fmt4(t), 11, "end");
  }
  svg.text((f.L + f.W - f.R) / 2.0, f.H - 14, "1/p", 12, "middle");
  svg.text(f.L, f.T - 8, "1/q", 12, "start");
  svg.text(f.W / 2.0, 20, title, 13, "middle");
  return svg;
}

Frame unit_frame() {
  Frame f;
  f.W = 560;
  f.H = 560;
  f.x0 = -0.06;
  f.x1 = 1.08;
  f.y0 = -0.06;
  f.y1 = 1.08;
  f.T = 46;
  f.B = 56;
  return f;
}

void shade_polygon(Svg& svg, const Frame& f,
                   const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> px_pts;
  px_pts.reserve(pts.size());
  for (auto& [x, y] : pts) px_pts.push_back({f.X(x), f.Y(y)});
  svg.poly(px_pts, "#9db8d9", 0.55, "#3b5b85", true);
}

// ---------------------------------------------------------------- csv

std::string pairs_csv(const std::string& header,
                      const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream os;
  os << header << "\n";
  for (auto& [a, b] : rows) os << fmt(a) << "," << fmt(b) << "\n";
  return os.str();
}

std::string named_csv(
    const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream os;
  os << "name,value\n";
  for (auto& [k, v] : rows) os << k << "," << fmt(v) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- misc

ordered_json fit_json(const ScalingFit& fit) {
  ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["slope_se"] = fit.slope_se;
  j["residual"] = fit.residual;
  j["predicted_slope"] = fit.predicted_slope;
  j["tolerance"] = fit.tolerance;
  j["comparison"] = fit.comparison == FitComparison::AtMost
                        ? "at-most"
                        : fit.comparison == FitComparison::AtLeast
                              ? "at-least"
                              : "two-sided";
  j["pass"] = fit.pass;
  ordered_json pts = ordered_json::array();
  for (auto& [x, y] : fit.points) pts.push_back({x, y});
  j["points"] = pts;
  return j;
}

Vec vec_from(const std::vector<double>& v, int n) {
  require(static_cast<int>(v.size()) == n, "x must list one coordinate per axis");
  Vec out = zero_vec(n);
  for (int i = 0; i < n; ++i) out[i] = v[static_cast<size_t>(i)];
  return out;
}

std::string zeros_text(int n) {
  return n == 1 ? "0" : n == 2 ? "0,0" : "0,0,0";
}

fields::Grid grid_from(const std::vector<double>& spec, int n) {
  if (spec.size() != 3)
    throw config_error("grid wants three numbers: lo, hi, count");
  int count = static_cast<int>(std::lround(spec[2]));
  require(count >= 2, "grid count must be >= 2");
  switch (n) {
    case 1: return fields::Grid::line(spec[0], spec[1], count);
    case 2: return fields::Grid::square(spec[0], spec[1], count);
    default: return fields::Grid::cube(spec[0], spec[1], count);
  }
}

curves::CurveFn parse_curve(const std::string& text) {
  auto toks = split_ws(text);
  if (toks.empty()) throw config_error("empty curve description");
  std::string kind = lower(toks[0]);
  if (kind == "identity") return curves::CurveFn::identity();
  if (kind == "poly") {
    if (toks.size() < 2) throw config_error("poly curve wants coefficients");
    std::vector<double> c;
    for (size_t i = 1; i < toks.size(); ++i) c.push_back(parse_number(toks[i]));
    return curves::CurveFn::polynomial(c);
  }
  if (kind == "flat") {
    if (toks.size() < 5)
      throw config_error("flat curve wants: c_star s0 m phi0 [phi1 ...]");
    double c_star = parse_number(toks[1]);
    double s0 = parse_number(toks[2]);
    int m = static_cast<int>(std::lround(parse_number(toks[3])));
    std::vector<double> phi;
    for (size_t i = 4; i < toks.size(); ++i) phi.push_back(parse_number(toks[i]));
    return curves::CurveFn::flat_point(c_star, s0, m, phi);
  }
  throw config_error("unknown curve kind '" + toks[0] + "'");
}

struct RunCtx {
  const ExperimentConfig& cfg;
  fsys::path dir;
  ordered_json results;
  std::vector<std::string> artifacts;

  void emit(const std::string& name, const std::string& content) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw config_error("cannot write " + (dir / name).string());
    os << content;
    artifacts.push_back(name);
  }
  void emit_field(const std::string& base, const fields::SampledField& field,
                  const std::string& title) {
    std::ostringstream csv;
    fields::write_csv(field, csv);
    emit(base + ".csv", csv.str());
    emit(base + ".svg", field_svg(field, title));
  }
};

// ------------------------------------------------------- experiment kinds

int run_bilinear_average(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 2) throw config_error("bilinear-average wants two exponents");
  bilinear::AverageRequest req;
  req.geom = bilinear::SliceGeometry(n, a[0], a[1]);
  req.f = parse_function(cfg.require_string("f"), n);
  req.g = parse_function(cfg.require_string("g"), n);
  req.x = vec_from(cfg.get_list("x", zeros_text(n)), n);
  req.t1 = cfg.get_number("t1", 1.0);
  req.t2 = cfg.get_number("t2", 1.0);
  req.normalized = cfg.get_bool("normalized", true);
  req.sphere_resolution = cfg.get_int("sphere_resolution", 96);
  req.radial_depth = cfg.get_int("radial_depth", 40);
  double path_tol = cfg.get_number("path_tolerance", 1e-4);
  uint64_t samples = static_cast<uint64_t>(cfg.get_number("samples", 0));
  uint64_t seed = static_cast<uint64_t>(cfg.get_number("seed", 1));

  double gs = bilinear::average_gsliced(req);
  double fsv = bilinear::average_fsliced(req);
  double rel = std::abs(gs - fsv) / std::max(std::abs(gs), 1e-300);
  ctx.results["value"] = gs;
  ctx.results["second_path"] = fsv;
  ctx.results["path_disagreement"] = rel;
  bool ok = rel <= path_tol;

  if (samples > 0) {
    MCEstimate o = bilinear::average_param_oracle(req, samples, seed);
    if (req.normalized) {
      double mass = bilinear::surface_mass(req.geom);
      o.value /= mass;
      o.se /= mass;
    }
    double dev = o.se > 0 ? (gs - o.value) / o.se : 0.0;
    ctx.results["oracle"] = o.value;
    ctx.results["oracle_se"] = o.se;
    ctx.results["oracle_deviation"] = dev;
    ok = ok && std::abs(dev) <= 3.0;
  }

  // diagonal dilation sweep around the requested (t1, t2)
  std::vector<std::pair<double, double>> sweep;
  for (double lam : fields::geometric_sequence(0.25, 4.0, std::pow(2.0, 0.125))) {
    bilinear::AverageRequest r2 = req;
    r2.t1 = req.t1 * lam;
    r2.t2 = req.t2 * lam;
    sweep.push_back({lam, bilinear::average_gsliced(r2)});
  }
  ctx.emit("sweep.csv", pairs_csv("lambda,value", sweep));
  std::vector<std::pair<double, double>> logs;
  for (auto& [lam, v] : sweep) logs.push_back({std::log2(lam), v});
  ScalingFit dummy;
  dummy.points = logs;
  dummy.slope = 0;
  dummy.intercept = 0;
  dummy.pass = ok;
  ctx.emit("sweep.svg",
           scaling_fit_svg(dummy, "log2 dilation", "average value", false,
                           "bilinear average under diagonal dilation"));
  return ok ? 0 : 1;
}

int run_bilinear_maximal(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 2) throw config_error("bilinear-maximal wants two exponents");
  bilinear::MaximalRequest req;
  req.geom = bilinear::SliceGeometry(n, a[0], a[1]);
  req.f = parse_function(cfg.require_string("f"), n);
  req.g = parse_function(cfg.require_string("g"), n);
  std::string grid_def = n == 1 ? "-2,2,129" : n == 2 ? "-2,2,33" : "-2,2,9";
  req.out_grid = grid_from(cfg.get_list("grid", grid_def), n);
  req.t_min = cfg.get_number("t_min", 0.25);
  req.t_max = cfg.get_number("t_max", 4.0);
  req.t_ratio = cfg.get_number("t_ratio", std::pow(2.0, 0.125));
  std::string mode = lower(cfg.get_string("mode", "diagonal"));
  if (mode != "diagonal" && mode != "biparam")
    throw config_error("mode must be diagonal or biparam");
  req.mode = mode == "diagonal" ? bilinear::MaxMode::Diagonal
                                : bilinear::MaxMode::Biparam;
  req.normalized = cfg.get_bool("normalized", true);
  req.sphere_resolution = cfg.get_int("sphere_resolution", 64);
  req.dyadic_shell = cfg.get_int("dyadic_shell", 0);
  req.refine = cfg.get_bool("refine", true);

  fields::SampledField field = bilinear::maximal_estimate(req);
  double vmax = 0.0;
  for (double v : field.values) vmax = std::max(vmax, v);
  ctx.results["max_value"] = vmax;
  if (cfg.has("p") && cfg.has("q")) {
    double p = cfg.require_number("p");
    double q = cfg.require_number("q");
    double r = 1.0 / (1.0 / p + 1.0 / q);
    ctx.results["norm_ratio"] =
        bilinear::norm_ratio(req.f, req.g, p, q, r, field);
  }
  ctx.emit_field("field", field, "bilinear maximal field (" + mode + ")");
  return 0;
}

int run_dyadic_decay(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 2) throw config_error("dyadic-decay wants two exponents");
  double inv_p = cfg.get_number("inv_p", 0.6);
  double inv_q = cfg.get_number("inv_q", 0.35);
  require(inv_p > 0 && inv_q > 0 && inv_p + inv_q <= 1.0,
          "dyadic-decay: need 0 < 1/p, 1/q with 1/p + 1/q <= 1");
  double r = 1.0 / (inv_p + inv_q);
  std::string ball_def = std::string("ball ") + (n == 1 ? "0" : n == 2 ? "0 0" : "0 0 0") + " 1";
  bilinear::MaximalRequest base;
  base.geom = bilinear::SliceGeometry(n, a[0], a[1]);
  base.f = parse_function(cfg.get_string("f", ball_def), n);
  base.g = parse_function(cfg.get_string("g", ball_def), n);
  std::string grid_def = n == 1 ? "-3,3,121" : n == 2 ? "-3,3,31" : "-3,3,9";
  base.out_grid = grid_from(cfg.get_list("grid", grid_def), n);
  base.t_min = cfg.get_number("t_min", 0.25);
  base.t_max = cfg.get_number("t_max", 4.0);
  base.t_ratio = cfg.get_number("t_ratio", std::pow(2.0, 0.125));
  base.sphere_resolution = cfg.get_int("sphere_resolution", 48);
  base.refine = cfg.get_bool("refine", false);
  double slope_cap = cfg.get_number("slope_cap", -0.1);

  auto ks = cfg.get_list("ks", "2,3,4,5,6,7,8");
  if (ks.size() < 3) throw config_error("dyadic-decay wants at least 3 shells");
  std::vector<std::pair<double, double>> norms, lognorms;
  for (double kd : ks) {
    int k = static_cast<int>(std::lround(kd));
    bilinear::MaximalRequest rq = base;
    rq.dyadic_shell = k;
    fields::SampledField piece = bilinear::maximal_estimate(rq);
    double nk = fields::lp_norm(piece, r);
    norms.push_back({static_cast<double>(k), nk});
    if (!(nk > 0)) throw fit_error("dyadic-decay: vanished piece norm");
    lognorms.push_back({static_cast<double>(k), std::log2(nk)});
  }
  ScalingFit fit = fit_linear(lognorms, slope_cap, 0.0, FitComparison::AtMost);
  ctx.results["r"] = r;
  ctx.results["fit"] = fit_json(fit);
  ctx.emit("norms.csv", pairs_csv("k,piece_norm", norms));
  ctx.emit("decay.svg",
           scaling_fit_svg(fit, "shell k", "log2 ||piece||_r", false,
                           "dyadic piece decay in L^r"));
  return fit.pass ? 0 : 1;
}

int run_sharpness(RunCtx& ctx, bool second_kind) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 2) throw config_error("sharpness wants two exponents");
  bilinear::SliceGeometry geom(n, a[0], a[1]);
  auto deltas = cfg.get_list("deltas", "2^-3..2^-7");
  bilinear::SharpnessOptions opt;
  opt.radii = cfg.get_int("radii", 3);
  opt.tolerance = cfg.get_number("tolerance", second_kind ? 0.15 : 0.2);
  opt.sphere_scale = cfg.get_int("sphere_scale", 128);
  bool mirrored = cfg.get_bool("mirrored", false);

  bilinear::SharpnessReport rep =
      second_kind ? bilinear::sharpness_nec2(geom, deltas, mirrored, opt)
                  : bilinear::sharpness_nec1(geom, deltas, opt);
  ctx.results["s_star"] = rep.s_star;
  ctx.results["fit"] = fit_json(rep.fit);
  ctx.emit("rows.csv", pairs_csv("delta,value", rep.rows));
  ctx.emit("scaling.svg",
           scaling_fit_svg(rep.fit, "delta", "measured value", true,
                           second_kind ? "thin-slab lower bound scaling"
                                       : "concentric lower bound scaling"));
  return rep.fit.pass ? 0 : 1;
}

int run_l1_failure(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 2) throw config_error("l1-failure wants two exponents");
  bilinear::SliceGeometry geom(n, a[0], a[1]);
  auto scales = cfg.get_list("scales", "4,8,16,32,64");
  double pin = cfg.get_number("min_ratio", 0.05);
  bilinear::L1FailureReport rep = bilinear::l1_failure_probe(geom, scales);
  ctx.results["min_pointwise_ratio"] = rep.min_pointwise_ratio;
  ctx.results["fit"] = fit_json(rep.fit);
  ordered_json masses = ordered_json::array();
  for (auto& [R, m] : rep.masses) masses.push_back({R, m});
  ctx.results["masses"] = masses;
  ctx.results["probe_pass"] = rep.pass;
  ctx.emit("masses.csv", pairs_csv("R,l1_mass", rep.masses));
  ctx.emit("growth.svg",
           scaling_fit_svg(rep.fit, "ln R", "L1 mass on [-R,R]^n", false,
                           "logarithmic mass growth of the maximal field"));
  return (rep.pass && rep.min_pointwise_ratio >= pin) ? 0 : 1;
}

int run_curve_maximal(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  curves::CurveMaximalRequest req;
  req.curve.gamma2 = parse_curve(cfg.require_string("gamma2"));
  req.curve.psi.center = cfg.get_number("psi_center", 0.5);
  req.curve.psi.width = cfg.get_number("psi_width", 0.25);
  req.curve.psi.one_sided_right = cfg.get_bool("psi_one_sided", false);
  req.f = parse_function(cfg.require_string("f"), 1);
  req.g = parse_function(cfg.require_string("g"), 1);
  req.out_grid = grid_from(cfg.get_list("grid", "-2,2,161"), 1);
  req.t_min = cfg.get_number("t_min", 0.25);
  req.t_max = cfg.get_number("t_max", 4.0);
  req.t_ratio = cfg.get_number("t_ratio", std::pow(2.0, 0.125));
  std::string mode = lower(cfg.get_string("mode", "diagonal"));
  if (mode != "diagonal" && mode != "biparam")
    throw config_error("mode must be diagonal or biparam");
  req.mode = mode == "diagonal" ? bilinear::MaxMode::Diagonal
                                : bilinear::MaxMode::Biparam;
  req.cells = cfg.get_int("cells", 64);
  req.nodes = cfg.get_int("nodes", 5);

  double s0 = cfg.get_number("s0", req.curve.psi.center);
  curves::TypeReport type = curves::detect_type(req.curve, s0);
  ctx.results["type_order"] = type.m;
  ctx.results["derivative_magnitudes"] = type.derivative_magnitudes;

  fields::SampledField field = curves::curve_maximal(req);
  double vmax = 0.0;
  for (double v : field.values) vmax = std::max(vmax, v);
  ctx.results["max_value"] = vmax;
  ctx.emit_field("field", field, "curve maximal field (" + mode + ")");
  return 0;
}

int run_mstar_exponent(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  auto ps = cfg.get_list("ps", "2,4");
  auto hs = cfg.get_list("hs", "2^2..2^8");
  bool all_pass = !ps.empty();
  ordered_json per_p = ordered_json::array();
  for (double p : ps) {
    ScalingFit fit = curves::mstar_exponent(p, hs);
    ordered_json j;
    j["p"] = p;
    j["fit"] = fit_json(fit);
    per_p.push_back(j);
    all_pass = all_pass && fit.pass;
    std::string tag = fmt(p);
    for (char& c : tag)
      if (c == '.') c = '_';
    ctx.emit("norms_p" + tag + ".csv", pairs_csv("h,norm", fit.points));
    ctx.emit("scaling_p" + tag + ".svg",
             scaling_fit_svg(fit, "h", "||off-center max||_p", true,
                             "off-center operator growth, p = " + fmt(p)));
  }
  ctx.results["fits"] = per_p;
  return all_pass ? 0 : 1;
}

int run_curve_sharpness(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  curves::CurveSharpnessRequest req;
  std::string which = lower(cfg.get_string("case", "flat-growth"));
  if (which == "flat-growth") req.which = curves::CurveCase::FlatGrowth;
  else if (which == "joint-divergence")
    req.which = curves::CurveCase::JointDivergence;
  else if (which == "nondegenerate-bound")
    req.which = curves::CurveCase::NondegenerateBound;
  else
    throw config_error("case must be flat-growth, joint-divergence, or nondegenerate-bound");
  req.m = cfg.get_int("m", 3);
  req.p = cfg.get_number("p", 2.0);
  req.q = cfg.get_number("q", 2.0);
  req.ratio_tolerance = cfg.get_number("ratio_tolerance", 0.10);
  if (cfg.has("etas")) req.etas = cfg.require_list("etas");
  double bound_cap = cfg.get_number("bound_cap", 3.2);

  curves::CurveSharpnessReport rep = curves::curve_sharpness(req);
  if (req.which == curves::CurveCase::NondegenerateBound) {
    ctx.results["bound_ratio"] = rep.bound_ratio;
    ctx.results["bound_cap"] = bound_cap;
    ctx.emit("bound.csv",
             named_csv({{"bound_ratio", rep.bound_ratio}, {"cap", bound_cap}}));
    ctx.emit("bound.svg",
             summary_svg("pointwise product bound",
                         {"max field / min(Mf sup g, sup f Mg) = " +
                              fmt4(rep.bound_ratio),
                          "acceptance cap = " + fmt4(bound_cap)}));
    return (rep.bound_ratio > 0 && rep.bound_ratio <= bound_cap) ? 0 : 1;
  }
  ctx.results["rows"] = [&] {
    ordered_json rows = ordered_json::array();
    for (auto& [e, v] : rep.rows) rows.push_back({e, v});
    return rows;
  }();
  ctx.results["ratios"] = rep.ratios;
  ctx.results["predicted_ratio"] = rep.predicted_ratio;
  ctx.results["divergent"] = rep.divergent;
  ctx.results["fit"] = fit_json(rep.fit);
  ctx.emit("rows.csv", pairs_csv("eta,value", rep.rows));
  ctx.emit("scaling.svg",
           scaling_fit_svg(rep.fit, "eta",
                           which == "flat-growth" ? "integral" : "increment",
                           true, "cutoff scaling, " + which));
  return rep.fit.pass ? 0 : 1;
}

int run_trilinear_average(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  multilinear::MultiAverageRequest req;
  req.n = cfg.get_int("n", 2);
  req.a = cfg.require_list("a");
  if (req.a.size() != 3) throw config_error("trilinear-average wants three exponents");
  req.fs = {parse_function(cfg.require_string("f1"), req.n),
            parse_function(cfg.require_string("f2"), req.n),
            parse_function(cfg.require_string("f3"), req.n)};
  req.x = vec_from(cfg.get_list("x", zeros_text(req.n)), req.n);
  auto ts = cfg.get_list("ts", "1,1,1");
  if (ts.size() != 3) throw config_error("ts wants three dilations");
  req.ts = ts;
  req.pivot = cfg.get_int("pivot", 1);
  req.samples = static_cast<uint64_t>(cfg.get_number("samples", 1000000));
  req.seed = static_cast<uint64_t>(cfg.get_number("seed", 1));
  req.normalized = cfg.get_bool("normalized", true);
  req.sphere_resolution = cfg.get_int("sphere_resolution", 64);
  req.tolerance = cfg.get_number("tolerance", 0.0);

  MCEstimate est = multilinear::multilinear_average(req);
  ctx.results["value"] = est.value;
  ctx.results["se"] = est.se;
  ctx.results["samples"] = est.samples;
  std::vector<std::string> lines{"value = " + fmt(est.value) + "  (se " +
                                 fmt4(est.se) + ")"};
  std::vector<std::pair<std::string, double>> rows{{"value", est.value},
                                                   {"se", est.se}};
  bool ok = true;
  if (cfg.get_bool("oracle", true)) {
    double o = multilinear::trilinear_radial_oracle(
        req, cfg.get_int("oracle_depth", 30), cfg.get_int("oracle_cells", 48),
        cfg.get_int("oracle_nodes", 6));
    double dev = est.se > 0 ? (est.value - o) / est.se : 0.0;
    ctx.results["oracle"] = o;
    ctx.results["oracle_deviation"] = dev;
    rows.push_back({"oracle", o});
    lines.push_back("radial oracle = " + fmt(o) + "  (deviation " + fmt4(dev) +
                    " se)");
    ok = ok && std::abs(dev) <= 3.0;
  }
  if (cfg.get_bool("pivot_check", false)) {
    multilinear::MultiAverageRequest alt = req;
    alt.pivot = req.pivot % 3 + 1;
    MCEstimate est2 = multilinear::multilinear_average(alt);
    double joint = std::hypot(est.se, est2.se);
    double dev = joint > 0 ? (est.value - est2.value) / joint : 0.0;
    ctx.results["pivot_alt_value"] = est2.value;
    ctx.results["pivot_alt_deviation"] = dev;
    rows.push_back({"pivot_alt", est2.value});
    lines.push_back("pivot " + std::to_string(alt.pivot) + " = " +
                    fmt(est2.value) + "  (deviation " + fmt4(dev) + " se)");
    ok = ok && std::abs(dev) <= 3.0;
  }
  ctx.emit("values.csv", named_csv(rows));
  ctx.emit("summary.svg", summary_svg("trilinear average", lines));
  return ok ? 0 : 1;
}

int run_trilinear_necessity(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  auto a = cfg.require_list("a");
  if (a.size() != 3) throw config_error("trilinear-necessity wants three exponents");
  auto deltas = cfg.get_list("deltas", "2^-2..2^-5");
  uint64_t samples = static_cast<uint64_t>(cfg.get_number("samples", 1000000));
  uint64_t seed = static_cast<uint64_t>(cfg.get_number("seed", 1));
  double tolerance = cfg.get_number("tolerance", 0.3);
  ScalingFit fit =
      multilinear::necessity_experiment(n, a, deltas, samples, seed, tolerance);
  ctx.results["fit"] = fit_json(fit);
  ctx.emit("rows.csv", pairs_csv("delta,value", fit.points));
  ctx.emit("scaling.svg",
           scaling_fit_svg(fit, "delta", "lower-bound value", true,
                           "small-ball trilinear scaling"));
  return fit.pass ? 0 : 1;
}

int run_region_report(RunCtx& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  int n = cfg.get_int("n", 2);
  if (cfg.has("m")) {
    int m = cfg.get_int("m", 2);
    std::string style = lower(cfg.get_string("curve_region", "interior"));
    bool one_sided = style == "one-sided";
    if (!one_sided && style != "interior")
      throw config_error("curve_region must be interior or one-sided");
    regions::Poly2 poly = one_sided ? regions::curve_polygon_onesided(m)
                                    : regions::curve_polygon_interior(m);
    ordered_json verts = ordered_json::array();
    std::ostringstream csv;
    csv << "x,y\n";
    for (auto& [x, y] : poly.pts) {
      verts.push_back({x, y});
      csv << fmt(x) << "," << fmt(y) << "\n";
    }
    ctx.results["m"] = m;
    ctx.results["style"] = style;
    ctx.results["vertices"] = verts;
    ctx.emit("vertices.csv", csv.str());
    ctx.emit("region.svg", curve_region_svg(m, one_sided));
    return 0;
  }
  auto a = cfg.require_list("a");
  if (a.size() == 2) {
    regions::RegionReport rep = regions::region_report(n, a[0], a[1]);
    ctx.results["case"] = std::string(1, static_cast<char>(
                                             'A' + static_cast<int>(rep.kind)));
    ctx.results["mirrored"] = rep.mirrored;
    ctx.results["subcase_open"] = rep.subcase_open;
    ordered_json verts = ordered_json::array();
    std::ostringstream csv;
    csv << "label,x,y\n";
    for (auto& v : rep.vertices) {
      ordered_json jv;
      jv["label"] = v.label;
      jv["x"] = rat_str(v.x);
      jv["y"] = rat_str(v.y);
      verts.push_back(jv);
      csv << v.label << "," << fmt(regions::to_double(v.x)) << ","
          << fmt(regions::to_double(v.y)) << "\n";
    }
    ctx.results["vertices"] = verts;
    ctx.emit("vertices.csv", csv.str());
    ctx.emit("region.svg", region_svg(n, a[0], a[1]));
    return 0;
  }
  if (a.size() == 3) {
    double x3 = cfg.get_number("x3", 0.0);
    ordered_json caps = ordered_json::array();
    std::ostringstream csv;
    csv << "i,one_over_p3\n";
    for (int i = 1; i <= 3; ++i) {
      double v = regions::trilinear_one_over_p3(i, n, a[0], a[1], a[2]);
      ordered_json jv;
      jv["i"] = i;
      jv["value"] = v;
      try {
        regions::Rat rv = regions::trilinear_one_over_p3(
            i, n, regions::rat_from_double(a[0]), regions::rat_from_double(a[1]),
            regions::rat_from_double(a[2]));
        jv["exact"] = rat_str(rv);
      } catch (const domain_error&) {
        // exponents without small rational form; decimal value stands
      }
      caps.push_back(jv);
      csv << i << "," << fmt(v) << "\n";
    }
    ctx.results["coordinate_caps"] = caps;
    ctx.results["slice_x3"] = x3;
    ctx.emit("caps.csv", csv.str());
    ctx.emit("region.svg", trilinear_slice_svg(n, a[0], a[1], a[2], x3));
    return 0;
  }
  throw config_error("region-report wants two or three exponents, or m");
}

}  // namespace

// ------------------------------------------------------------ config

bool ExperimentConfig::has(const std::string& key) const {
  return values.count(key) > 0;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& def) const {
  auto it = values.find(key);
  std::string v = it == values.end() ? def : it->second;
  resolved[key] = v;
  return v;
}

double ExperimentConfig::get_number(const std::string& key, double def) const {
  auto it = values.find(key);
  double v = it == values.end() ? def : parse_number(it->second);
  resolved[key] = fmt(v);
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int def) const {
  auto it = values.find(key);
  double v = it == values.end() ? static_cast<double>(def)
                                : parse_number(it->second);
  int iv = static_cast<int>(std::lround(v));
  if (std::abs(v - iv) > 1e-9)
    throw config_error("key '" + key + "' wants an integer");
  resolved[key] = std::to_string(iv);
  return iv;
}

bool ExperimentConfig::get_bool(const std::string& key, bool def) const {
  auto it = values.find(key);
  bool v = def;
  if (it != values.end()) {
    std::string t = lower(trim(it->second));
    if (t == "true" || t == "1" || t == "yes") v = true;
    else if (t == "false" || t == "0" || t == "no") v = false;
    else
      throw config_error("key '" + key + "' wants a boolean");
  }
  resolved[key] = v ? "true" : "false";
  return v;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               const std::string& def_text) const {
  auto it = values.find(key);
  std::vector<double> v =
      parse_number_list(it == values.end() ? def_text : it->second);
  resolved[key] = join_numbers(v);
  return v;
}

std::string ExperimentConfig::require_string(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw config_error("missing config key '" + key + "'");
  resolved[key] = it->second;
  return it->second;
}

double ExperimentConfig::require_number(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw config_error("missing config key '" + key + "'");
  double v = parse_number(it->second);
  resolved[key] = fmt(v);
  return v;
}

std::vector<double> ExperimentConfig::require_list(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw config_error("missing config key '" + key + "'");
  std::vector<double> v = parse_number_list(it->second);
  resolved[key] = join_numbers(v);
  return v;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // comments start a line or follow whitespace
    size_t pos = 0;
    while (true) {
      pos = line.find('#', pos);
      if (pos == std::string::npos) break;
      if (pos == 0 || line[pos - 1] == ' ' || line[pos - 1] == '\t') {
        line.resize(pos);
        break;
      }
      ++pos;
    }
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw config_error("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw config_error("line " + std::to_string(lineno) + ": empty key");
    if (key == "kind" && section.empty()) {
      if (!cfg.kind.empty())
        throw config_error("line " + std::to_string(lineno) + ": duplicate kind");
      cfg.kind = val;
      continue;
    }
    std::string full = section.empty() ? key : section + "." + key;
    if (!cfg.values.emplace(full, val).second)
      throw config_error("line " + std::to_string(lineno) + ": duplicate key '" +
                         full + "'");
  }
  if (cfg.kind.empty()) throw config_error("config has no kind");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  return parse_config(in);
}

double parse_number(const std::string& token) {
  std::string t = trim(token);
  if (t.empty()) throw config_error("empty number token");
  size_t slash = t.find('/');
  if (slash != std::string::npos) {
    double den = parse_number(t.substr(slash + 1));
    if (den == 0.0) throw config_error("zero denominator in '" + t + "'");
    return parse_number(t.substr(0, slash)) / den;
  }
  size_t caret = t.find('^');
  if (caret != std::string::npos) {
    std::string base = t.substr(0, caret);
    bool neg = false;
    if (!base.empty() && base[0] == '-') {
      neg = true;
      base = base.substr(1);
    }
    if (base != "2") throw config_error("only powers of 2 supported: '" + t + "'");
    int e = 0;
    std::string es = t.substr(caret + 1);
    auto [p, ec] = std::from_chars(es.data(), es.data() + es.size(), e);
    if (ec != std::errc() || p != es.data() + es.size())
      throw config_error("bad exponent in '" + t + "'");
    double v = std::ldexp(1.0, e);
    return neg ? -v : v;
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw config_error("bad number '" + t + "'");
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::vector<double> out;
  for (const std::string& tok : split_ws(s)) {
    size_t dots = tok.find("..");
    if (dots != std::string::npos) {
      std::string lhs = tok.substr(0, dots), rhs = tok.substr(dots + 2);
      auto power_exp = [&](const std::string& side) {
        size_t caret = side.find('^');
        if (caret == std::string::npos || side.substr(0, caret) != "2")
          throw config_error("range endpoints must be powers of two: '" + tok + "'");
        int e = 0;
        std::string es = side.substr(caret + 1);
        auto [p, ec] = std::from_chars(es.data(), es.data() + es.size(), e);
        if (ec != std::errc() || p != es.data() + es.size())
          throw config_error("bad exponent in '" + tok + "'");
        return e;
      };
      int e0 = power_exp(lhs), e1 = power_exp(rhs);
      int step = e0 <= e1 ? 1 : -1;
      for (int e = e0;; e += step) {
        out.push_back(std::ldexp(1.0, e));
        if (e == e1) break;
      }
    } else {
      out.push_back(parse_number(tok));
    }
  }
  if (out.empty()) throw config_error("empty number list");
  return out;
}

fields::FunctionSpec parse_function(const std::string& text, int n) {
  auto toks = split_ws(text);
  if (toks.empty()) throw config_error("empty function description");
  std::string kind = lower(toks[0]);
  auto want = [&](size_t args) {
    if (toks.size() != args + 1)
      throw config_error("function '" + kind + "' wants " +
                         std::to_string(args) + " arguments");
  };
  if (kind == "constant") {
    want(1);
    return fields::FunctionSpec::constant(parse_number(toks[1]));
  }
  if (kind == "ball" || kind == "bump") {
    want(static_cast<size_t>(n) + 1);
    Vec c = zero_vec(n);
    for (int i = 0; i < n; ++i) c[i] = parse_number(toks[static_cast<size_t>(i) + 1]);
    double scale = parse_number(toks.back());
    return kind == "ball" ? fields::FunctionSpec::ball(c, scale)
                          : fields::FunctionSpec::bump(c, scale);
  }
  if (kind == "log_power") {
    want(2);
    return fields::FunctionSpec::log_power(parse_number(toks[1]),
                                           parse_number(toks[2]));
  }
  if (kind == "radial_profile") {
    if (toks.size() < 3)
      throw config_error("radial_profile wants at least two r:v knots");
    std::vector<std::pair<double, double>> knots;
    for (size_t i = 1; i < toks.size(); ++i) {
      size_t colon = toks[i].find(':');
      if (colon == std::string::npos)
        throw config_error("radial_profile knot wants r:v, got '" + toks[i] + "'");
      knots.push_back({parse_number(toks[i].substr(0, colon)),
                       parse_number(toks[i].substr(colon + 1))});
    }
    return fields::FunctionSpec::radial_profile(knots);
  }
  throw config_error("unknown function '" + toks[0] + "'");
}

// ------------------------------------------------------------ plots

std::string region_svg(int n, double a1, double a2) {
  regions::RegionReport rep = regions::region_report(n, a1, a2);
  regions::Poly2 poly = regions::region_polygon(n, a1, a2);
  Frame f = unit_frame();
  std::string title = "exponent region  n=" + std::to_string(n) + "  a=(" +
                      fmt4(a1) + ", " + fmt4(a2) + ")  case " +
                      std::string(1, static_cast<char>('A' + static_cast<int>(rep.kind)));
  if (rep.mirrored) title += " mirrored";
  if (rep.subcase_open) title += " open";
  Svg svg = unit_square_plot(f, title);
  shade_polygon(svg, f, poly.pts);
  for (auto& v : rep.vertices) {
    double x = regions::to_double(v.x), y = regions::to_double(v.y);
    svg.circle(f.X(x), f.Y(y), 3.2, "#16324f");
    svg.text(f.X(x) + 6, f.Y(y) - 6,
             v.label + " (" + rat_str(v.x) + ", " + rat_str(v.y) + ")", 11);
  }
  return svg.str();
}

std::string curve_region_svg(int m, bool one_sided) {
  regions::Poly2 poly = one_sided ? regions::curve_polygon_onesided(m)
                                  : regions::curve_polygon_interior(m);
  Frame f = unit_frame();
  Svg svg = unit_square_plot(
      f, std::string("curve exponent region  m=") + std::to_string(m) +
             (one_sided ? "  flat-side" : "  interior"));
  shade_polygon(svg, f, poly.pts);
  for (auto& [x, y] : poly.pts) {
    svg.circle(f.X(x), f.Y(y), 2.8, "#16324f");
    svg.text(f.X(x) + 6, f.Y(y) - 6, "(" + fmt4(x) + ", " + fmt4(y) + ")", 10);
  }
  return svg.str();
}

std::string trilinear_slice_svg(int n, double a1, double a2, double a3,
                                double x3) {
  double cap1 = regions::trilinear_one_over_p3(1, n, a1, a2, a3);
  double cap2 = regions::trilinear_one_over_p3(2, n, a1, a2, a3);
  double cap3 = regions::trilinear_one_over_p3(3, n, a1, a2, a3);
  std::vector<std::pair<double, double>> poly{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  poly = clip_halfplane(poly, 1, 1, (3.0 * n - 1.0) / n - x3);
  poly = clip_halfplane(poly, 1, 0, cap1);
  poly = clip_halfplane(poly, 0, 1, cap2);
  Frame f = unit_frame();
  Svg svg = unit_square_plot(
      f, "three-factor region slice  n=" + std::to_string(n) + "  a=(" +
             fmt4(a1) + ", " + fmt4(a2) + ", " + fmt4(a3) + ")  x3=" + fmt4(x3));
  if (x3 < cap3 && !poly.empty()) {
    shade_polygon(svg, f, poly);
  } else {
    svg.text(f.X(0.5), f.Y(0.5), "empty slice (x3 cap " + fmt4(cap3) + ")", 12,
             "middle");
  }
  svg.text(f.X(0.02), f.Y(-0.045),
           "caps: " + fmt4(cap1) + ", " + fmt4(cap2) + ", " + fmt4(cap3), 11);
  return svg.str();
}

std::string scaling_fit_svg(const ScalingFit& fit, const std::string& x_label,
                            const std::string& y_label, bool loglog,
                            const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (auto& [x, y] : fit.points)
    pts.push_back(loglog ? std::pair{std::log(x), std::log(y)}
                         : std::pair{x, y});
  Frame f;
  if (!pts.empty()) {
    f.x0 = f.x1 = pts[0].first;
    f.y0 = f.y1 = pts[0].second;
    for (auto& [x, y] : pts) {
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  }
  pad_range(f.x0, f.x1, 0.09);
  pad_range(f.y0, f.y1, 0.12);
  Svg svg(f.W, f.H);
  auto tick = [&](double v) { return loglog ? fmt4(std::exp(v)) : fmt4(v); };
  draw_axes(svg, f, x_label, y_label, title, tick);

  bool have_fit = fit.slope != 0.0 || fit.intercept != 0.0 || fit.pass;
  if (have_fit && !pts.empty()) {
    auto fit_y = [&](double x) { return fit.intercept + fit.slope * x; };
    svg.line(f.X(f.x0), f.Y(fit_y(f.x0)), f.X(f.x1), f.Y(fit_y(f.x1)),
             "#a23b3b", 1.6);
    double ax = pts.front().first;
    double ay = fit_y(ax);
    auto pred_y = [&](double x) {
      return ay + fit.predicted_slope * (x - ax);
    };
    svg.line(f.X(f.x0), f.Y(pred_y(f.x0)), f.X(f.x1), f.Y(pred_y(f.x1)),
             "#777777", 1.2, "6,4");
    svg.text(f.W / 2.0, f.H - 32, comparison_text(fit), 11, "middle",
             "#5a5a5a");
  }
  if (!pts.empty()) {
    std::vector<std::pair<double, double>> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> line_px;
    for (auto& [x, y] : sorted) line_px.push_back({f.X(x), f.Y(y)});
    svg.poly(line_px, "none", 1.0, "#9db8d9", false);
    for (auto& [x, y] : pts) svg.circle(f.X(x), f.Y(y), 3.4, "#16324f");
  }
  return svg.str();
}

std::string field_svg(const fields::SampledField& field,
                      const std::string& title) {
  const fields::Grid& g = field.grid;
  require(g.n >= 1 && g.n <= 3, "field_svg: dimension must be 1, 2, or 3");
  if (g.n == 1) {
    Frame f;
    f.x0 = g.lo[0];
    f.x1 = g.hi[0];
    f.y0 = 0.0;
    f.y1 = 0.0;
    for (double v : field.values) {
      f.y0 = std::min(f.y0, v);
      f.y1 = std::max(f.y1, v);
    }
    pad_range(f.y0, f.y1, 0.08);
    Svg svg(f.W, f.H);
    draw_axes(svg, f, "x", "value", title, [](double v) { return fmt4(v); });
    std::vector<std::pair<double, double>> line_px;
    for (size_t i = 0; i < field.values.size(); ++i)
      line_px.push_back({f.X(g.point(i)[0]), f.Y(field.values[i])});
    svg.poly(line_px, "none", 1.0, "#16324f", false);
    return svg.str();
  }

  // 2-D heat map; 3-D fields show their central z-slice
  int nx = g.count[0], ny = g.count[1];
  int kz = g.n == 3 ? g.count[2] / 2 : 0;
  auto value_at = [&](int ix, int iy) {
    size_t flat = g.n == 2 ? static_cast<size_t>(ix) * static_cast<size_t>(ny) +
                                 static_cast<size_t>(iy)
                           : (static_cast<size_t>(ix) * static_cast<size_t>(ny) +
                              static_cast<size_t>(iy)) *
                                 static_cast<size_t>(g.count[2]) +
                             static_cast<size_t>(kz);
    return field.values[flat];
  };
  double vmin = value_at(0, 0), vmax = vmin;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      double v = value_at(ix, iy);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  double span = vmax - vmin;
  Frame f;
  f.W = 620;
  f.H = 560;
  f.R = 86;
  f.T = 46;
  f.B = 56;
  f.x0 = g.lo[0];
  f.x1 = g.hi[0];
  f.y0 = g.lo[1];
  f.y1 = g.hi[1];
  Svg svg(f.W, f.H);
  draw_axes(svg, f, "x", "y",
            g.n == 3 ? title + " (mid z-slice)" : title,
            [](double v) { return fmt4(v); });
  double cw = (f.W - f.L - f.R) / nx;
  double ch = (f.H - f.T - f.B) / ny;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      double t = span > 0 ? (value_at(ix, iy) - vmin) / span : 0.5;
      svg.rect(f.L + ix * cw, f.H - f.B - (iy + 1) * ch, cw + 0.5, ch + 0.5,
               ramp(t));
    }
  for (int i = 0; i <= 8; ++i) {
    double t = i / 8.0;
    svg.rect(f.W - 64, f.H - f.B - (i + 1) * 24.0, 18, 24.5, ramp(t));
  }
  svg.text(f.W - 40, f.H - f.B - 8.0 * 24.0 - 14, fmt4(vmax), 10);
  svg.text(f.W - 40, f.H - f.B - 2, fmt4(vmin), 10);
  return svg.str();
}

// ------------------------------------------------------------ runner

std::vector<std::string> experiment_kinds() {
  return {"bilinear-average",  "bilinear-maximal",  "dyadic-decay",
          "sharpness-nec1",    "sharpness-nec2",    "l1-failure",
          "curve-maximal",     "mstar-exponent",    "curve-sharpness",
          "trilinear-average", "trilinear-necessity", "region-report"};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  ExperimentResult res;
  RunCtx ctx{cfg, fsys::path(out_dir), ordered_json::object(), {}};
  bool dir_ok = false;
  try {
    fsys::create_directories(ctx.dir);
    dir_ok = true;
    int code;
    const std::string& kind = cfg.kind;
    if (kind == "bilinear-average") code = run_bilinear_average(ctx);
    else if (kind == "bilinear-maximal") code = run_bilinear_maximal(ctx);
    else if (kind == "dyadic-decay") code = run_dyadic_decay(ctx);
    else if (kind == "sharpness-nec1") code = run_sharpness(ctx, false);
    else if (kind == "sharpness-nec2") code = run_sharpness(ctx, true);
    else if (kind == "l1-failure") code = run_l1_failure(ctx);
    else if (kind == "curve-maximal") code = run_curve_maximal(ctx);
    else if (kind == "mstar-exponent") code = run_mstar_exponent(ctx);
    else if (kind == "curve-sharpness") code = run_curve_sharpness(ctx);
    else if (kind == "trilinear-average") code = run_trilinear_average(ctx);
    else if (kind == "trilinear-necessity") code = run_trilinear_necessity(ctx);
    else if (kind == "region-report") code = run_region_report(ctx);
    else
      throw config_error("unknown experiment kind '" + kind + "'");
    res.exit_code = code;
    res.verdict = code == 0 ? "pass" : "fail";
  } catch (const config_error& e) {
    res.exit_code = 3;
    res.verdict = "config-error";
    res.message = e.what();
  } catch (const accuracy_error& e) {
    res.exit_code = 2;
    res.verdict = "inconclusive";
    res.message = e.what();
  } catch (const fit_error& e) {
    res.exit_code = 2;
    res.verdict = "inconclusive";
    res.message = e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = 3;
    res.verdict = "config-error";
    res.message = e.what();
  } catch (const std::runtime_error& e) {
    res.exit_code = 2;
    res.verdict = "inconclusive";
    res.message = e.what();
  }

  if (dir_ok) {
    ordered_json report;
    report["version"] = kVersion;
    report["kind"] = cfg.kind;
    report["config"] = ordered_json::object();
    for (auto& [k, v] : cfg.resolved) report["config"][k] = v;
    report["results"] = ctx.results;
    report["verdict"] = res.verdict;
    if (!res.message.empty()) report["message"] = res.message;
    report["artifacts"] = ctx.artifacts;
    std::ofstream os(ctx.dir / "report.json", std::ios::binary);
    if (os) {
      os << report.dump(2) << "\n";
      ctx.artifacts.push_back("report.json");
    }
  }
  res.artifacts = ctx.artifacts;
  return res;
}

}  // namespace maxlab::lab
