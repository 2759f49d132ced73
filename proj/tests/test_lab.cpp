#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "maxlab/lab.hpp"

using namespace maxlab;
using namespace maxlab::lab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path fresh_dir(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / "maxlab_unit" / leaf;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("numeric tokens") {
  CHECK(parse_number("0.5") == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(parse_number("1e-3") == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(parse_number("2^-3") == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(parse_number("2^5") == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(parse_number("-2^2") == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(parse_number("4/3") == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(parse_number("-5/2") == doctest::Approx(-2.5).epsilon(1e-15));
  CHECK_THROWS_AS((void)parse_number(""), config_error);
  CHECK_THROWS_AS((void)parse_number("2^"), config_error);
  CHECK_THROWS_AS((void)parse_number("abc"), config_error);
  CHECK_THROWS_AS((void)parse_number("1/0"), config_error);
  CHECK_THROWS_AS((void)parse_number("1.5x"), config_error);
}

TEST_CASE("number lists and dyadic ranges") {
  std::vector<double> down = parse_number_list("2^-3..2^-7");
  REQUIRE(down.size() == 5);
  CHECK(down.front() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(down.back() == doctest::Approx(1.0 / 128.0).epsilon(1e-15));
  for (size_t i = 1; i < down.size(); ++i)
    CHECK(down[i] == doctest::Approx(down[i - 1] / 2.0).epsilon(1e-15));

  std::vector<double> up = parse_number_list("2^2..2^5");
  REQUIRE(up.size() == 4);
  CHECK(up.front() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(up.back() == doctest::Approx(32.0).epsilon(1e-15));

  std::vector<double> mixed = parse_number_list("1, 0.5 4/8");
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mixed[2] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(parse_number_list(""), config_error);
  CHECK_THROWS_AS((void)parse_number_list("0.5..2"), config_error);
  CHECK_THROWS_AS((void)parse_number_list("2^1..8"), config_error);
}

TEST_CASE("config text parsing") {
  ExperimentConfig cfg = config_from(
      "# leading comment\n"
      "kind = region-report\n"
      "a = 2 3  # trailing comment\n"
      "path = a#b\n"
      "\n"
      "[fit]\n"
      "tolerance = 0.2\n");
  CHECK(cfg.kind == "region-report");
  CHECK(cfg.values.at("a") == "2 3");
  // '#' only opens a comment at a token boundary
  CHECK(cfg.values.at("path") == "a#b");
  CHECK(cfg.values.at("fit.tolerance") == "0.2");

  CHECK_THROWS_AS(config_from("a = 1\n"), config_error);           // no kind
  CHECK_THROWS_AS(config_from("kind = x\nq = 1\nq = 2\n"), config_error);
  CHECK_THROWS_AS(config_from("kind = x\nkind = y\n"), config_error);
  CHECK_THROWS_AS(config_from("kind = x\njust words\n"), config_error);
  CHECK_THROWS_AS(config_from("kind = x\n[open\n"), config_error);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/nowhere.cfg"), config_error);
}

TEST_CASE("typed getters record what they resolved") {
  ExperimentConfig cfg = config_from(
      "kind = demo\n"
      "n = 3\n"
      "flag = yes\n"
      "deltas = 2^-1..2^-3\n");
  CHECK(cfg.get_int("n", 2) == 3);
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_bool("missing_flag", true));
  CHECK(cfg.get_number("width", 0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(cfg.get_list("deltas", "1").size() == 3);
  // defaults materialize into the resolved view
  CHECK(cfg.resolved.at("missing_flag") == "true");
  CHECK(cfg.resolved.at("n") == "3");
  CHECK(cfg.resolved.count("width") == 1);

  CHECK_THROWS_AS((void)cfg.require_number("absent"), config_error);
  CHECK_THROWS_AS((void)cfg.require_string("absent"), config_error);
  CHECK_THROWS_AS((void)cfg.require_list("absent"), config_error);

  ExperimentConfig bad = config_from("kind = demo\nn = 2.5\nflag = maybe\n");
  CHECK_THROWS_AS((void)bad.get_int("n", 1), config_error);
  CHECK_THROWS_AS((void)bad.get_bool("flag", true), config_error);
}

TEST_CASE("function catalogue text") {
  fields::FunctionSpec ball = parse_function("ball 0.1 -0.2 1.5", 2);
  CHECK(ball.kind == fields::SpecKind::BallIndicator);
  CHECK(ball.center == Vec(0.1, -0.2));
  CHECK(ball.radius == doctest::Approx(1.5).epsilon(1e-15));

  fields::FunctionSpec bump = parse_function("bump 0.5 0.7", 1);
  CHECK(bump.kind == fields::SpecKind::SmoothBump);
  CHECK(bump.width == doctest::Approx(0.7).epsilon(1e-15));

  CHECK(parse_function("constant 2.5", 3).value == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(parse_function("log_power 0.5 0", 2).kind == fields::SpecKind::LogPower);

  fields::FunctionSpec prof = parse_function("radial_profile 0:1 1:0.5 2:0", 2);
  CHECK(prof.kind == fields::SpecKind::RadialProfile);
  CHECK(prof.profile.size() == 3);

  CHECK_THROWS_AS((void)parse_function("ball 0 1", 2), config_error);
  CHECK_THROWS_AS((void)parse_function("nope 1", 1), config_error);
  CHECK_THROWS_AS((void)parse_function("radial_profile 0:1 x", 1), config_error);
  CHECK_THROWS_AS((void)parse_function("", 1), config_error);
}

TEST_CASE("slope extraction on synthetic data") {
  std::vector<std::pair<double, double>> cube = {{1, 1}, {2, 8}, {4, 64}};
  ScalingFit fit = fit_loglog(cube, 3.0, 0.01);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK(fit.pass);
  CHECK(fit.points.size() == 3);  // raw coordinates are preserved
  CHECK(fit.points[2].second == doctest::Approx(64.0).epsilon(1e-15));

  // one-sided comparisons
  CHECK(fit_loglog(cube, 3.5, 0.1, FitComparison::AtMost).pass);
  CHECK_FALSE(fit_loglog(cube, 2.5, 0.1, FitComparison::AtMost).pass);
  CHECK(fit_loglog(cube, 2.5, 0.1, FitComparison::AtLeast).pass);
  CHECK_FALSE(fit_loglog(cube, 3.5, 0.1, FitComparison::AtLeast).pass);

  std::vector<std::pair<double, double>> line = {{0, 1}, {1, 3}, {2, 5}};
  ScalingFit lin = fit_linear(line, 2.0, 0.01);
  CHECK(lin.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lin.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin.pass);

  CHECK_THROWS_AS((void)fit_loglog({{1, 1}, {2, 8}}, 3.0, 0.1), fit_error);
  CHECK_THROWS_AS((void)fit_loglog({{1, 1}, {2, 0.0}, {3, 8}}, 3.0, 0.1), fit_error);
}

TEST_CASE("experiment kinds are stable") {
  std::vector<std::string> kinds = experiment_kinds();
  const std::vector<std::string> expect = {
      "bilinear-average", "bilinear-maximal",   "dyadic-decay",
      "sharpness-nec1",   "sharpness-nec2",     "l1-failure",
      "curve-maximal",    "mstar-exponent",     "curve-sharpness",
      "trilinear-average", "trilinear-necessity", "region-report"};
  CHECK(kinds == expect);
}

TEST_CASE("region run emits exact vertices and artifacts") {
  ExperimentConfig cfg = config_from("kind = region-report\na = 2 3\n");
  fs::path dir = fresh_dir("region");
  ExperimentResult res = run_experiment(cfg, dir.string());
  CHECK(res.exit_code == 0);
  CHECK(res.verdict == "pass");

  nlohmann::json rep = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(rep["version"] == kVersion);
  CHECK(rep["kind"] == "region-report");
  CHECK(rep["results"]["case"] == "B");
  bool sawY = false;
  for (const auto& v : rep["results"]["vertices"]) {
    if (v["label"] == "Y") {
      sawY = true;
      CHECK(v["x"] == "5/6");
      CHECK(v["y"] == "2/3");
    }
  }
  CHECK(sawY);
  CHECK(fs::exists(dir / "vertices.csv"));
  CHECK(fs::exists(dir / "region.svg"));
  std::string csv = slurp(dir / "vertices.csv");
  CHECK(csv.rfind("label,x,y\n", 0) == 0);
}

TEST_CASE("failure and error exits") {
  fs::path dir = fresh_dir("exits");

  ExperimentConfig unknown = config_from("kind = unheard-of\n");
  CHECK(run_experiment(unknown, (dir / "u").string()).exit_code == 3);

  ExperimentConfig missing = config_from("kind = bilinear-average\n");
  ExperimentResult m = run_experiment(missing, (dir / "m").string());
  CHECK(m.exit_code == 3);
  CHECK(m.verdict == "config-error");
  CHECK_FALSE(m.message.empty());

  // unreachable Monte-Carlo tolerance: inconclusive, not a failure
  ExperimentConfig inconclusive = config_from(
      "kind = trilinear-average\n"
      "a = 2 2 2\n"
      "f1 = bump 0 0 1\n"
      "f2 = bump 0 0 1\n"
      "f3 = bump 0 0 1\n"
      "samples = 1000\n"
      "oracle = false\n"
      "tolerance = 1e-12\n");
  ExperimentResult i = run_experiment(inconclusive, (dir / "i").string());
  CHECK(i.exit_code == 2);
  CHECK(i.verdict == "inconclusive");
  // the report still lands on disk with the message recorded
  nlohmann::json rep = nlohmann::json::parse(slurp(dir / "i" / "report.json"));
  CHECK(rep["verdict"] == "inconclusive");
  CHECK(rep.contains("message"));

  // a slope that misses its pinned window is a plain failure
  ExperimentConfig failing = config_from("kind = mstar-exponent\nps = 2\nhs = 4,8,16\n");
  ExperimentResult f = run_experiment(failing, (dir / "f").string());
  CHECK(f.exit_code == 1);
  CHECK(f.verdict == "fail");
}

TEST_CASE("reruns are byte-identical") {
  const std::string text =
      "kind = trilinear-necessity\n"
      "a = 2 2 2\n"
      "deltas = 2^-2..2^-4\n"
      "samples = 50000\n";
  fs::path da = fresh_dir("rerun_a");
  fs::path db = fresh_dir("rerun_b");
  ExperimentResult ra = run_experiment(config_from(text), da.string());
  ExperimentResult rb = run_experiment(config_from(text), db.string());
  CHECK(ra.exit_code == rb.exit_code);
  CHECK(slurp(da / "report.json") == slurp(db / "report.json"));
  CHECK(slurp(da / "rows.csv") == slurp(db / "rows.csv"));
  CHECK(slurp(da / "scaling.svg") == slurp(db / "scaling.svg"));
}

TEST_CASE("full pipeline run with oracle confirmation") {
  ExperimentConfig cfg = config_from(
      "kind = bilinear-average\n"
      "a = 2 3\n"
      "f = bump 0.2 -0.1 1.1\n"
      "g = bump -0.15 0.25 0.9\n"
      "x = 0.1 0.2\n"
      "t1 = 0.8\n"
      "t2 = 1.25\n"
      "samples = 100000\n");
  fs::path dir = fresh_dir("pipeline");
  ExperimentResult res = run_experiment(cfg, dir.string());
  CHECK(res.exit_code == 0);
  nlohmann::json rep = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(rep["config"]["sphere_resolution"] == "96");  // default, materialized
  CHECK(rep["results"].contains("value"));
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(fs::exists(dir / "sweep.svg"));
  std::string svg = slurp(dir / "sweep.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("vector drawings are deterministic strings with the right scaffolding") {
  std::string region = region_svg(2, 2.0, 3.0);
  CHECK(region.find("<svg") != std::string::npos);
  CHECK(region.find("</svg>") != std::string::npos);
  CHECK(region.find("polygon") != std::string::npos);
  CHECK(region == region_svg(2, 2.0, 3.0));

  CHECK(curve_region_svg(3, true).find("polygon") != std::string::npos);
  CHECK(curve_region_svg(2, false).find("polygon") != std::string::npos);
  CHECK(trilinear_slice_svg(2, 2.0, 2.0, 6.0, 0.2).find("polygon") !=
        std::string::npos);

  ScalingFit fit = fit_loglog({{1, 1}, {2, 8}, {4, 64}}, 3.0, 0.1);
  std::string sf = scaling_fit_svg(fit, "delta", "value", true, "demo");
  CHECK(sf.find("<svg") != std::string::npos);
  CHECK(sf.find("stroke-dasharray") != std::string::npos);

  fields::Grid grid = fields::Grid::square(-1.0, 1.0, 9);
  fields::SampledField fld =
      fields::sample(fields::FunctionSpec::bump(Vec(0.0, 0.0), 0.8), grid);
  std::string heat = field_svg(fld, "demo field");
  CHECK(heat.find("rect") != std::string::npos);
  CHECK(heat.find("nan") == std::string::npos);

  fields::Grid line = fields::Grid::line(-1.0, 1.0, 33);
  fields::SampledField prof =
      fields::sample(fields::FunctionSpec::bump(zero_vec(1), 0.8), line);
  CHECK(field_svg(prof, "profile").find("polyline") != std::string::npos);
}

}  // TEST_SUITE
