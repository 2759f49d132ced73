// Command-line entry point: runs experiment configs, draws exponent-region
// plots, lists the available experiment kinds. Exit codes: 0 pass, 1 fail,
// 2 inconclusive, 3 config error. MAXLAB_THREADS overrides the worker count.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxlab/lab.hpp"

namespace {

int cmd_run(const std::string& config_path, std::string out_dir) {
  namespace fsys = std::filesystem;
  maxlab::lab::ExperimentConfig cfg;
  try {
    cfg = maxlab::lab::parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  }
  if (out_dir.empty())
    out_dir = fsys::path(config_path).replace_extension(".out").string();
  maxlab::lab::ExperimentResult res =
      maxlab::lab::run_experiment(cfg, out_dir);
  std::printf("kind:    %s\n", cfg.kind.c_str());
  std::printf("verdict: %s\n", res.verdict.c_str());
  if (!res.message.empty()) std::printf("message: %s\n", res.message.c_str());
  for (const std::string& a : res.artifacts)
    std::printf("wrote:   %s\n", (fsys::path(out_dir) / a).string().c_str());
  return res.exit_code;
}

int write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::fprintf(stderr, "cannot write %s\n", path.c_str());
    return 3;
  }
  os << content;
  std::printf("wrote:   %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for degenerate averaging operators"};
  app.set_version_flag("--version", std::string(maxlab::lab::kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "path to a key = value config file")
      ->required();
  run->add_option("--out", out_dir,
                  "output directory (default: config path with .out)");

  int n = 2, m = 0;
  std::string a_text, out_file = "region.svg", style = "interior";
  double x3 = 0.0;
  CLI::App* region =
      app.add_subcommand("region", "draw an exponent-region plot");
  region->add_option("--n", n, "ambient dimension (default 2)");
  region->add_option("--a", a_text, "two or three exponents, e.g. 2,3");
  region->add_option("--m", m, "curve flatness order (curve region instead)");
  region->add_option("--style", style,
                     "curve region style: interior or one-sided");
  region->add_option("--x3", x3, "third-coordinate slice for three exponents");
  region->add_option("--out", out_file, "output SVG path");

  CLI::App* kinds = app.add_subcommand("list-kinds", "list experiment kinds");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir);

  if (kinds->parsed()) {
    for (const std::string& k : maxlab::lab::experiment_kinds())
      std::printf("%s\n", k.c_str());
    return 0;
  }

  if (region->parsed()) {
    try {
      if (m > 0) {
        if (style != "interior" && style != "one-sided") {
          std::fprintf(stderr, "config error: bad --style '%s'\n", style.c_str());
          return 3;
        }
        return write_text(out_file, maxlab::lab::curve_region_svg(
                                        m, style == "one-sided"));
      }
      if (a_text.empty()) {
        std::fprintf(stderr, "config error: --a or --m is required\n");
        return 3;
      }
      std::vector<double> a = maxlab::lab::parse_number_list(a_text);
      if (a.size() == 2)
        return write_text(out_file, maxlab::lab::region_svg(n, a[0], a[1]));
      if (a.size() == 3)
        return write_text(out_file, maxlab::lab::trilinear_slice_svg(
                                        n, a[0], a[1], a[2], x3));
      std::fprintf(stderr, "config error: --a wants two or three exponents\n");
      return 3;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 3;
    }
  }
  return 3;
}
