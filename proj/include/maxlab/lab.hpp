#pragma once

// Experiment harness: line-oriented config files, named experiment kinds,
// JSON/CSV/SVG report emission, exit-status conventions. One experiment
// per run; reruns with the same config are byte-identical.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "maxlab/common.hpp"
#include "maxlab/fields.hpp"
#include "maxlab/fitting.hpp"

namespace maxlab::lab {

inline constexpr const char* kVersion = "maxlab 0.1.0";

// Config text: `key = value` lines; `[section]` headers prefix later keys
// as "section.key"; '#' starts a comment (at line start or after
// whitespace); blank lines ignored. Values are kept as raw text and parsed
// at lookup. Duplicate keys are rejected.
struct ExperimentConfig {
  std::string kind;
  std::map<std::string, std::string> values;

  // every lookup materializes the value it used (default or given) here,
  // so reports carry the fully resolved configuration
  mutable std::map<std::string, std::string> resolved;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_number(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_list(const std::string& key,
                               const std::string& def_text) const;
  std::string require_string(const std::string& key) const;
  double require_number(const std::string& key) const;
  std::vector<double> require_list(const std::string& key) const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Numeric tokens: plain literals, dyadic powers "2^-5", and fractions
// "4/3". Lists split on commas/whitespace; a range "2^-3..2^-7" expands
// through the intermediate powers of two.
double parse_number(const std::string& token);
std::vector<double> parse_number_list(const std::string& text);

// Function catalogue text, e.g. "ball 0 0 1" (center then radius),
// "bump 0.5 0.7", "constant 1", "log_power 0.5 0",
// "radial_profile 0:1 1:0.5 2:0". Center coordinates use the ambient n.
fields::FunctionSpec parse_function(const std::string& text, int n);

struct ExperimentResult {
  int exit_code = 0;  // 0 pass, 1 fail, 2 inconclusive, 3 config error
  std::string verdict;
  std::string message;
  std::vector<std::string> artifacts;  // paths written, relative to out_dir
};

// kinds accepted by run_experiment, in canonical order
std::vector<std::string> experiment_kinds();

// Executes cfg.kind, writing report.json plus kind-specific CSV/SVG files
// into out_dir (created if needed). Engine accuracy/fit failures yield
// exit 2, verdict failures exit 1, bad configs exit 3; report.json is
// still written whenever the output directory is usable.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

// SVG emitters (deterministic strings).
std::string region_svg(int n, double a1, double a2);
std::string curve_region_svg(int m, bool one_sided);
// planar slice of the three-factor region at fixed third coordinate
std::string trilinear_slice_svg(int n, double a1, double a2, double a3,
                                double x3);
// scatter of fit.points with the fitted and predicted lines; loglog draws
// in log coordinates (matching fit_loglog), otherwise raw (fit_linear)
std::string scaling_fit_svg(const ScalingFit& fit, const std::string& x_label,
                            const std::string& y_label, bool loglog,
                            const std::string& title);
// 1-D fields as a graph, 2-D as a heat map, 3-D as the central z-slice
std::string field_svg(const fields::SampledField& field,
                      const std::string& title);

}  // namespace maxlab::lab
