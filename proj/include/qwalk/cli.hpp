#pragma once
// Command-line front end: config resolution (defaults -> scenario preset ->
// config file -> --set overrides), deterministic output writers, and the
// in-process entry point used by both main() and the tests.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/experiments.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/ode.hpp"

namespace qwalk {

// A config problem; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario = "custom";
  LatticeParams lattice;
  IntegratorConfig integrator;
  std::vector<double> ratios;        // sweep grid; empty = single point
  std::vector<double> g_values{0.0};
  std::vector<double> delta_values{0.0};
  std::vector<Model> models{Model::full_gpe, Model::incoherent_formula};
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv"};
  int jobs = 1;
  std::vector<std::string> warnings;  // populated during resolution
};

// Known scenario names: fig2, fig3, fig4, fig5, custom.
bool is_known_scenario(std::string_view name);

// Applies one key=value pair (dotted keys or their bare aliases); throws
// ConfigError for unknown keys or unparseable values.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

// Parses flat key = value text or a JSON document (first non-space byte '{').
// Entries land on top of cfg in file order.
void apply_config_text(RunConfig& cfg, const std::string& text);

// Full resolution pipeline. scenario_flag and the file's own scenario entry
// choose the preset (flag wins); file entries, then set_pairs, land on top.
// The result is validated, float fields are canonicalized to 12 significant
// digits, and warnings are collected.
RunConfig resolve_config(const std::string& scenario_flag,
                         const std::string& config_path,
                         const std::vector<std::string>& set_pairs);

// Canonical JSON echo of everything that determines the numbers (scenario,
// lattice, integrator, sweep lists). Output location and job count are
// deliberately excluded so reruns from the echo are byte-identical.
std::string resolved_config_json(const RunConfig& cfg);

std::string format_double(double x);  // %.12g

// sweep.csv: fixed header, one line per row; failed rows carry a trailing
// quoted error field.
std::string sweep_csv(const SweepResult& result);
// series_<id>.csv: t,norm,rho00,dm_t.
std::string series_csv(const ObservableSeries& series);
// sweep.json: rows as an array of objects.
std::string sweep_json(const SweepResult& result);
// plot_<scenario>.svg: displacement vs ratio for sweeps, paired time traces
// for the dynamics scenarios.
std::string sweep_svg(const RunConfig& cfg, const SweepResult& result);

// Runs the resolved scenario and returns rows (series attached).
SweepResult execute_scenario(const RunConfig& cfg);

// argv-level entry point. Returns 0 on success, 1 for config problems,
// 2 when every integrated point of a run failed.
int cli_main(int argc, const char* const* argv);

}  // namespace qwalk
