#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "qwalk/cli.hpp"
#include "qwalk/rate.hpp"

namespace qwalk {

namespace {

double ratio_label(const LatticeParams& p) {
  const double sum = p.v + p.v_prime;
  return sum > 0.0 ? p.v / sum : 0.0;
}

SweepRow series_row(Model m, const LatticeParams& p, ObservableSeries&& s) {
  SweepRow row;
  row.model = m;
  row.ratio = ratio_label(p);
  row.g = p.g;
  row.delta = p.delta_offset;
  row.dm_final = s.final_dm();
  row.stop_time = s.final_time();
  row.survival = s.final_norm();
  row.series = std::move(s);
  row.has_series = true;
  return row;
}

// A paired full-model / rate-model run; a failure marks both rows.
void append_comparison_rows(std::vector<SweepRow>& rows,
                            const LatticeParams& p,
                            const IntegratorConfig& cfg) {
  const Model rate_model =
      p.g == 0.0 ? Model::rate : Model::rate_selfconsistent;
  try {
    DynamicsComparison cmp = run_dynamics_comparison(p, cfg);
    rows.push_back(series_row(cmp.full_model, p, std::move(cmp.full)));
    rows.push_back(series_row(cmp.rate_model, p, std::move(cmp.rate)));
  } catch (const std::exception& e) {
    for (Model m : {Model::full_gpe, rate_model}) {
      SweepRow row;
      row.model = m;
      row.ratio = ratio_label(p);
      row.g = p.g;
      row.delta = p.delta_offset;
      row.error = e.what();
      row.dm_final = std::numeric_limits<double>::quiet_NaN();
      row.stop_time = std::numeric_limits<double>::quiet_NaN();
      row.survival = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
    }
  }
}

std::string series_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "series_%03zu.csv", index);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

bool wants_format(const RunConfig& cfg, std::string_view fmt) {
  for (const auto& f : cfg.formats) {
    if (f == fmt) return true;
  }
  return false;
}

// Max pointwise gaps over the shared prefix of two sampled series.
void print_pair_metrics(const SweepRow& full, const SweepRow& rate) {
  if (!full.has_series || !rate.has_series) return;
  double max_rho = 0.0;
  double max_dm = 0.0;
  const std::size_t n = std::min(full.series.size(), rate.series.size());
  for (std::size_t i = 0; i < n; ++i) {
    max_rho = std::max(max_rho, std::abs(full.series.rho00[i] -
                                         rate.series.rho00[i]));
    max_dm = std::max(max_dm,
                      std::abs(full.series.dm_t[i] - rate.series.dm_t[i]));
  }
  std::printf(
      "pair g=%s delta=%s: max |rho00 %s - %s| = %s, max |dm %s - %s| = %s, "
      "final dm gap = %s\n",
      format_double(full.g).c_str(), format_double(full.delta).c_str(),
      std::string(model_name(full.model)).c_str(),
      std::string(model_name(rate.model)).c_str(), format_double(max_rho).c_str(),
      std::string(model_name(full.model)).c_str(),
      std::string(model_name(rate.model)).c_str(), format_double(max_dm).c_str(),
      format_double(std::abs(full.dm_final - rate.dm_final)).c_str());
}

int run_command(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const SweepResult result = execute_scenario(cfg);
  const fs::path out(cfg.out_dir);

  write_file(out / "config.resolved.json", resolved_config_json(cfg));
  if (wants_format(cfg, "csv")) {
    write_file(out / "sweep.csv", sweep_csv(result));
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (result.rows[i].has_series) {
        write_file(out / series_file_name(i), series_csv(result.rows[i].series));
      }
    }
  }
  if (wants_format(cfg, "json")) {
    write_file(out / "sweep.json", sweep_json(result));
  }
  if (wants_format(cfg, "svg")) {
    write_file(out / ("plot_" + cfg.scenario + ".svg"),
               sweep_svg(cfg, result));
  }

  std::printf("scenario %s: %zu rows, %d failed; wrote %s\n",
              cfg.scenario.c_str(), result.rows.size(), result.failures,
              cfg.out_dir.c_str());
  if (cfg.scenario == "fig4" || cfg.scenario == "fig5") {
    for (std::size_t i = 0; i + 1 < result.rows.size(); i += 2) {
      print_pair_metrics(result.rows[i], result.rows[i + 1]);
    }
  }

  if (result.all_failed()) {
    std::cerr << "error: every integrated point failed; see the error column"
              << std::endl;
    return 2;
  }
  return 0;
}

}  // namespace

SweepResult execute_scenario(const RunConfig& cfg) {
  if (cfg.scenario == "fig4" || cfg.scenario == "fig5") {
    SweepResult result;
    if (cfg.scenario == "fig4") {
      append_comparison_rows(result.rows, cfg.lattice, cfg.integrator);
    } else {
      for (double g : cfg.g_values) {
        LatticeParams p = cfg.lattice;
        p.g = g;
        append_comparison_rows(result.rows, p, cfg.integrator);
      }
    }
    for (const auto& row : result.rows) {
      if (row.failed()) ++result.failures;
    }
    return result;
  }

  SweepSpec spec;
  spec.base = cfg.lattice;
  spec.ratios = cfg.ratios;
  spec.models = cfg.models;
  spec.integrator = cfg.integrator;
  spec.keep_series = true;
  spec.jobs = cfg.jobs;
  if (cfg.scenario == "fig2") {
    spec.axis = SweepAxis::g;
    spec.values = cfg.g_values;
  } else if (cfg.scenario == "fig3") {
    spec.axis = SweepAxis::delta_offset;
    spec.values = cfg.delta_values;
  } else {  // custom: one axis value, taken from the lattice itself
    spec.axis = SweepAxis::g;
    spec.values = {cfg.lattice.g};
  }
  return run_sweep(spec);
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"dissipative bipartite-ring walk: sweeps, dynamics, artifacts"};
  app.require_subcommand(1);

  std::string scenario;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string formats;
  long jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario,
                    "fig2, fig3, fig4, fig5, or custom");
    sub->add_option("--config", config_path,
                    "config file: flat key = value lines or JSON");
    sub->add_option("--set", sets,
                    "KEY=VALUE override, repeatable; wins over the file");
  };
  CLI::App* run = app.add_subcommand(
      "run", "resolve the config, integrate, and write artifacts");
  add_common(run);
  run->add_option("--out", out_dir, "output directory (default 'out')");
  run->add_option("--formats", formats,
                  "comma list from csv, json, svg (default csv)");
  run->add_option("--jobs", jobs, "worker threads for sweep points");
  CLI::App* validate = app.add_subcommand(
      "validate", "resolve and echo the config without running");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  // Output flags ride the same override channel as --set, after it.
  std::vector<std::string> all_sets = sets;
  if (run->count("--out")) all_sets.push_back("output.dir=" + out_dir);
  if (run->count("--formats")) all_sets.push_back("output.formats=" + formats);
  if (run->count("--jobs")) {
    all_sets.push_back("output.jobs=" + std::to_string(jobs));
  }

  try {
    RunConfig cfg = resolve_config(scenario, config_path, all_sets);
    for (const auto& w : cfg.warnings) {
      std::cerr << "warning: " << w << std::endl;
    }
    if (validate->parsed()) {
      std::cout << resolved_config_json(cfg);
      return 0;
    }
    return run_command(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace qwalk
