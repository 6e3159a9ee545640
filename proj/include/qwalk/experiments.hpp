#pragma once
// Sweep drivers and paired-dynamics comparisons across the model family:
// the full nonlinear walk, its linear chain form, the classical rate
// equation (constant or self-consistent rates), and the two closed-form
// reference curves. Points run concurrently; each row is written into a
// preassigned slot, so results are deterministic for any job count.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/lattice.hpp"
#include "qwalk/ode.hpp"

namespace qwalk {

enum class Model {
  full_gpe,
  full_linear_chain,
  rate,
  rate_selfconsistent,
  analytic,
  incoherent_formula,
};

// True for the two closed-form models that yield a displacement without
// integration (and therefore no time series).
bool is_formula_model(Model m);

std::string_view model_name(Model m);
std::optional<Model> model_from_name(std::string_view name);

// Couplings realizing a target v/(v+v') on the standard grid: below 1/2 the
// inter-cell coupling is held at 0.5 and v varies; at and above 1/2 the
// intra-cell coupling is held at 0.5 and v' varies.
struct Couplings {
  double v = 0.0;
  double v_prime = 0.0;
};
Couplings couplings_for_ratio(double ratio);

// 21 evenly spaced ratios in [0.05, 0.95].
std::vector<double> default_ratio_grid();

enum class SweepAxis { g, delta_offset, v, v_prime };
std::string_view axis_name(SweepAxis a);

struct SweepSpec {
  LatticeParams base;  // couplings replaced per ratio unless ratios is empty
  SweepAxis axis = SweepAxis::g;
  std::vector<double> values{0.0};
  std::vector<double> ratios = default_ratio_grid();
  std::vector<Model> models{Model::full_gpe, Model::incoherent_formula};
  IntegratorConfig integrator;
  bool keep_series = false;
  int jobs = 1;
};

struct SweepRow {
  double ratio = 0.0;
  Model model = Model::full_gpe;
  double g = 0.0;
  double delta = 0.0;
  double dm_final = 0.0;
  double stop_time = 0.0;
  double survival = 0.0;
  std::string error;  // nonempty if this point failed; numeric fields NaN
  ObservableSeries series;  // populated when keep_series and integrated
  bool has_series = false;

  bool failed() const { return !error.empty(); }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int failures = 0;
  bool all_failed() const;
};

// Row order: every axis value x ratio x integrating model (in the given
// enumeration orders), then one block of formula rows per ratio x formula
// model. Integrating points run on up to spec.jobs threads.
SweepResult run_sweep(const SweepSpec& spec);

// Displacement vs ratio for a family of interaction strengths
// (defaults g in {0, 0.2, 0.5, 1, 4}) plus the incoherent reference curve.
SweepResult run_fig2_sweep(const std::vector<double>& g_values,
                           const std::vector<double>& ratios,
                           const IntegratorConfig& cfg, int jobs = 1);

// Same sweep for the linear system with a launch-site offset
// (defaults delta in {0, 0.05, 0.1, 0.6}).
SweepResult run_fig3_sweep(const std::vector<double>& delta_values,
                           const std::vector<double>& ratios,
                           const IntegratorConfig& cfg, int jobs = 1);

// One full-model run against its rate-model counterpart on a shared grid.
// The rate side uses constant golden-rule rates when g = 0 and the
// self-consistent closure otherwise. Deviation metrics are taken over the
// common prefix of the two sample grids (they differ only if an early stop
// triggers in one model).
struct DynamicsComparison {
  Model full_model = Model::full_gpe;
  Model rate_model = Model::rate;
  ObservableSeries full;
  ObservableSeries rate;
  double max_rho00_deviation = 0.0;
  double max_dm_deviation = 0.0;
  double final_dm_deviation = 0.0;
};
DynamicsComparison run_dynamics_comparison(const LatticeParams& params,
                                           const IntegratorConfig& cfg);

}  // namespace qwalk
