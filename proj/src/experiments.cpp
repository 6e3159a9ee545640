#include "qwalk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include "qwalk/momentum.hpp"
#include "qwalk/rate.hpp"

namespace qwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModelNameEntry {
  Model model;
  std::string_view name;
};

constexpr ModelNameEntry kModelNames[] = {
    {Model::full_gpe, "full_gpe"},
    {Model::full_linear_chain, "full_linear_chain"},
    {Model::rate, "rate"},
    {Model::rate_selfconsistent, "rate_selfconsistent"},
    {Model::analytic, "analytic"},
    {Model::incoherent_formula, "incoherent_formula"},
};

double ratio_of(const LatticeParams& p) {
  const double sum = p.v + p.v_prime;
  return sum > 0.0 ? p.v / sum : 0.0;
}

void fill_from_series(SweepRow& row, ObservableSeries&& series,
                      bool keep_series) {
  row.dm_final = series.final_dm();
  row.stop_time = series.final_time();
  row.survival = series.final_norm();
  if (keep_series) {
    row.series = std::move(series);
    row.has_series = true;
  }
}

void mark_failed(SweepRow& row, const std::string& what, double t_reached) {
  row.error = what;
  row.dm_final = kNaN;
  row.stop_time = t_reached;
  row.survival = kNaN;
  row.has_series = false;
}

// One integrating point. Throws nothing; failures land in row.error.
void run_point(SweepRow& row, const LatticeParams& p,
               const IntegratorConfig& cfg, bool keep_series) {
  try {
    switch (row.model) {
      case Model::full_gpe:
        fill_from_series(row, simulate_walk(p, cfg).series, keep_series);
        break;
      case Model::full_linear_chain:
        fill_from_series(row, simulate_chain(p, cfg).series, keep_series);
        break;
      case Model::rate: {
        const HoppingRates rates =
            hopping_rates(p.v, p.v_prime, p.gamma, p.delta_offset);
        fill_from_series(
            row,
            integrate_rate(RateState::delta_at(p.n_cells), rates, cfg).series,
            keep_series);
        break;
      }
      case Model::rate_selfconsistent:
        fill_from_series(row,
                         integrate_rate_selfconsistent(
                             RateState::delta_at(p.n_cells), p.v, p.v_prime,
                             p.gamma, p.g, cfg, p.delta_offset)
                             .series,
                         keep_series);
        break;
      default:
        throw std::logic_error("formula model scheduled as integration");
    }
  } catch (const IntegrationError& e) {
    mark_failed(row, e.what(), e.t_reached);
  } catch (const std::exception& e) {
    mark_failed(row, e.what(), kNaN);
  }
}

LatticeParams point_params(const SweepSpec& spec, double ratio,
                           bool have_ratio, double value) {
  LatticeParams p = spec.base;
  if (have_ratio) {
    const Couplings c = couplings_for_ratio(ratio);
    p.v = c.v;
    p.v_prime = c.v_prime;
  }
  switch (spec.axis) {
    case SweepAxis::g:
      p.g = value;
      break;
    case SweepAxis::delta_offset:
      p.delta_offset = value;
      break;
    case SweepAxis::v:
      p.v = value;
      break;
    case SweepAxis::v_prime:
      p.v_prime = value;
      break;
  }
  return p;
}

}  // namespace

bool is_formula_model(Model m) {
  return m == Model::analytic || m == Model::incoherent_formula;
}

std::string_view model_name(Model m) {
  for (const auto& e : kModelNames) {
    if (e.model == m) return e.name;
  }
  return "unknown";
}

std::optional<Model> model_from_name(std::string_view name) {
  for (const auto& e : kModelNames) {
    if (e.name == name) return e.model;
  }
  return std::nullopt;
}

std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::g:
      return "g";
    case SweepAxis::delta_offset:
      return "delta_offset";
    case SweepAxis::v:
      return "v";
    case SweepAxis::v_prime:
      return "v_prime";
  }
  return "unknown";
}

Couplings couplings_for_ratio(double ratio) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw std::invalid_argument("coupling ratio must lie strictly in (0, 1)");
  }
  Couplings c;
  if (ratio < 0.5) {
    c.v_prime = 0.5;
    c.v = 0.5 * ratio / (1.0 - ratio);
  } else {
    c.v = 0.5;
    c.v_prime = 0.5 * (1.0 - ratio) / ratio;
  }
  return c;
}

std::vector<double> default_ratio_grid() {
  std::vector<double> grid(21);
  for (int i = 0; i < 21; ++i) grid[i] = 0.05 + i * (0.90 / 20.0);
  return grid;
}

bool SweepResult::all_failed() const {
  int integrated = 0;
  int integrated_failed = 0;
  for (const auto& row : rows) {
    if (is_formula_model(row.model)) continue;
    ++integrated;
    if (row.failed()) ++integrated_failed;
  }
  return integrated > 0 && integrated_failed == integrated;
}

SweepResult run_sweep(const SweepSpec& spec) {
  std::vector<Model> integrating;
  std::vector<Model> formulas;
  for (Model m : spec.models) {
    (is_formula_model(m) ? formulas : integrating).push_back(m);
  }
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep needs at least one axis value");
  }

  // When the ratio grid is empty the sweep runs a single point at the base
  // couplings; the ratio column then reports v/(v+v').
  const bool have_ratios = !spec.ratios.empty();
  const std::size_t n_ratio_slots = have_ratios ? spec.ratios.size() : 1;

  SweepResult result;
  const std::size_t n_integrated =
      spec.values.size() * n_ratio_slots * integrating.size();
  result.rows.resize(n_integrated + n_ratio_slots * formulas.size());

  // Slot layout is fixed up front, so concurrent workers never contend and
  // reruns produce identical row order for any job count.
  std::size_t slot = 0;
  struct Task {
    std::size_t slot;
    LatticeParams params;
  };
  std::vector<Task> tasks;
  tasks.reserve(n_integrated);
  for (double value : spec.values) {
    for (std::size_t ri = 0; ri < n_ratio_slots; ++ri) {
      const double ratio = have_ratios ? spec.ratios[ri] : -1.0;
      const LatticeParams p = point_params(spec, ratio, have_ratios, value);
      for (Model m : integrating) {
        SweepRow& row = result.rows[slot];
        row.model = m;
        row.ratio = have_ratios ? ratio : ratio_of(p);
        row.g = p.g;
        row.delta = p.delta_offset;
        tasks.push_back({slot, p});
        ++slot;
      }
    }
  }

  for (std::size_t ri = 0; ri < n_ratio_slots; ++ri) {
    const double ratio = have_ratios ? spec.ratios[ri] : -1.0;
    LatticeParams p = spec.base;
    if (have_ratios) {
      const Couplings c = couplings_for_ratio(ratio);
      p.v = c.v;
      p.v_prime = c.v_prime;
    }
    for (Model m : formulas) {
      SweepRow& row = result.rows[slot++];
      row.model = m;
      row.ratio = have_ratios ? ratio : ratio_of(p);
      row.g = 0.0;
      row.delta = p.delta_offset;
      row.stop_time = 0.0;
      row.survival = 0.0;
      try {
        row.dm_final =
            m == Model::incoherent_formula
                ? incoherent_displacement(p.v, p.v_prime)
                : analytic_displacement(
                      hopping_rates(p.v, p.v_prime, p.gamma, p.delta_offset));
      } catch (const std::exception& e) {
        mark_failed(row, e.what(), kNaN);
      }
    }
  }

  const int jobs = std::clamp(spec.jobs, 1, 64);
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
  if (n_workers <= 1) {
    for (const Task& task : tasks) {
      run_point(result.rows[task.slot], task.params, spec.integrator,
                spec.keep_series);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        run_point(result.rows[tasks[i].slot], tasks[i].params, spec.integrator,
                  spec.keep_series);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& row : result.rows) {
    if (row.failed()) ++result.failures;
  }
  return result;
}

SweepResult run_fig2_sweep(const std::vector<double>& g_values,
                           const std::vector<double>& ratios,
                           const IntegratorConfig& cfg, int jobs) {
  SweepSpec spec;
  spec.axis = SweepAxis::g;
  spec.values = g_values.empty()
                    ? std::vector<double>{0.0, 0.2, 0.5, 1.0, 4.0}
                    : g_values;
  if (!ratios.empty()) spec.ratios = ratios;
  spec.models = {Model::full_gpe, Model::incoherent_formula};
  spec.integrator = cfg;
  spec.jobs = jobs;
  return run_sweep(spec);
}

SweepResult run_fig3_sweep(const std::vector<double>& delta_values,
                           const std::vector<double>& ratios,
                           const IntegratorConfig& cfg, int jobs) {
  SweepSpec spec;
  spec.axis = SweepAxis::delta_offset;
  spec.values = delta_values.empty()
                    ? std::vector<double>{0.0, 0.05, 0.1, 0.6}
                    : delta_values;
  if (!ratios.empty()) spec.ratios = ratios;
  spec.base.g = 0.0;
  spec.models = {Model::full_gpe, Model::incoherent_formula};
  spec.integrator = cfg;
  spec.jobs = jobs;
  return run_sweep(spec);
}

DynamicsComparison run_dynamics_comparison(const LatticeParams& params,
                                           const IntegratorConfig& cfg) {
  DynamicsComparison out;
  out.full_model = Model::full_gpe;
  out.full = simulate_walk(params, cfg).series;

  if (params.g == 0.0) {
    out.rate_model = Model::rate;
    const HoppingRates rates =
        hopping_rates(params.v, params.v_prime, params.gamma,
                      params.delta_offset);
    out.rate =
        integrate_rate(RateState::delta_at(params.n_cells), rates, cfg).series;
  } else {
    out.rate_model = Model::rate_selfconsistent;
    out.rate = integrate_rate_selfconsistent(
                   RateState::delta_at(params.n_cells), params.v,
                   params.v_prime, params.gamma, params.g, cfg,
                   params.delta_offset)
                   .series;
  }

  const std::size_t n = std::min(out.full.size(), out.rate.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.max_rho00_deviation = std::max(
        out.max_rho00_deviation, std::abs(out.full.rho00[i] - out.rate.rho00[i]));
    out.max_dm_deviation = std::max(
        out.max_dm_deviation, std::abs(out.full.dm_t[i] - out.rate.dm_t[i]));
  }
  out.final_dm_deviation = std::abs(out.full.final_dm() - out.rate.final_dm());
  return out;
}

}  // namespace qwalk
