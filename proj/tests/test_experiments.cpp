#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "qwalk/experiments.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/rate.hpp"

using namespace qwalk;

namespace {

IntegratorConfig quick_config() {
  IntegratorConfig cfg;
  cfg.t_final = 20.0;
  cfg.n_samples = 21;
  cfg.stop_survival.reset();
  return cfg;
}

LatticeParams small_ring() {
  LatticeParams p;
  p.n_cells = 11;
  return p;
}

}  // namespace

TEST_CASE("model names round-trip and classify") {
  const Model all[] = {Model::full_gpe,   Model::full_linear_chain,
                       Model::rate,       Model::rate_selfconsistent,
                       Model::analytic,   Model::incoherent_formula};
  for (Model m : all) {
    auto back = model_from_name(model_name(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK(!model_from_name("no_such_model").has_value());
  CHECK(!is_formula_model(Model::full_gpe));
  CHECK(!is_formula_model(Model::rate_selfconsistent));
  CHECK(is_formula_model(Model::analytic));
  CHECK(is_formula_model(Model::incoherent_formula));
  CHECK(axis_name(SweepAxis::g) == "g");
  CHECK(axis_name(SweepAxis::delta_offset) == "delta_offset");
}

TEST_CASE("couplings_for_ratio holds the larger coupling at 0.5") {
  // Below one half the inter-cell coupling stays 0.5 and v shrinks.
  auto low = couplings_for_ratio(1.0 / 3.0);
  CHECK(low.v_prime == 0.5);
  CHECK(low.v == doctest::Approx(0.25).epsilon(1e-15));

  // At and above one half the roles swap.
  auto mid = couplings_for_ratio(0.5);
  CHECK(mid.v == 0.5);
  CHECK(mid.v_prime == 0.5);
  auto high = couplings_for_ratio(0.8);
  CHECK(high.v == 0.5);
  CHECK(high.v_prime == doctest::Approx(0.125).epsilon(1e-15));

  // Reconstructed ratio matches the request across the grid.
  for (double r : default_ratio_grid()) {
    auto c = couplings_for_ratio(r);
    CHECK(c.v / (c.v + c.v_prime) == doctest::Approx(r).epsilon(1e-14));
    CHECK(std::max(c.v, c.v_prime) == 0.5);
  }

  CHECK_THROWS_AS(couplings_for_ratio(0.0), std::invalid_argument);
  CHECK_THROWS_AS(couplings_for_ratio(1.0), std::invalid_argument);
  CHECK_THROWS_AS(couplings_for_ratio(-0.2), std::invalid_argument);
  CHECK_THROWS_AS(couplings_for_ratio(std::nan("")), std::invalid_argument);
}

TEST_CASE("default ratio grid spans [0.05, 0.95] with 21 points") {
  auto grid = default_ratio_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(grid.back() == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(grid[10] == doctest::Approx(0.5).epsilon(1e-14));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.045).epsilon(1e-12));
  }
}

TEST_CASE("sweep emits every requested pair exactly once, in slot order") {
  SweepSpec spec;
  spec.base = small_ring();
  spec.axis = SweepAxis::g;
  spec.values = {0.0, 0.5};
  spec.ratios = {0.3, 0.7};
  spec.models = {Model::rate, Model::rate_selfconsistent,
                 Model::incoherent_formula};
  spec.integrator = quick_config();

  auto res = run_sweep(spec);
  REQUIRE(res.rows.size() == 2 * 2 * 2 + 2);
  CHECK(res.failures == 0);

  std::set<std::tuple<double, double, Model>> seen;
  for (const auto& row : res.rows) {
    CHECK(seen.insert({row.g, row.ratio, row.model}).second);
  }

  // Integrated block: axis value major, then ratio, then model order.
  CHECK(res.rows[0].g == 0.0);
  CHECK(res.rows[0].ratio == 0.3);
  CHECK(res.rows[0].model == Model::rate);
  CHECK(res.rows[1].model == Model::rate_selfconsistent);
  CHECK(res.rows[2].ratio == 0.7);
  CHECK(res.rows[4].g == 0.5);
  // Formula block trails, one row per ratio.
  CHECK(res.rows[8].model == Model::incoherent_formula);
  CHECK(res.rows[8].ratio == 0.3);
  CHECK(res.rows[9].ratio == 0.7);
  CHECK(res.rows[8].stop_time == 0.0);
  CHECK(res.rows[8].survival == 0.0);

  for (const auto& row : res.rows) {
    CHECK(row.delta == 0.0);
    if (!is_formula_model(row.model)) {
      CHECK(std::isfinite(row.dm_final));
      CHECK(row.stop_time == doctest::Approx(20.0));
    }
  }
}

TEST_CASE("sweep rows are identical for any job count") {
  SweepSpec spec;
  spec.base = small_ring();
  spec.axis = SweepAxis::g;
  spec.values = {0.0, 0.5, 4.0};
  spec.ratios = {0.25, 0.5, 0.75};
  spec.models = {Model::full_gpe, Model::rate_selfconsistent,
                 Model::incoherent_formula};
  spec.integrator = quick_config();

  spec.jobs = 1;
  auto serial = run_sweep(spec);
  for (int jobs : {4, 64}) {
    spec.jobs = jobs;
    auto parallel = run_sweep(spec);
    REQUIRE(parallel.rows.size() == serial.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      const auto& a = serial.rows[i];
      const auto& b = parallel.rows[i];
      CHECK(a.model == b.model);
      CHECK(a.ratio == b.ratio);
      CHECK(a.g == b.g);
      // Bitwise equality: the worker count must not change a single value.
      CHECK(a.dm_final == b.dm_final);
      CHECK(a.stop_time == b.stop_time);
      CHECK(a.survival == b.survival);
      CHECK(a.error == b.error);
    }
  }
}

TEST_CASE("formula rows reproduce the closed forms exactly") {
  SweepSpec spec;
  spec.axis = SweepAxis::g;
  spec.values = {0.0, 1.0, 4.0};
  spec.ratios = {0.2, 0.5, 0.65};
  spec.models = {Model::incoherent_formula, Model::analytic};
  spec.integrator = quick_config();

  auto res = run_sweep(spec);
  // Formula rows do not multiply with the axis: one block per ratio.
  REQUIRE(res.rows.size() == 2 * 3);
  CHECK(res.failures == 0);
  for (const auto& row : res.rows) {
    auto c = couplings_for_ratio(row.ratio);
    if (row.model == Model::incoherent_formula) {
      CHECK(row.dm_final == incoherent_displacement(c.v, c.v_prime));
    } else {
      CHECK(row.dm_final ==
            analytic_displacement(hopping_rates(c.v, c.v_prime, 2.0, 0.0)));
    }
    // Both formulas reduce to the same share of the squared couplings.
    CHECK(row.dm_final ==
          doctest::Approx(c.v_prime * c.v_prime /
                          (c.v * c.v + c.v_prime * c.v_prime))
              .epsilon(1e-14));
  }
}

TEST_CASE("keep_series attaches the sampled series to integrated rows") {
  SweepSpec spec;
  spec.base = small_ring();
  spec.values = {0.0};
  spec.ratios = {0.4};
  spec.models = {Model::full_gpe, Model::incoherent_formula};
  spec.integrator = quick_config();
  spec.keep_series = true;

  auto res = run_sweep(spec);
  REQUIRE(res.rows.size() == 2);
  const auto& run_row = res.rows[0];
  REQUIRE(run_row.has_series);
  CHECK(run_row.series.size() == 21);
  CHECK(run_row.series.final_dm() == run_row.dm_final);
  CHECK(run_row.series.final_norm() == run_row.survival);
  CHECK(!res.rows[1].has_series);

  spec.keep_series = false;
  auto bare = run_sweep(spec);
  CHECK(!bare.rows[0].has_series);
  CHECK(bare.rows[0].series.size() == 0);
}

TEST_CASE("interaction pulls the displacement toward the incoherent value") {
  // Fixed ratio 1/3 (couplings 0.25 / 0.5, incoherent value 0.8): the gap
  // |dm - 0.8| must not grow anywhere along the interaction list.
  SweepSpec spec;
  spec.axis = SweepAxis::g;
  spec.values = {0.0, 0.2, 0.5, 1.0, 4.0};
  spec.ratios = {1.0 / 3.0};
  spec.models = {Model::full_gpe, Model::incoherent_formula};
  spec.jobs = 5;

  auto res = run_sweep(spec);
  REQUIRE(res.rows.size() == 6);
  REQUIRE(res.failures == 0);

  const double reference = res.rows[5].dm_final;
  CHECK(reference == doctest::Approx(0.8).epsilon(1e-15));

  double prev_gap = 2.0;
  for (int i = 0; i < 5; ++i) {
    const auto& row = res.rows[i];
    CHECK(row.model == Model::full_gpe);
    const double gap = std::abs(row.dm_final - reference);
    CHECK(gap <= prev_gap + 0.02);
    prev_gap = gap;
    // Every run drained to the configured survival threshold before t_final.
    CHECK(row.stop_time < 400.0);
    CHECK(row.survival <= 1.05e-6);
  }
  // Endpoints, frozen from measurement with wide margins.
  CHECK(std::abs(res.rows[0].dm_final - reference) > 0.15);
  CHECK(std::abs(res.rows[4].dm_final - reference) < 0.02);
}

TEST_CASE("figure sweep drivers produce the expected row blocks") {
  auto cfg = quick_config();

  auto fig2 = run_fig2_sweep({0.0, 1.0}, {0.25, 0.75}, cfg, 4);
  REQUIRE(fig2.rows.size() == 2 * 2 + 2);
  for (const auto& row : fig2.rows) {
    if (row.model == Model::full_gpe) {
      CHECK((row.g == 0.0 || row.g == 1.0));
      CHECK(row.delta == 0.0);
    } else {
      CHECK(row.model == Model::incoherent_formula);
    }
  }

  auto fig3 = run_fig3_sweep({0.0, 0.6}, {0.25, 0.75}, cfg, 4);
  REQUIRE(fig3.rows.size() == 2 * 2 + 2);
  for (const auto& row : fig3.rows) {
    CHECK(row.g == 0.0);
    if (row.model == Model::full_gpe) {
      CHECK((row.delta == 0.0 || row.delta == 0.6));
    }
  }

  // Default argument lists: 5 interactions x 21 ratios plus the reference.
  auto fig2_defaults = run_fig2_sweep({}, {}, quick_config(), 8);
  CHECK(fig2_defaults.rows.size() == 5 * 21 + 21);
  auto fig3_defaults = run_fig3_sweep({}, {}, quick_config(), 8);
  CHECK(fig3_defaults.rows.size() == 4 * 21 + 21);
}

TEST_CASE("dynamics comparison pairs the matching rate model") {
  IntegratorConfig cfg;  // default quality, needed for honest deviations

  LatticeParams offset;
  offset.delta_offset = 0.6;
  auto linear = run_dynamics_comparison(offset, cfg);
  CHECK(linear.rate_model == Model::rate);
  CHECK(linear.full.size() > 0);
  CHECK(linear.rate.size() > 0);
  // Frozen from measurement (0.051 / 0.037 / 0.0054), asserted with margin.
  CHECK(linear.max_rho00_deviation < 0.08);
  CHECK(linear.max_dm_deviation < 0.06);
  CHECK(linear.final_dm_deviation < 0.02);

  LatticeParams strong;
  strong.g = 4.0;
  auto hard = run_dynamics_comparison(strong, cfg);
  CHECK(hard.rate_model == Model::rate_selfconsistent);

  LatticeParams weak;
  weak.g = 0.5;
  auto soft = run_dynamics_comparison(weak, cfg);

  // The weakly interacting run strays farther from its rate description
  // than the strongly interacting one, on every deviation metric.
  CHECK(soft.max_dm_deviation > hard.max_dm_deviation + 0.02);
  CHECK(soft.final_dm_deviation > hard.final_dm_deviation + 0.02);
  CHECK(soft.max_rho00_deviation > hard.max_rho00_deviation + 0.02);
}

TEST_CASE("integrator failures are recorded per point and do not abort") {
  SweepSpec spec;
  spec.base = small_ring();
  spec.values = {0.0};
  spec.ratios = {0.3, 0.7};
  spec.models = {Model::full_gpe, Model::incoherent_formula};
  spec.integrator = quick_config();
  spec.integrator.rel_tol = 1e-320;
  spec.integrator.abs_tol = 1e-320;

  auto res = run_sweep(spec);
  REQUIRE(res.rows.size() == 4);
  CHECK(res.failures == 2);
  CHECK(res.all_failed());
  for (const auto& row : res.rows) {
    if (is_formula_model(row.model)) {
      CHECK(!row.failed());
      CHECK(std::isfinite(row.dm_final));
    } else {
      CHECK(row.failed());
      CHECK(!row.error.empty());
      CHECK(std::isnan(row.dm_final));
      CHECK(std::isnan(row.survival));
    }
  }

  // One healthy point flips the all-failed verdict.
  spec.integrator = quick_config();
  spec.ratios = {0.3};
  auto ok = run_sweep(spec);
  CHECK(ok.failures == 0);
  CHECK(!ok.all_failed());
}

TEST_CASE("sweep input validation and the no-grid single point") {
  SweepSpec spec;
  spec.values = {};
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);

  // Empty ratio grid: one point at the base couplings, labeled by v/(v+v').
  SweepSpec single;
  single.base = small_ring();
  single.base.v = 0.25;
  single.base.v_prime = 0.5;
  single.values = {0.0};
  single.ratios = {};
  single.models = {Model::full_gpe, Model::incoherent_formula};
  single.integrator = quick_config();
  auto res = run_sweep(single);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(res.rows[1].dm_final == incoherent_displacement(0.25, 0.5));
}
