#include "qwalk/ode.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace qwalk {

namespace {

constexpr Complex kI{0.0, 1.0};

RealVector offsets_around(int origin, int n_cells) {
  RealVector offs(n_cells);
  for (int m = 0; m < n_cells; ++m)
    offs[m] = signed_cell_offset(m, origin, n_cells);
  return offs;
}

int checked_cell(int cell, int n_cells, const char* what) {
  if (cell < 0 || cell >= n_cells)
    throw std::invalid_argument(std::string(what) + " must lie in 0..n_cells-1");
  return cell;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
    throw std::invalid_argument("rel_tol must be > 0");
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
    throw std::invalid_argument("abs_tol must be > 0");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("t_final must be > 0");
  if (!(max_step > 0.0))
    throw std::invalid_argument("max_step must be > 0");
  if (n_samples < 2)
    throw std::invalid_argument("n_samples must be >= 2");
  if (stop_survival && !(*stop_survival > 0.0))
    throw std::invalid_argument("stop_survival must be > 0 when set");
}

double ObservableSeries::max_balance_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    worst = std::max(worst, std::abs(norm[i] + decayed[i].sum() - 1.0));
  return worst;
}

WalkRun simulate_walk(const LatticeParams& params, const IntegratorConfig& cfg,
                      int initial_cell) {
  params.validate();
  checked_cell(initial_cell, params.n_cells, "initial_cell");
  return simulate_walk_from(params, cfg,
                            WalkState::delta_at(params.n_cells, initial_cell),
                            initial_cell);
}

WalkRun simulate_walk_from(const LatticeParams& params,
                           const IntegratorConfig& cfg,
                           const WalkState& initial, int origin) {
  params.validate();
  const int n = params.n_cells;
  checked_cell(origin, n, "origin");
  if (initial.a.size() != n || initial.b.size() != n ||
      initial.decayed.size() != n)
    throw std::invalid_argument("initial state size does not match n_cells");

  const RealVector offs = offsets_around(origin, n);
  ObservableSeries series;
  auto rhs = [&params](double, const ComplexVector& y, ComplexVector& dy) {
    gpe_rhs_flat(params, y, dy);
  };
  auto on_sample = [&](double t, const ComplexVector& y) {
    const double nrm = y.head(2 * n).squaredNorm();
    RealVector dec = y.tail(n).real();
    series.times.push_back(t);
    series.norm.push_back(nrm);
    series.rho00.push_back(std::norm(y[origin]));
    series.dm_t.push_back(offs.dot(dec));
    series.decayed.push_back(std::move(dec));
    return !(cfg.stop_survival && nrm < *cfg.stop_survival);
  };
  ComplexVector yf = integrate_sampled(rhs, pack(initial), cfg, on_sample);
  WalkRun run;
  run.final_state = unpack_walk(yf, n, series.times.back());
  run.series = std::move(series);
  return run;
}

ChainRun simulate_chain(const LatticeParams& params,
                        const IntegratorConfig& cfg, int initial_cell) {
  params.validate();
  const int n = params.n_cells;
  checked_cell(initial_cell, n, "initial_cell");
  const int site = chain_index(initial_cell, Sublattice::a, n);

  const RealVector offs = offsets_around(initial_cell, n);
  ObservableSeries series;
  auto rhs = [&params](double, const ComplexVector& y, ComplexVector& dy) {
    chain_rhs_flat(params, y, dy);
  };
  auto on_sample = [&](double t, const ComplexVector& y) {
    const double nrm = y.head(2 * n).squaredNorm();
    RealVector dec = y.tail(n).real();
    series.times.push_back(t);
    series.norm.push_back(nrm);
    series.rho00.push_back(std::norm(y[site]));
    series.dm_t.push_back(offs.dot(dec));
    series.decayed.push_back(std::move(dec));
    return !(cfg.stop_survival && nrm < *cfg.stop_survival);
  };
  ComplexVector yf = integrate_sampled(
      rhs, pack(ChainState::delta_at(n, site), n), cfg, on_sample);
  ChainRun run;
  run.decayed = yf.tail(n).real();
  run.final_state = unpack_chain(yf, n);
  run.series = std::move(series);
  return run;
}

DensityRun simulate_density_matrix(const LatticeParams& params,
                                   const IntegratorConfig& cfg) {
  params.validate();
  if (params.g != 0.0)
    throw std::invalid_argument(
        "density-matrix propagation is defined for the linear system only "
        "(g must be 0)");
  const int n = params.n_cells;
  const int d = 2 * n;
  const ComplexMatrix h = chain_hamiltonian(params);
  const ComplexMatrix hc = h.conjugate();
  const ComplexMatrix ht = h.transpose();

  ComplexVector y0 = ComplexVector::Zero(d * d + n);
  y0[0] = 1.0;  // rho(0,0) = 1 in column-major order

  ComplexMatrix work(d, d);
  auto rhs = [&](double, const ComplexVector& y, ComplexVector& dy) {
    Eigen::Map<const ComplexMatrix> rho(y.data(), d, d);
    Eigen::Map<ComplexMatrix> drho(dy.data(), d, d);
    work.noalias() = hc * rho;
    work.noalias() -= rho * ht;
    drho = kI * work;
    for (int j = 0; j < n; ++j) {
      const int alpha = 2 * j + 1;
      const int cell = (j + 1) % n;
      dy[d * d + cell] = Complex(params.gamma * rho(alpha, alpha).real(), 0.0);
    }
  };

  const RealVector offs = offsets_around(0, n);
  DensityRun run;
  ObservableSeries series;
  auto on_sample = [&](double t, const ComplexVector& y) {
    Eigen::Map<const ComplexMatrix> rho(y.data(), d, d);
    const double nrm = rho.trace().real();
    RealVector dec = y.tail(n).real();
    run.max_hermiticity_defect = std::max(
        run.max_hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    run.min_diagonal =
        std::min(run.min_diagonal, rho.diagonal().real().minCoeff());
    series.times.push_back(t);
    series.norm.push_back(nrm);
    series.rho00.push_back(rho(0, 0).real());
    series.dm_t.push_back(offs.dot(dec));
    series.decayed.push_back(std::move(dec));
    return !(cfg.stop_survival && nrm < *cfg.stop_survival);
  };

  ComplexVector yf = integrate_sampled(rhs, std::move(y0), cfg, on_sample);
  run.final_state.rho =
      Eigen::Map<const ComplexMatrix>(yf.data(), d, d);
  run.decayed = yf.tail(n).real();
  run.series = std::move(series);
  return run;
}

}  // namespace qwalk
