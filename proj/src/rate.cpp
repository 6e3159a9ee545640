#include "qwalk/rate.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qwalk {

namespace {

// Exactly complementary split: the larger share is 1/(1 + r) with
// r = small/big <= 1, the smaller share is its exact complement 1 - big
// (exact because big is in [1/2, 1]). Summing the two orderings of the same
// arguments then yields exactly 1.
double dominant_share(double ratio) { return 1.0 / (1.0 + ratio); }

int wrapped_cell(int m, int n) { return ((m % n) + n) % n; }

}  // namespace

HoppingRates hopping_rates(double v, double v_prime, double gamma,
                           double delta) {
  if (!(gamma > 0.0))
    throw std::domain_error("hopping rates require gamma > 0");
  if (!std::isfinite(v) || !std::isfinite(v_prime) || !std::isfinite(gamma) ||
      !std::isfinite(delta))
    throw std::domain_error("hopping rates require finite inputs");
  const double den = 4.0 * delta * delta + gamma * gamma;
  HoppingRates r;
  r.rate_v = v * v * gamma / den;
  r.rate_vp = v_prime * v_prime * gamma / den;
  r.rate0 = r.rate_v + r.rate_vp;
  r.rate0p = r.rate0 + gamma;
  r.gamma = gamma;
  return r;
}

double incoherent_displacement(double v, double v_prime) {
  v = std::abs(v);
  v_prime = std::abs(v_prime);
  if (!(v > 0.0) && !(v_prime > 0.0))
    throw std::domain_error(
        "incoherent displacement needs a nonzero coupling");
  if (v_prime >= v) {
    const double t = v / v_prime;
    return dominant_share(t * t);
  }
  const double t = v_prime / v;
  return 1.0 - dominant_share(t * t);
}

RateState RateState::delta_at(int n_cells, int cell) {
  RateState s;
  s.p_plus = RealVector::Zero(n_cells);
  s.p_minus = RealVector::Zero(n_cells);
  s.decayed = RealVector::Zero(n_cells);
  s.p_plus[wrapped_cell(cell, n_cells)] = 1.0;
  return s;
}

void rate_rhs_flat(const HoppingRates& r, const RealVector& y,
                   RealVector& dy) {
  const int n = static_cast<int>(y.size()) / 3;
  for (int m = 0; m < n; ++m) {
    const double pp = y[m];
    const double pm = y[n + m];
    dy[m] = -r.rate0 * pp + r.rate_v * pm + r.rate_vp * y[n + (m + 1) % n];
    dy[n + m] = -r.rate0p * pm + r.rate_vp * y[(m + n - 1) % n] + r.rate_v * pp;
    dy[2 * n + m] = r.gamma * pm;
  }
}

RateState rate_rhs(const RateState& state, const HoppingRates& rates) {
  const int n = state.cells();
  RealVector y(3 * n), dy(3 * n);
  y.head(n) = state.p_plus;
  y.segment(n, n) = state.p_minus;
  y.tail(n) = state.decayed;
  rate_rhs_flat(rates, y, dy);
  RateState out;
  out.p_plus = dy.head(n);
  out.p_minus = dy.segment(n, n);
  out.decayed = dy.tail(n);
  return out;
}

namespace {

RealVector pack(const RateState& s) {
  const int n = s.cells();
  RealVector y(3 * n);
  y.head(n) = s.p_plus;
  y.segment(n, n) = s.p_minus;
  y.tail(n) = s.decayed;
  return y;
}

RateState unpack(const RealVector& y) {
  const int n = static_cast<int>(y.size()) / 3;
  RateState s;
  s.p_plus = y.head(n);
  s.p_minus = y.segment(n, n);
  s.decayed = y.tail(n);
  return s;
}

template <typename Rhs>
RateRun run_rate(Rhs&& rhs, const RateState& initial,
                 const IntegratorConfig& cfg, int origin) {
  const int n = initial.cells();
  if (n < 3 || initial.p_minus.size() != n || initial.decayed.size() != n)
    throw std::invalid_argument("rate state needs >= 3 equal-sized cells");
  if (origin < 0 || origin >= n)
    throw std::invalid_argument("origin must lie in 0..n_cells-1");

  RealVector offs(n);
  for (int m = 0; m < n; ++m) offs[m] = signed_cell_offset(m, origin, n);

  ObservableSeries series;
  auto on_sample = [&](double t, const RealVector& y) {
    const double nrm = y.head(2 * n).sum();
    series.times.push_back(t);
    series.norm.push_back(nrm);
    series.rho00.push_back(y[origin]);
    series.dm_t.push_back(offs.dot(y.tail(n)));
    series.decayed.push_back(y.tail(n));
    return !(cfg.stop_survival && nrm < *cfg.stop_survival);
  };
  RealVector yf = integrate_sampled(rhs, pack(initial), cfg, on_sample);
  RateRun run;
  run.final_state = unpack(yf);
  run.series = std::move(series);
  return run;
}

}  // namespace

RateRun integrate_rate(const RateState& initial, const HoppingRates& rates,
                       const IntegratorConfig& cfg, int origin) {
  auto rhs = [&rates](double, const RealVector& y, RealVector& dy) {
    rate_rhs_flat(rates, y, dy);
  };
  return run_rate(rhs, initial, cfg, origin);
}

RateRun integrate_rate_selfconsistent(const RateState& initial, double v,
                                      double v_prime, double gamma, double g,
                                      const IntegratorConfig& cfg,
                                      double base_delta, int origin) {
  if (!(g >= 0.0))
    throw std::invalid_argument("self-consistent closure requires g >= 0");
  hopping_rates(v, v_prime, gamma, base_delta);  // validate inputs up front
  auto rhs = [=](double, const RealVector& y, RealVector& dy) {
    const double delta = base_delta + g * y[origin];
    rate_rhs_flat(hopping_rates(v, v_prime, gamma, delta), y, dy);
  };
  return run_rate(rhs, initial, cfg, origin);
}

Complex quasi_static_coherence(double rho00, double rho11, double coupling,
                               double gamma, double delta) {
  if (delta == 0.0 && gamma == 0.0)
    throw std::domain_error(
        "quasi-static coherence is singular at delta = gamma = 0");
  return 0.5 * coupling * (rho11 - rho00) / Complex(delta, 0.5 * gamma);
}

}  // namespace qwalk
