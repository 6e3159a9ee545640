#pragma once
// Incoherent sector: golden-rule hopping rates between neighboring cells,
// the classical two-sublattice rate equation on the ring, a self-consistent
// nonlinear closure where the launch-site population feeds back into the
// offset, and the adiabatic coherence estimate used as a diagnostic.

#include <complex>

#include "qwalk/ode.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

// Effective hopping rates. rate_v is the intra-cell (v) channel, rate_vp the
// inter-cell (v') channel; rate0 = rate_v + rate_vp is the total escape rate
// of a nondecaying site and rate0p = rate0 + gamma that of a decaying site.
struct HoppingRates {
  double rate_v = 0.0;
  double rate_vp = 0.0;
  double rate0 = 0.0;
  double rate0p = 0.0;
  double gamma = 0.0;
};

// rate = coupling^2 * gamma / (4 delta^2 + gamma^2) for each channel.
// Throws std::domain_error unless gamma > 0 (the formula is singular at
// gamma = 0 when delta = 0).
HoppingRates hopping_rates(double v, double v_prime, double gamma,
                           double delta);

// v'^2 / (v^2 + v'^2), the classical fraction of emission events past the
// inter-cell bond. Built so that
//   incoherent_displacement(v, v') + incoherent_displacement(v', v) == 1
// holds exactly in floating point. Throws std::domain_error if both
// couplings are zero.
double incoherent_displacement(double v, double v_prime);

// Classical populations on the ring: p_plus on nondecaying sites, p_minus on
// decaying sites, plus the per-cell emission ledger.
struct RateState {
  RealVector p_plus;
  RealVector p_minus;
  RealVector decayed;

  static RateState delta_at(int n_cells, int cell = 0);
  int cells() const { return static_cast<int>(p_plus.size()); }
  double total_population() const { return p_plus.sum() + p_minus.sum(); }
};

// Flat layout [p_plus(n), p_minus(n), decayed(n)].
//   dp+_m = -rate0  p+_m + rate_v p-_m     + rate_vp p-_{m+1}
//   dp-_m = -rate0p p-_m + rate_vp p+_{m-1} + rate_v  p+_m
//   d dec_m = gamma p-_m
void rate_rhs_flat(const HoppingRates& rates, const RealVector& y,
                   RealVector& dy);
RateState rate_rhs(const RateState& state, const HoppingRates& rates);

struct RateRun {
  ObservableSeries series;
  RateState final_state;
};

// Propagates the rate equation with the shared integrator contract. In the
// recorded series, norm is the surviving population, rho00 the origin-cell
// p_plus, dm_t the signed first moment of the ledger around origin.
RateRun integrate_rate(const RateState& initial, const HoppingRates& rates,
                       const IntegratorConfig& cfg, int origin = 0);

// Same propagation, but the rates are reevaluated at every integrator stage
// with offset delta(t) = base_delta + g * p_plus[origin](t). g = 0 with
// base_delta = 0 reproduces integrate_rate at the zero-offset rates exactly.
// Requires g >= 0 and gamma > 0.
RateRun integrate_rate_selfconsistent(const RateState& initial, double v,
                                      double v_prime, double gamma, double g,
                                      const IntegratorConfig& cfg,
                                      double base_delta = 0.0, int origin = 0);

// Adiabatic estimate of the off-diagonal element between a populated site and
// the neighbor it couples to with the given bond coupling (matrix element
// coupling/2): (coupling/2) (rho11 - rho00) / (delta + i gamma/2).
// Throws std::domain_error when delta = gamma = 0.
Complex quasi_static_coherence(double rho00, double rho11, double coupling,
                               double gamma, double delta);

}  // namespace qwalk
