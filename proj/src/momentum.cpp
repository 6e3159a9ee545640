#include "qwalk/momentum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qwalk {

namespace {

constexpr Complex kI{0.0, 1.0};

double dominant_share(double ratio) { return 1.0 / (1.0 + ratio); }

// Roots of unity with conjugate pairs exact by construction, so a
// conjugate-symmetric sample set transforms to a real profile up to rounding.
std::vector<Complex> unit_roots(int n) {
  std::vector<Complex> tab(n);
  tab[0] = 1.0;
  for (int r = 1; 2 * r <= n; ++r) {
    tab[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / n);
    tab[n - r] = std::conj(tab[r]);
  }
  return tab;
}

}  // namespace

double grid_momentum(int j, int n_cells) {
  const int shifted = (2 * j >= n_cells) ? j - n_cells : j;
  return 2.0 * std::numbers::pi * shifted / n_cells;
}

MomentumSolution solve_momentum_mode(double k, const HoppingRates& r) {
  if (!(r.gamma > 0.0))
    throw std::domain_error("momentum modes require gamma > 0");
  MomentumSolution s;
  s.k = k;
  s.gamma_k = r.rate_v + r.rate_vp * std::polar(1.0, k);
  const double mid = -0.5 * (r.rate0 + r.rate0p);
  const double disc =
      std::sqrt(0.25 * r.gamma * r.gamma + std::norm(s.gamma_k));
  s.lambda_plus = mid + disc;
  s.lambda_minus = mid - disc;
  return s;
}

MomentumPopulations momentum_populations(double k, double t,
                                         const HoppingRates& r) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const MomentumSolution s = solve_momentum_mode(k, r);
  const double gap = s.lambda_plus - s.lambda_minus;
  const double ep = std::exp(s.lambda_plus * t);
  const double em = std::exp(s.lambda_minus * t);
  MomentumPopulations q;
  q.q_plus =
      ((s.lambda_plus + r.rate0p) * ep - (s.lambda_minus + r.rate0p) * em) /
      gap;
  q.q_minus = std::conj(s.gamma_k) * ((ep - em) / gap);
  return q;
}

Complex q_integral(double k, const HoppingRates& r) {
  const Complex gamma_k = r.rate_v + r.rate_vp * std::polar(1.0, k);
  const double den = r.rate0 * r.rate0p - std::norm(gamma_k);
  if (!(den > 0.0))
    throw std::domain_error("mode integral requires rate0 rate0p > |gamma_k|^2");
  return std::conj(gamma_k) / den;
}

double analytic_displacement(const HoppingRates& r) {
  if (!(r.rate_v > 0.0) && !(r.rate_vp > 0.0))
    throw std::domain_error("displacement needs a nonzero hopping rate");
  if (r.rate_vp >= r.rate_v) return dominant_share(r.rate_v / r.rate_vp);
  return 1.0 - dominant_share(r.rate_vp / r.rate_v);
}

double analytic_displacement_fd(const HoppingRates& r, double dk) {
  if (!(dk > 0.0)) throw std::invalid_argument("dk must be > 0");
  const Complex slope =
      (q_integral(dk, r) - q_integral(-dk, r)) / (2.0 * dk);
  return (kI * r.gamma * slope).real();
}

InverseTransform inverse_transform(const ComplexVector& q_on_grid) {
  const int n = static_cast<int>(q_on_grid.size());
  if (n < 1) throw std::invalid_argument("empty sample set");
  const std::vector<Complex> tab = unit_roots(n);
  InverseTransform out;
  out.values.resize(n);
  for (int m = 0; m < n; ++m) {
    Complex acc = 0.0;
    for (int j = 0; j < n; ++j) acc += tab[(j * m) % n] * q_on_grid[j];
    acc /= static_cast<double>(n);
    out.values[m] = acc.real();
    out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
  }
  return out;
}

RingPopulations ring_populations(int n_cells, double t,
                                 const HoppingRates& r) {
  if (n_cells < 3) throw std::invalid_argument("n_cells must be >= 3");
  ComplexVector qp(n_cells), qm(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    const MomentumPopulations q =
        momentum_populations(grid_momentum(j, n_cells), t, r);
    qp[j] = q.q_plus;
    qm[j] = q.q_minus;
  }
  const InverseTransform tp = inverse_transform(qp);
  const InverseTransform tm = inverse_transform(qm);
  RingPopulations out;
  out.p_plus = tp.values;
  out.p_minus = tm.values;
  out.max_imag = std::max(tp.max_imag, tm.max_imag);
  return out;
}

}  // namespace qwalk
