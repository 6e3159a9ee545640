#pragma once
// Closed-form solution of the constant-rate classical dynamics in momentum
// space. The rate matrix is circulant in the cell index, so the n-point
// discrete transform diagonalizes it exactly on the periodic ring; the
// inverse transform therefore reproduces direct integration to solver
// accuracy, and the k->0 structure yields the closed-form displacement.

#include <complex>
#include <utility>

#include "qwalk/rate.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

// Per-mode data: coupling gamma_k = rate_v + rate_vp e^{ik} and the two real
// decay eigenvalues lambda_minus <= lambda_plus < 0 (gamma > 0 required).
struct MomentumSolution {
  double k = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  Complex gamma_k;
};
MomentumSolution solve_momentum_mode(double k, const HoppingRates& rates);

// Populations of mode k at time t >= 0 from the initial data (1, 0):
//   q+ = [(l+ + rate0p) e^{l+ t} - (l- + rate0p) e^{l- t}] / (l+ - l-)
//   q- = conj(gamma_k) (e^{l+ t} - e^{l- t}) / (l+ - l-)
// q+ is real because it only involves |gamma_k|^2 through the eigenvalues.
struct MomentumPopulations {
  double q_plus = 0.0;
  Complex q_minus;
};
MomentumPopulations momentum_populations(double k, double t,
                                         const HoppingRates& rates);

// Time integral of q-: Q_k = conj(gamma_k) / (rate0 rate0p - |gamma_k|^2).
// Throws std::domain_error if the denominator is not positive.
Complex q_integral(double k, const HoppingRates& rates);

// Mean signed emission cell of the infinite lattice, rate_vp / rate0,
// with the exact-complement construction: swapping the two rates maps the
// result to exactly 1 minus it. Throws std::domain_error when rate0 = 0.
double analytic_displacement(const HoppingRates& rates);

// The same quantity through the i gamma dQ_k/dk route at k = 0, by central
// finite difference; cross-validation only.
double analytic_displacement_fd(const HoppingRates& rates, double dk = 1e-5);

// Discrete inverse transform of samples on the grid k_j = 2 pi j / n mapped
// to [-pi, pi): p_m = (1/n) sum_j e^{i k_j m} q_j. values is the real part;
// max_imag reports the largest dropped imaginary magnitude (nonzero beyond
// rounding means the sample set was not conjugate-symmetric).
struct InverseTransform {
  RealVector values;
  double max_imag = 0.0;
};
InverseTransform inverse_transform(const ComplexVector& q_on_grid);

// Both sublattice population profiles of the n-cell ring at time t.
struct RingPopulations {
  RealVector p_plus;
  RealVector p_minus;
  double max_imag = 0.0;
};
RingPopulations ring_populations(int n_cells, double t,
                                 const HoppingRates& rates);

// Signed grid momentum for row j of an n-point transform, in [-pi, pi).
double grid_momentum(int j, int n_cells);

}  // namespace qwalk
