#pragma once
// Bipartite ring lattice with loss on every second site.
//
// A unit cell m holds an amplitude a_m and a lossy amplitude b_m. Hopping v
// couples a_m <-> b_m inside a cell, v_prime couples a_m <-> b_{m+1} across
// the cell boundary, and b amplitudes leak at rate gamma. An optional on-site
// shift delta_offset acts on a_0 only, and g scales the on-site mean-field
// term. Probability emitted from each cell is tracked in a per-cell ledger so
// that norm + sum(decayed) stays constant in exact arithmetic.
//
// Besides the two-sublattice form, the same dynamics is available in a
// single-index chain representation (site alpha runs over 0..2n-1 around the
// ring) and, for the linear case, as a density-matrix equation of motion.

#include <utility>

#include "qwalk/types.hpp"

namespace qwalk {

enum class Sublattice { a, b };

struct LatticeParams {
  double v = 0.25;         // intra-cell hopping amplitude
  double v_prime = 0.5;    // inter-cell hopping amplitude
  double gamma = 2.0;      // loss rate of the b sites
  double g = 0.0;          // on-site mean-field strength (any sign)
  double eps_a = 0.0;      // on-site energy of a sites
  double eps_b = 0.0;      // on-site energy of b sites
  double delta_offset = 0.0;  // extra on-site energy of a_0 only
  int n_cells = 23;        // ring length in unit cells (2*n_cells sites)

  int sites() const { return 2 * n_cells; }
  // Throws std::invalid_argument if v, v_prime or gamma is negative, any
  // entry is non-finite, or n_cells < 3.
  void validate() const;
};

// Two-sublattice state. decayed[m] accumulates the probability emitted from
// b_m, i.e. d(decayed[m])/dt = gamma*|b_m|^2.
struct WalkState {
  ComplexVector a;
  ComplexVector b;
  RealVector decayed;
  double t = 0.0;

  static WalkState delta_at(int n_cells, int cell = 0);
  double total_norm() const { return a.squaredNorm() + b.squaredNorm(); }
  double emitted() const { return decayed.sum(); }
};

// Single-index chain state: c[2m] = a_m, c[2m+1] = b_{m+1 mod n}.
struct ChainState {
  ComplexVector c;

  static ChainState delta_at(int n_cells, int site = 0);
  double total_norm() const { return c.squaredNorm(); }
};

// Density matrix in the chain basis (2n x 2n).
struct DensityMatrix {
  ComplexMatrix rho;

  static DensityMatrix delta_at(int n_cells, int site = 0);
  static DensityMatrix pure(const ChainState& state);  // rho_ab = conj(c_a) c_b
  double trace_real() const { return rho.trace().real(); }
  double hermiticity_defect() const;  // max |rho - rho^dagger|
};

// Chain site alpha -> (cell, sublattice). alpha is reduced mod 2*n_cells, so
// any integer (including negative) addresses a site on the ring.
std::pair<int, Sublattice> map_index(int alpha, int n_cells);
// Inverse map; the result lies in 0..2*n_cells-1.
int chain_index(int cell, Sublattice s, int n_cells);

// Representative of (m - origin) mod n_cells in the window (-n/2, n/2].
int signed_cell_offset(int m, int origin, int n_cells);

// First moment of the emission ledger, sum_m offset(m)*decayed[m], with cell
// labels unwrapped around the given origin.
double displacement(const RealVector& decayed, int origin = 0);

// Equations of motion (hbar = 1). Loss enters through the non-Hermitian
// on-site term -i*gamma/2 on the b sites.
WalkState gpe_rhs(const WalkState& state, const LatticeParams& params);
ChainState chain_rhs(const ChainState& state, const LatticeParams& params);
// Linear-only density-matrix equation of motion; throws std::invalid_argument
// if params.g != 0.
DensityMatrix rho_rhs(const DensityMatrix& state, const LatticeParams& params);

// On-site energies and hop couplings of the chain representation.
//   i dc_alpha/dt = onsite[alpha] c_alpha - hop_up[alpha] c_{alpha+1}
//                   - hop_down[alpha] c_{alpha-1}   (+ mean-field term)
struct ChainCoefficients {
  ComplexVector onsite;
  RealVector hop_down;
  RealVector hop_up;
};
ChainCoefficients chain_coefficients(const LatticeParams& params);

// Dense chain generator H with H(alpha,alpha) = onsite[alpha],
// H(alpha,alpha+1) = -hop_up[alpha], H(alpha,alpha-1) = -hop_down[alpha],
// periodic across the ring edge.
ComplexMatrix chain_hamiltonian(const LatticeParams& params);

// Flat layouts used by the adaptive integrator. The ledger entries are kept
// in complex slots whose imaginary parts stay exactly zero under evolution.
//   walk  : [a_0..a_{n-1}, b_0..b_{n-1}, decayed_0..decayed_{n-1}]
//   chain : [c_0..c_{2n-1}, decayed_0..decayed_{n-1}]
void gpe_rhs_flat(const LatticeParams& params, const ComplexVector& y,
                  ComplexVector& dy);
void chain_rhs_flat(const LatticeParams& params, const ComplexVector& y,
                    ComplexVector& dy);

ComplexVector pack(const WalkState& state);
WalkState unpack_walk(const ComplexVector& y, int n_cells, double t = 0.0);
ComplexVector pack(const ChainState& state, int n_cells);
ChainState unpack_chain(const ComplexVector& y, int n_cells);

}  // namespace qwalk
