#include "qwalk/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwalk {

namespace {

constexpr Complex kI{0.0, 1.0};

bool all_finite(const LatticeParams& p) {
  return std::isfinite(p.v) && std::isfinite(p.v_prime) &&
         std::isfinite(p.gamma) && std::isfinite(p.g) &&
         std::isfinite(p.eps_a) && std::isfinite(p.eps_b) &&
         std::isfinite(p.delta_offset);
}

}  // namespace

void LatticeParams::validate() const {
  if (!all_finite(*this))
    throw std::invalid_argument("lattice parameters must be finite");
  if (v < 0.0) throw std::invalid_argument("v must be >= 0");
  if (v_prime < 0.0) throw std::invalid_argument("v_prime must be >= 0");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (n_cells < 3)
    throw std::invalid_argument("n_cells must be >= 3, got " +
                                std::to_string(n_cells));
}

WalkState WalkState::delta_at(int n_cells, int cell) {
  WalkState s;
  s.a = ComplexVector::Zero(n_cells);
  s.b = ComplexVector::Zero(n_cells);
  s.decayed = RealVector::Zero(n_cells);
  s.a[((cell % n_cells) + n_cells) % n_cells] = 1.0;
  return s;
}

ChainState ChainState::delta_at(int n_cells, int site) {
  ChainState s;
  s.c = ComplexVector::Zero(2 * n_cells);
  s.c[((site % (2 * n_cells)) + 2 * n_cells) % (2 * n_cells)] = 1.0;
  return s;
}

DensityMatrix DensityMatrix::delta_at(int n_cells, int site) {
  return pure(ChainState::delta_at(n_cells, site));
}

DensityMatrix DensityMatrix::pure(const ChainState& state) {
  DensityMatrix d;
  d.rho = state.c.conjugate() * state.c.transpose();
  return d;
}

double DensityMatrix::hermiticity_defect() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

std::pair<int, Sublattice> map_index(int alpha, int n_cells) {
  const int period = 2 * n_cells;
  const int r = ((alpha % period) + period) % period;
  if (r % 2 == 0) return {r / 2, Sublattice::a};
  return {((r + 1) / 2) % n_cells, Sublattice::b};
}

int chain_index(int cell, Sublattice s, int n_cells) {
  const int period = 2 * n_cells;
  const int m = ((cell % n_cells) + n_cells) % n_cells;
  const int alpha = (s == Sublattice::a) ? 2 * m : 2 * m - 1;
  return ((alpha % period) + period) % period;
}

int signed_cell_offset(int m, int origin, int n_cells) {
  int d = ((m - origin) % n_cells + n_cells) % n_cells;
  if (2 * d > n_cells) d -= n_cells;
  return d;
}

double displacement(const RealVector& decayed, int origin) {
  const int n = static_cast<int>(decayed.size());
  double dm = 0.0;
  for (int m = 0; m < n; ++m)
    dm += signed_cell_offset(m, origin, n) * decayed[m];
  return dm;
}

void gpe_rhs_flat(const LatticeParams& p, const ComplexVector& y,
                  ComplexVector& dy) {
  const int n = p.n_cells;
  const double hv = 0.5 * p.v;
  const double hvp = 0.5 * p.v_prime;
  const Complex eb(p.eps_b, -0.5 * p.gamma);
  for (int m = 0; m < n; ++m) {
    const Complex am = y[m];
    const Complex bm = y[n + m];
    const Complex bnext = y[n + (m + 1) % n];
    const double onsite_a =
        p.eps_a + (m == 0 ? p.delta_offset : 0.0) + p.g * std::norm(am);
    dy[m] = -kI * (onsite_a * am - hv * bm - hvp * bnext);
  }
  for (int m = 0; m < n; ++m) {
    const Complex bm = y[n + m];
    const Complex am = y[m];
    const Complex aprev = y[(m + n - 1) % n];
    dy[n + m] = -kI * ((eb + p.g * std::norm(bm)) * bm - hv * am - hvp * aprev);
    dy[2 * n + m] = Complex(p.gamma * std::norm(bm), 0.0);
  }
}

ChainCoefficients chain_coefficients(const LatticeParams& p) {
  const int d = 2 * p.n_cells;
  ChainCoefficients cc;
  cc.onsite.resize(d);
  cc.hop_down.resize(d);
  cc.hop_up.resize(d);
  const Complex eb(p.eps_b, -0.5 * p.gamma);
  for (int alpha = 0; alpha < d; ++alpha) {
    if (alpha % 2 == 0) {
      cc.onsite[alpha] = p.eps_a + (alpha == 0 ? p.delta_offset : 0.0);
      cc.hop_down[alpha] = 0.5 * p.v;
      cc.hop_up[alpha] = 0.5 * p.v_prime;
    } else {
      cc.onsite[alpha] = eb;
      cc.hop_down[alpha] = 0.5 * p.v_prime;
      cc.hop_up[alpha] = 0.5 * p.v;
    }
  }
  return cc;
}

ComplexMatrix chain_hamiltonian(const LatticeParams& p) {
  const int d = 2 * p.n_cells;
  const ChainCoefficients cc = chain_coefficients(p);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int alpha = 0; alpha < d; ++alpha) {
    h(alpha, alpha) = cc.onsite[alpha];
    h(alpha, (alpha + 1) % d) = -cc.hop_up[alpha];
    h(alpha, (alpha + d - 1) % d) = -cc.hop_down[alpha];
  }
  return h;
}

void chain_rhs_flat(const LatticeParams& p, const ComplexVector& y,
                    ComplexVector& dy) {
  const int n = p.n_cells;
  const int d = 2 * n;
  const double hv = 0.5 * p.v;
  const double hvp = 0.5 * p.v_prime;
  const Complex eb(p.eps_b, -0.5 * p.gamma);
  for (int alpha = 0; alpha < d; ++alpha) {
    const Complex c = y[alpha];
    const Complex up = y[(alpha + 1) % d];
    const Complex down = y[(alpha + d - 1) % d];
    Complex onsite;
    double jd, ju;
    if (alpha % 2 == 0) {
      onsite = p.eps_a + (alpha == 0 ? p.delta_offset : 0.0);
      jd = hv;
      ju = hvp;
    } else {
      onsite = eb;
      jd = hvp;
      ju = hv;
    }
    dy[alpha] = -kI * ((onsite + p.g * std::norm(c)) * c - ju * up - jd * down);
  }
  for (int j = 0; j < n; ++j) {
    const int alpha = 2 * j + 1;
    const int cell = (j + 1) % n;
    dy[d + cell] = Complex(p.gamma * std::norm(y[alpha]), 0.0);
  }
}

WalkState gpe_rhs(const WalkState& state, const LatticeParams& p) {
  p.validate();
  const int n = p.n_cells;
  ComplexVector y(3 * n), dy(3 * n);
  y.head(n) = state.a;
  y.segment(n, n) = state.b;
  y.tail(n) = state.decayed.cast<Complex>();
  gpe_rhs_flat(p, y, dy);
  WalkState out;
  out.a = dy.head(n);
  out.b = dy.segment(n, n);
  out.decayed = dy.tail(n).real();
  out.t = state.t;
  return out;
}

ChainState chain_rhs(const ChainState& state, const LatticeParams& p) {
  p.validate();
  const int n = p.n_cells;
  ComplexVector y = ComplexVector::Zero(3 * n), dy(3 * n);
  y.head(2 * n) = state.c;
  chain_rhs_flat(p, y, dy);
  ChainState out;
  out.c = dy.head(2 * n);
  return out;
}

DensityMatrix rho_rhs(const DensityMatrix& state, const LatticeParams& p) {
  p.validate();
  if (p.g != 0.0)
    throw std::invalid_argument(
        "density-matrix propagation is defined for the linear system only "
        "(g must be 0)");
  const ComplexMatrix h = chain_hamiltonian(p);
  DensityMatrix out;
  out.rho = kI * (h.conjugate() * state.rho - state.rho * h.transpose());
  return out;
}

ComplexVector pack(const WalkState& state) {
  const int n = static_cast<int>(state.a.size());
  ComplexVector y(3 * n);
  y.head(n) = state.a;
  y.segment(n, n) = state.b;
  y.tail(n) = state.decayed.cast<Complex>();
  return y;
}

WalkState unpack_walk(const ComplexVector& y, int n_cells, double t) {
  WalkState s;
  s.a = y.head(n_cells);
  s.b = y.segment(n_cells, n_cells);
  s.decayed = y.tail(n_cells).real();
  s.t = t;
  return s;
}

ComplexVector pack(const ChainState& state, int n_cells) {
  ComplexVector y = ComplexVector::Zero(3 * n_cells);
  y.head(2 * n_cells) = state.c;
  return y;
}

ChainState unpack_chain(const ComplexVector& y, int n_cells) {
  ChainState s;
  s.c = y.head(2 * n_cells);
  return s;
}

}  // namespace qwalk
