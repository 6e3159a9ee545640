#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "qwalk/lattice.hpp"

using namespace qwalk;

namespace {

// Deterministic pseudo-random states for property checks.
ComplexVector random_amplitudes(int size, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexVector v(size);
  for (int i = 0; i < size; ++i) v[i] = Complex(u(gen), u(gen));
  v /= v.norm();
  return v;
}

LatticeParams generic_params() {
  LatticeParams p;
  p.v = 0.31;
  p.v_prime = 0.47;
  p.gamma = 1.7;
  p.g = 0.0;
  p.eps_a = 0.2;
  p.eps_b = -0.1;
  p.delta_offset = 0.35;
  p.n_cells = 7;
  return p;
}

}  // namespace

TEST_CASE("parameter bounds are enforced") {
  LatticeParams p;
  CHECK_NOTHROW(p.validate());
  p.v = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = LatticeParams{};
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = LatticeParams{};
  p.n_cells = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = LatticeParams{};
  p.n_cells = 3;
  CHECK_NOTHROW(p.validate());
  p = LatticeParams{};
  p.g = -2.5;  // attractive interactions are allowed
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("chain index map") {
  const int n = 23;
  CHECK(map_index(0, n) == std::pair{0, Sublattice::a});
  CHECK(map_index(1, n) == std::pair{1, Sublattice::b});
  CHECK(map_index(2, n) == std::pair{1, Sublattice::a});
  CHECK(map_index(2 * n - 1, n) == std::pair{0, Sublattice::b});
  // -1 and 2n-1 address the same ring site
  CHECK(map_index(-1, n) == map_index(2 * n - 1, n));

  for (int alpha = 0; alpha < 2 * n; ++alpha) {
    const auto [cell, sub] = map_index(alpha, n);
    CHECK(chain_index(cell, sub, n) == alpha);
  }
  CHECK(chain_index(0, Sublattice::b, n) == 2 * n - 1);
  CHECK(chain_index(1, Sublattice::b, n) == 1);
}

TEST_CASE("signed offsets unwrap into (-n/2, n/2]") {
  CHECK(signed_cell_offset(0, 0, 23) == 0);
  CHECK(signed_cell_offset(11, 0, 23) == 11);
  CHECK(signed_cell_offset(12, 0, 23) == -11);
  CHECK(signed_cell_offset(22, 0, 23) == -1);
  CHECK(signed_cell_offset(3, 20, 23) == 6);
  // even ring: n/2 is kept positive, n/2+1 wraps negative
  CHECK(signed_cell_offset(2, 0, 4) == 2);
  CHECK(signed_cell_offset(3, 0, 4) == -1);

  RealVector dec = RealVector::Zero(23);
  dec[1] = 1.0;
  CHECK(displacement(dec) == 1.0);
  dec[1] = 0.25;
  dec[22] = 0.5;  // offset -1
  CHECK(displacement(dec) == doctest::Approx(0.25 - 0.5).epsilon(1e-15));
  CHECK(displacement(dec, 22) == doctest::Approx(2 * 0.25 + 0.0).epsilon(1e-15));
}

TEST_CASE("seeded walk derivative matches hand evaluation") {
  LatticeParams p;
  p.v = 0.25;
  p.v_prime = 0.5;
  p.gamma = 2.0;
  p.g = 0.0;
  p.delta_offset = 0.0;
  p.n_cells = 23;
  const WalkState s = WalkState::delta_at(p.n_cells, 0);
  const WalkState d = gpe_rhs(s, p);

  // a_0 = 1 feeds only b_0 (through v) and b_1 (through v_prime)
  CHECK(std::abs(d.a[0]) < 1e-15);
  CHECK(std::abs(d.b[0] - Complex(0.0, 0.125)) < 1e-15);
  CHECK(std::abs(d.b[1] - Complex(0.0, 0.25)) < 1e-15);
  for (int m = 2; m < p.n_cells; ++m) CHECK(std::abs(d.b[m]) < 1e-15);
  CHECK(d.decayed.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("offset and mean-field act on the launch site") {
  LatticeParams p;
  p.v = 0.0;
  p.v_prime = 0.0;
  p.gamma = 0.0;
  p.g = 2.0;
  p.delta_offset = 0.6;
  p.n_cells = 5;
  const WalkState s = WalkState::delta_at(p.n_cells, 0);
  const WalkState d = gpe_rhs(s, p);
  // da_0/dt = -i (delta + g |a_0|^2) a_0 = -2.6 i
  CHECK(std::abs(d.a[0] - Complex(0.0, -2.6)) < 1e-15);
}

TEST_CASE("loss enters amplitudes and ledger consistently") {
  LatticeParams p;
  p.v = 0.0;
  p.v_prime = 0.0;
  p.gamma = 2.0;
  p.n_cells = 5;
  WalkState s = WalkState::delta_at(p.n_cells, 0);
  s.a.setZero();
  s.b[3] = Complex(0.0, 0.6);
  const WalkState d = gpe_rhs(s, p);
  CHECK(std::abs(d.b[3] - (-0.5 * p.gamma) * s.b[3]) < 1e-15);
  CHECK(d.decayed[3] == doctest::Approx(2.0 * 0.36).epsilon(1e-15));
  CHECK(d.decayed[0] == 0.0);
}

TEST_CASE("derivative conserves norm plus ledger") {
  for (double g : {0.0, 1.3}) {
    LatticeParams p = generic_params();
    p.g = g;
    const int n = p.n_cells;
    WalkState s;
    s.a = random_amplitudes(n, 11);
    s.b = random_amplitudes(n, 12);
    s.decayed = RealVector::Zero(n);
    const WalkState d = gpe_rhs(s, p);
    // d/dt (|a|^2 + |b|^2) + d/dt sum(decayed) = 0
    double amp = 0.0;
    for (int m = 0; m < n; ++m)
      amp += 2.0 * (std::conj(s.a[m]) * d.a[m] + std::conj(s.b[m]) * d.b[m])
                 .real();
    CHECK(std::abs(amp + d.decayed.sum()) < 1e-14);
  }
}

TEST_CASE("chain form reproduces the two-sublattice derivative") {
  for (double g : {0.0, 1.5}) {
    LatticeParams p = generic_params();
    p.g = g;
    const int n = p.n_cells;
    WalkState s;
    s.a = random_amplitudes(n, 21);
    s.b = random_amplitudes(n, 22);
    s.decayed = RealVector::Zero(n);

    ChainState c;
    c.c.resize(2 * n);
    for (int alpha = 0; alpha < 2 * n; ++alpha) {
      const auto [cell, sub] = map_index(alpha, n);
      c.c[alpha] = (sub == Sublattice::a) ? s.a[cell] : s.b[cell];
    }

    const WalkState dw = gpe_rhs(s, p);
    const ChainState dc = chain_rhs(c, p);
    for (int alpha = 0; alpha < 2 * n; ++alpha) {
      const auto [cell, sub] = map_index(alpha, n);
      const Complex expect = (sub == Sublattice::a) ? dw.a[cell] : dw.b[cell];
      CHECK(std::abs(dc.c[alpha] - expect) < 1e-14);
    }
  }
}

TEST_CASE("seeded chain derivative with offset") {
  LatticeParams p;
  p.v = 0.25;
  p.v_prime = 0.5;
  p.gamma = 2.0;
  p.delta_offset = 0.6;
  p.n_cells = 23;
  const ChainState s = ChainState::delta_at(p.n_cells, 0);
  const ChainState d = chain_rhs(s, p);
  CHECK(std::abs(d.c[0] - Complex(0.0, -0.6)) < 1e-15);
  CHECK(std::abs(d.c[1] - Complex(0.0, 0.25)) < 1e-15);  // i v'/2
  CHECK(std::abs(d.c[2 * p.n_cells - 1] - Complex(0.0, 0.125)) < 1e-15);  // i v/2
}

TEST_CASE("chain hamiltonian matches the stencil") {
  LatticeParams p = generic_params();
  const int d = 2 * p.n_cells;
  const ComplexMatrix h = chain_hamiltonian(p);
  ChainState s;
  s.c = random_amplitudes(d, 31);
  const ChainState dc = chain_rhs(s, p);
  const ComplexVector expect = Complex(0.0, -1.0) * (h * s.c);
  CHECK((dc.c - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("density derivative agrees with the pure-state product rule") {
  LatticeParams p = generic_params();
  const int d = 2 * p.n_cells;
  ChainState s;
  s.c = random_amplitudes(d, 41);
  const ChainState dc = chain_rhs(s, p);
  const DensityMatrix rho = DensityMatrix::pure(s);
  const DensityMatrix drho = rho_rhs(rho, p);
  const ComplexMatrix expect =
      dc.c.conjugate() * s.c.transpose() + s.c.conjugate() * dc.c.transpose();
  CHECK((drho.rho - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("density derivative of the seeded state") {
  LatticeParams p;
  p.v = 0.25;
  p.v_prime = 0.5;
  p.gamma = 2.0;
  p.n_cells = 5;
  const DensityMatrix rho = DensityMatrix::delta_at(p.n_cells, 0);
  CHECK(rho.trace_real() == doctest::Approx(1.0).epsilon(1e-15));
  const DensityMatrix drho = rho_rhs(rho, p);
  // the launch-site population has no first-order loss
  CHECK(std::abs(drho.rho(0, 0)) < 1e-15);
}

TEST_CASE("density derivative rejects interacting systems") {
  LatticeParams p = generic_params();
  p.g = 0.5;
  const DensityMatrix rho = DensityMatrix::delta_at(p.n_cells, 0);
  CHECK_THROWS_AS(rho_rhs(rho, p), std::invalid_argument);
}

TEST_CASE("derivative commutes with ring translations when the offset is off") {
  LatticeParams p = generic_params();
  p.delta_offset = 0.0;
  p.g = 0.0;
  const int n = p.n_cells;
  WalkState s;
  s.a = random_amplitudes(n, 51);
  s.b = random_amplitudes(n, 52);
  s.decayed = RealVector::Zero(n);

  const int shift = 3;
  WalkState sh;
  sh.a.resize(n);
  sh.b.resize(n);
  sh.decayed = RealVector::Zero(n);
  for (int m = 0; m < n; ++m) {
    sh.a[(m + shift) % n] = s.a[m];
    sh.b[(m + shift) % n] = s.b[m];
  }
  const WalkState d = gpe_rhs(s, p);
  const WalkState dsh = gpe_rhs(sh, p);
  for (int m = 0; m < n; ++m) {
    CHECK(std::abs(dsh.a[(m + shift) % n] - d.a[m]) < 1e-14);
    CHECK(std::abs(dsh.b[(m + shift) % n] - d.b[m]) < 1e-14);
  }
}

TEST_CASE("pack and unpack round trip") {
  WalkState s;
  s.a = random_amplitudes(6, 61);
  s.b = random_amplitudes(6, 62);
  s.decayed = RealVector::LinSpaced(6, 0.0, 0.5);
  const WalkState r = unpack_walk(pack(s), 6);
  CHECK((r.a - s.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.b - s.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.decayed - s.decayed).cwiseAbs().maxCoeff() == 0.0);
}
