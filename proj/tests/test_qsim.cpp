#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracle.hpp"
#include "rep/qsim.hpp"

using namespace rep::qsim;
namespace o = oracle;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector from(const o::Vec& v) { return StateVector::from_amplitudes(v); }

o::Mat dense(const Gate& g, int n) {
  switch (g.kind) {
    case GateKind::H: return o::embed(o::H(), g.qubits[0], n);
    case GateKind::Phase: return o::phase(g.qubits, g.angle, n);
    case GateKind::XPhase: return o::x_phase(g.qubits[0], g.angle, n);
    case GateKind::CZ: return o::cz(g.qubits[0], g.qubits[1], n);
    case GateKind::CNOT: return o::cnot(g.qubits[0], g.qubits[1], n);
    case GateKind::Unitary: return o::embed(g.matrix, g.qubits[0], n);
  }
  return {};
}

}  // namespace

TEST(Qsim, QubitZeroIsMostSignificantBit) {
  const StateVector s = apply_gate(StateVector(3), Gate::x_phase(0, kPi / 2));
  EXPECT_NEAR(std::abs(s.amplitude(0b100)), 1.0, 1e-12);
  const StateVector t = apply_gate(StateVector(3), Gate::x_phase(2, kPi / 2));
  EXPECT_NEAR(std::abs(t.amplitude(0b001)), 1.0, 1e-12);
}

TEST(Qsim, GatesMatchDenseOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  const int n = 4;
  std::vector<Gate> gates = {Gate::h(0),          Gate::h(3),         Gate::phase({1}, ang(rng)),
                             Gate::phase({0, 2}, ang(rng)), Gate::phase({0, 1, 3}, ang(rng)),
                             Gate::x_phase(2, ang(rng)),    Gate::cz(0, 3),     Gate::cz(2, 1),
                             Gate::cnot(1, 3),              Gate::cnot(3, 0),   Gate::unitary(1, o::random_unitary2(rng))};
  for (const Gate& g : gates) {
    const o::Vec in = o::random_state(n, rng);
    const o::Vec want = dense(g, n) * in;
    const StateVector got = apply_gate(from(in), g);
    EXPECT_LT((got.amplitudes() - want).norm(), 1e-12) << to_string(g.kind);
  }
}

TEST(Qsim, MalformedGatesRejected) {
  EXPECT_THROW(apply_gate(StateVector(2), Gate::h(2)), std::out_of_range);
  EXPECT_THROW(apply_gate(StateVector(2), Gate::phase({}, 0.1)), std::invalid_argument);
  EXPECT_THROW(apply_gate(StateVector(2), Gate::phase({0, 0}, 0.1)), std::invalid_argument);
  EXPECT_THROW(apply_gate(StateVector(2), Gate::phase({0}, std::numeric_limits<double>::quiet_NaN())),
               std::invalid_argument);
  EXPECT_THROW(apply_gate(StateVector(2), Gate::cnot(1, 1)), std::invalid_argument);
  EXPECT_THROW(apply_gate(StateVector(2), Gate::unitary(0, o::Mat::Constant(2, 2, 1.0))), std::invalid_argument);
}

TEST(Qsim, FromAmplitudesValidates) {
  EXPECT_THROW(StateVector::from_amplitudes(Eigen::VectorXcd::Ones(3) / std::sqrt(3.0)), std::invalid_argument);
  EXPECT_THROW(StateVector::from_amplitudes(Eigen::VectorXcd::Ones(4)), std::invalid_argument);
}

TEST(Qsim, CliffordDetection) {
  EXPECT_TRUE(is_clifford(Gate::phase({0}, kPi / 4)));
  EXPECT_TRUE(is_clifford(Gate::x_phase(0, -3 * kPi / 4)));
  EXPECT_FALSE(is_clifford(Gate::phase({0}, 0.3)));
  EXPECT_FALSE(is_clifford(Gate::unitary(0, o::H())));
  EXPECT_EQ(quarter_turns(-kPi / 2), -2);
  EXPECT_FALSE(quarter_turns(0.1).has_value());
}

TEST(Qsim, MeasureBasisMatchesProjection) {
  std::mt19937_64 rng(3);
  const int n = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const o::Vec psi = o::random_state(n, rng);
    const double beta = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    for (int q = 0; q < n; ++q) {
      for (int out = 0; out < 2; ++out) {
        // Basis vector Z^out exp(-i beta Z)|+>.
        o::Vec v = (o::Z().pow(out) * (o::C(0, -beta) * o::Z()).exp() * o::plus_state(1)).eval();
        EXPECT_LT((basis_vector(beta, out) - v).norm(), 1e-12);
        OutcomeSource src = OutcomeSource::forced({out});
        const MeasureResult r = measure_basis(from(psi), q, beta, src);
        // Oracle: contract with <v| on qubit q.
        std::vector<o::Mat> ops(n, o::I2());
        ops[static_cast<std::size_t>(q)] = v.adjoint();
        const o::Vec proj = o::tensor(ops) * psi;
        EXPECT_NEAR(r.probability, proj.squaredNorm(), 1e-12);
        EXPECT_NEAR(fidelity(r.post_state, from(proj.normalized())), 1.0, 1e-12);
      }
    }
  }
}

TEST(Qsim, ForcedImpossibleOutcomeThrows) {
  OutcomeSource src = OutcomeSource::forced({1});
  // |+> measured in B_0 = {|+>, |->}: outcome 1 has probability 0.
  EXPECT_THROW(measure_basis(StateVector::plus(1), 0, 0.0, src), std::domain_error);
  OutcomeSource empty = OutcomeSource::forced({});
  EXPECT_THROW(measure_basis(StateVector::plus(1), 0, 0.0, empty), std::out_of_range);
}

TEST(Qsim, BellMeasureMatchesProjection) {
  std::mt19937_64 rng(5);
  const int n = 4;
  const o::Vec phi = (o::Vec(4) << 1, 0, 0, 1).finished() / std::sqrt(2.0);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {2, 0}, {1, 3}}) {
    const o::Vec psi = o::random_state(n, rng);
    // Move (a, b) to the front with the library's permutation and contract there.
    std::vector<int> order{a, b};
    for (int q = 0; q < n; ++q) {
      if (q != a && q != b) order.push_back(q);
    }
    const o::Vec moved = from(psi).permuted(order).amplitudes();
    for (int k = 0; k < 4; ++k) {
      const o::Vec bell = o::kron(o::pauli(k), o::I2()) * phi;
      const o::Vec proj = o::kron(bell.adjoint(), o::Mat::Identity(4, 4)) * moved;
      OutcomeSource src = OutcomeSource::forced({k});
      const MeasureResult r = bell_measure(from(psi), a, b, src);
      EXPECT_NEAR(r.probability, proj.squaredNorm(), 1e-12);
      EXPECT_NEAR(fidelity(r.post_state, from(proj.normalized())), 1.0, 1e-12);
    }
  }
}

TEST(Qsim, PermutedMovesQubits) {
  const StateVector s = StateVector::basis(3, 0b100).permuted(std::vector<int>{1, 2, 0});
  EXPECT_NEAR(std::abs(s.amplitude(0b001)), 1.0, 1e-15);
}

TEST(Qsim, EntropyMatchesOracle) {
  std::mt19937_64 rng(9);
  const int n = 5;
  const o::Vec psi = o::random_state(n, rng);
  for (const std::vector<int>& cut : {std::vector<int>{0}, {1, 3}, {0, 2, 4}}) {
    EXPECT_NEAR(entanglement_entropy(from(psi), cut), o::entropy_bits(o::reduced(psi, cut, n)), 1e-10);
  }
  const o::Vec bell = o::graph_state(2, {{0, 1}});
  EXPECT_NEAR(entanglement_entropy(from(bell), std::vector<int>{0}), 1.0, 1e-12);
}

TEST(Qsim, FidelityIgnoresGlobalPhase) {
  std::mt19937_64 rng(1);
  const o::Vec psi = o::random_state(3, rng);
  EXPECT_NEAR(fidelity(from(psi), from(psi * std::polar(1.0, 0.7))), 1.0, 1e-14);
}

TEST(Qsim, DensityMatrixValidation) {
  EXPECT_THROW(DensityMatrix::from_matrix(o::Mat::Identity(4, 4)), std::invalid_argument);
  o::Mat m = o::Mat::Identity(2, 2) / 2.0;
  m(0, 1) = 0.3;
  EXPECT_THROW(DensityMatrix::from_matrix(m), std::invalid_argument);
}

TEST(Qsim, DepolarizingMatchesKraus) {
  std::mt19937_64 rng(2);
  const int n = 3;
  const o::Vec psi = o::random_state(n, rng);
  const DensityMatrix rho = DensityMatrix::from_pure(from(psi));
  for (int q = 0; q < n; ++q) {
    const o::Mat want = o::depolarize(psi * psi.adjoint(), q, n, 0.37);
    EXPECT_LT((rho.depolarized(q, 0.37).matrix() - want).norm(), 1e-12);
  }
}

TEST(Qsim, DepolarizingCommutesWithLocalUnitaries) {
  std::mt19937_64 rng(4);
  const int n = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const o::Vec psi = o::random_state(n, rng);
    const int q = trial % n;
    const o::Mat u = o::embed(o::random_unitary2(rng), q, n);
    const DensityMatrix rho = DensityMatrix::from_pure(from(psi));
    const o::Mat a = rho.conjugated(u).depolarized(q, 0.6).matrix();
    const o::Mat b = rho.depolarized(q, 0.6).conjugated(u).matrix();
    EXPECT_LT((a - b).norm(), 1e-12);
  }
}

TEST(Qsim, PartialTransposeOfBellState) {
  const o::Vec bell = o::graph_state(2, {{0, 1}});
  const DensityMatrix rho = DensityMatrix::from_pure(from(bell));
  EXPECT_NEAR(ppt_min_eigenvalue(rho, std::vector<int>{1}), -0.5, 1e-12);
  // Fully depolarized second qubit: separable.
  EXPECT_GE(ppt_min_eigenvalue(rho.depolarized(1, 0.0), std::vector<int>{1}), -1e-12);
  // Transposing everything leaves the spectrum unchanged.
  const o::Mat full = rho.partial_transpose(std::vector<int>{0, 1}).matrix();
  EXPECT_LT((full - rho.matrix().transpose()).norm(), 1e-14);
}

TEST(Qsim, SampledOutcomesAreSeeded) {
  std::mt19937_64 r1(42), r2(42);
  OutcomeSource a = OutcomeSource::sampled(r1), b = OutcomeSource::sampled(r2);
  std::vector<int> xa, xb;
  for (int i = 0; i < 50; ++i) {
    xa.push_back(measure_basis(StateVector::plus(1), 0, 0.4, a).outcome);
    xb.push_back(measure_basis(StateVector::plus(1), 0, 0.4, b).outcome);
  }
  EXPECT_EQ(xa, xb);
}
