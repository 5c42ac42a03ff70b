#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "oracle.hpp"
#include "rep/compiler.hpp"

using namespace rep;
using namespace rep::compiler;
namespace o = oracle;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_params(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> p(static_cast<std::size_t>(count));
  for (double& x : p) x = u(rng);
  return p;
}

// Wires in |+>, one |0> ancilla per slotted gate (ancillas first), coupled by
// CNOTs from every wire of the support; Clifford gates act on the wires.
o::Vec resource_oracle(const cf::GateSequence& seq) {
  const int nw = seq.num_qubits;
  int na = 0;
  for (const auto& g : seq.gates) na += g.slot ? 1 : 0;
  const int n = nw + na;
  o::Vec psi = o::Vec::Zero(1 << n);
  psi(0) = 1;
  for (int w = 0; w < nw; ++w) psi = o::embed(o::H(), na + w, n) * psi;
  int k = 0;
  for (const auto& sg : seq.gates) {
    const qsim::Gate& g = sg.gate;
    if (sg.slot) {
      for (int w : g.qubits) psi = o::cnot(na + w, k, n) * psi;
      ++k;
      continue;
    }
    std::vector<int> q;
    for (int w : g.qubits) q.push_back(na + w);
    switch (g.kind) {
      case qsim::GateKind::H: psi = o::embed(o::H(), q[0], n) * psi; break;
      case qsim::GateKind::Phase: psi = o::phase(q, g.angle, n) * psi; break;
      case qsim::GateKind::XPhase: psi = o::x_phase(q[0], g.angle, n) * psi; break;
      case qsim::GateKind::CZ: psi = o::cz(q[0], q[1], n) * psi; break;
      case qsim::GateKind::CNOT: psi = o::cnot(q[0], q[1], n) * psi; break;
      default: break;
    }
  }
  return psi;
}

cf::GateSequence random_sequence(int n, int length, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 5), wire(0, n - 1), off(1, n - 1), turns(-3, 3);
  cf::GateSequence seq{n, {}};
  int slots = 0;
  while (static_cast<int>(seq.gates.size()) < length) {
    const int k = kind(rng);
    const int a = off(rng);  // never qubit 0 for non-diagonal single-qubit gates
    std::vector<int> support;
    for (int q = 0; q < n; ++q) {
      if (rng() & 1) support.push_back(q);
    }
    if (support.empty()) support.push_back(wire(rng));
    switch (k) {
      case 0: seq.gates.push_back({qsim::Gate::h(a), std::nullopt}); break;
      case 1: seq.gates.push_back({qsim::Gate::x_phase(a, turns(rng) * kPi / 4), std::nullopt}); break;
      case 2: {
        const int b = wire(rng);
        if (b != a) seq.gates.push_back({qsim::Gate::cz(a, b), std::nullopt});
        break;
      }
      case 3: {
        const int c = wire(rng);
        if (c != a) seq.gates.push_back({qsim::Gate::cnot(c, a), std::nullopt});
        break;
      }
      case 4: seq.gates.push_back({qsim::Gate::phase(support, turns(rng) * kPi / 4), std::nullopt}); break;
      default:
        seq.gates.push_back({qsim::Gate::phase(support, 0.0), cf::Slot{slots++, (rng() & 1) ? 1.0 : -0.5}});
        break;
    }
  }
  return seq;
}

}  // namespace

TEST(Compiler, ThreeQubitLayout) {
  const CompiledProtocol cp = compile(cf::cf_circuit(3));
  EXPECT_EQ(cp.num_ancillas, 5);
  EXPECT_EQ(cp.total_qubits(), 8);
  std::set<int> positions, ancillas;
  for (const auto& s : cp.schedule) {
    positions.insert(s.position);
    ancillas.insert(s.ancilla);
  }
  EXPECT_EQ(positions, (std::set<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(ancillas, (std::set<int>{0, 1, 2, 3, 4}));
  for (const auto& g : cp.circuit) EXPECT_TRUE(qsim::is_clifford(g));
  EXPECT_EQ(cp.output_map, (std::vector<int>{5, 6, 7}));
}

TEST(Compiler, ResourceMatchesDenseConstruction) {
  for (const cf::GateSequence& seq : {cf::cf_circuit(2), cf::cf_circuit(3)}) {
    const CompiledProtocol cp = compile(seq);
    EXPECT_NEAR(o::overlap2(resource_state(cp).amplitudes(), resource_oracle(seq)), 1.0, 1e-10);
  }
}

TEST(Compiler, ResourceEntanglementAcrossTheCut) {
  const CompiledProtocol cp = compile(cf::cf_circuit(3));
  const o::Vec psi = resource_state(cp).amplitudes();
  EXPECT_NEAR(o::entropy_bits(o::reduced(psi, {0, 1, 2, 3, 4}, 8)), 3.0, 1e-9);
}

TEST(Compiler, ExhaustiveOutcomesThreeQubits) {
  const CompiledProtocol cp = compile(cf::cf_circuit(3));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = random_params(5, rng);
    const auto target = cf::cf_state(3, p);
    for (int pattern = 0; pattern < 32; ++pattern) {
      std::vector<int> forced;
      for (int k = 4; k >= 0; --k) forced.push_back((pattern >> k) & 1);
      qsim::OutcomeSource src = qsim::OutcomeSource::forced(forced);
      const ScheduleResult r = run_schedule(cp, p, src);
      EXPECT_EQ(r.raw_outcomes, forced);
      EXPECT_GE(qsim::fidelity(corrected_output(r), target), 1.0 - 1e-9) << pattern;
      EXPECT_TRUE(r.correction.at(0) == pauli::Pauli::I || r.correction.at(0) == pauli::Pauli::Z);
    }
  }
}

TEST(Compiler, RandomSequencesAreDeterministicAfterCorrection) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const cf::GateSequence seq = random_sequence(3, 8, rng);
    const CompiledProtocol cp = compile(seq);
    const auto p = random_params(std::max(seq.slot_count(), 1), rng);
    const o::Vec want = qsim::apply_circuit(qsim::StateVector::plus(3), seq.bind(p)).amplitudes();
    for (int rep = 0; rep < 3; ++rep) {
      qsim::OutcomeSource src = qsim::OutcomeSource::sampled(rng);
      const ScheduleResult r = run_schedule(cp, p, src);
      EXPECT_NEAR(o::overlap2(corrected_output(r).amplitudes(), want), 1.0, 1e-9) << seq.to_json().dump();
    }
  }
}

TEST(Compiler, FrameRules) {
  MeasurementStep step;
  step.ancilla = 1;
  const auto check = [&](const char* frame, int sign, int flip) {
    const EffectiveMeasurement e = effective_measurement(step, pauli::PauliString::parse(frame));
    EXPECT_EQ(e.sign, sign) << frame;
    EXPECT_EQ(e.flip, flip) << frame;
  };
  check("ZIX", 1, 0);
  check("IXI", -1, 0);
  check("IZI", 1, 1);
  check("IYI", -1, 1);
}

TEST(Compiler, FrameConjugationTracksGates) {
  const auto f = frame_conjugate(pauli::PauliString::parse("XI"), qsim::Gate::cnot(0, 1));
  EXPECT_EQ(f.to_string(), "+XX");
  const auto g = frame_conjugate(pauli::PauliString::parse("XI"), qsim::Gate::h(0));
  EXPECT_EQ(g.to_string(), "+ZI");
}

TEST(Compiler, ParameterIndependentResource) {
  const CompiledProtocol a = compile(cf::cf_circuit(3));
  const CompiledProtocol b = compile(cf::cf_circuit(3));
  EXPECT_EQ(a.circuit_hash(), b.circuit_hash());
  EXPECT_NE(a.circuit_hash(), compile(cf::mes_circuit()).circuit_hash());
}

TEST(Compiler, GoldenThreeQubitCompilation) {
  const std::filesystem::path path = std::filesystem::path(TEST_DATA_DIR) / "compile_n3.json";
  std::ifstream f(path);
  ASSERT_TRUE(f.good()) << path;
  const nlohmann::json golden = nlohmann::json::parse(f);
  EXPECT_EQ(compile(cf::cf_circuit(3)).to_json(), golden);
}

TEST(Compiler, QubitBudget) {
  cf::GateSequence seq{4, {}};
  for (int i = 0; i < 20; ++i) seq.gates.push_back({qsim::Gate::phase({i % 4}, 0.0), cf::Slot{i, 1.0}});
  EXPECT_THROW(compile(seq), std::invalid_argument);
}

TEST(Compiler, GadgetsMatchDirectApplication) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  int passed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<int> support;
    for (int q = 0; q < n; ++q) {
      if (rng() & 1) support.push_back(q);
    }
    if (support.empty()) support.push_back(static_cast<int>(rng() % static_cast<unsigned>(n)));
    const qsim::Gate g = qsim::Gate::phase(support, ang(rng));
    const auto input = qsim::StateVector::from_amplitudes(o::random_state(n, rng));
    const auto variant = trial % 2 ? GadgetVariant::Teleported : GadgetVariant::Direct;
    passed += gadget_check(g, input, rng, variant) ? 1 : 0;
  }
  EXPECT_EQ(passed, 200);
}
