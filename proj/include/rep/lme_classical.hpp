#pragma once

// Locally maximally entanglable states (LMES) built from generalized phase
// gates, their generalized stabilizers, single-copy bit extraction for
// pi-phase states, and a classical channel riding on the preparation
// randomness.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "rep/canonical_form.hpp"
#include "rep/graphstab.hpp"
#include "rep/qsim.hpp"

namespace rep::lme {

/// Multiplies basis states whose bits on `support` are all 1 by e^{i angle}.
struct LmesGate {
  std::vector<int> support;
  double angle = 0.0;
};

struct LmesSpec {
  int num_qubits = 0;
  std::vector<LmesGate> gates;

  /// Every angle is 0 or pi modulo 2 pi (within 1e-12).
  bool is_pi() const;
  /// Qubits sharing a gate are adjacent.
  graphstab::Graph interaction_graph() const;
  void validate() const;

  nlohmann::json to_json() const;
  /// {n, gates:[{support, angle}]}.
  static LmesSpec from_json(const nlohmann::json& j);
};

/// Graph state of the path 0 - 1 - ... - (n-1) as a pi-LMES.
LmesSpec path_lmes(int n);
/// Three qubits with the single gate 1 - 2|111><111|.
LmesSpec triple_pi_lmes();

/// U|+>^n.
qsim::StateVector build_lmes(const LmesSpec& spec);

/// Dense U sigma_1^{(k)} U^dagger; limited to 10 qubits.
Eigen::MatrixXcd generalized_stabilizer(const LmesSpec& spec, int k);

/// Sign <l|U_k|l> of the stabilizer's diagonal part for the neighbour bits
/// taken from `bits` (a basis index over all qubits; bit k is ignored).
/// Throws std::domain_error when the value is not +-1.
int neighbour_sign(const LmesSpec& spec, int k, std::uint64_t bits);

/// Measures sigma_1 on j and sigma_3 on its neighbours of one copy of
/// sigma_3^i |Psi> and returns the bit i_j. Needs a pi-LMES.
int extract_bit(const LmesSpec& spec, const qsim::StateVector& state, int j, qsim::OutcomeSource& source);

/// Single-copy extraction of i_j for every j in an independent set S.
std::vector<int> extract_independent_set(const LmesSpec& spec, const qsim::StateVector& state,
                                         std::span<const int> set, qsim::OutcomeSource& source);

/// Phase-gate sequence for the LMES: each gate on support S becomes Z_T
/// phases for the non-empty T in S, with slot = gate index and scale
/// (-1)^{|T|} / 2^{|S|}.
cf::GateSequence lmes_sequence(const LmesSpec& spec);
/// Slot values for lmes_sequence (the gate angles).
std::vector<double> lmes_params(const LmesSpec& spec);

struct ChannelRun {
  std::vector<int> frame_bits;   // i, known to the sender
  std::vector<int> channel;      // extractable vertices, in order
  std::vector<int> announced;    // payload XOR frame bits on the channel
  std::vector<int> received;
  bool frame_z_type = true;
};

/// Prepares the LMES remotely, masks the payload with the frame bits the
/// receiver can extract from one copy, and unmasks on the receiving side.
/// Throws std::invalid_argument if the payload is longer than the largest
/// colour class of the interaction graph.
ChannelRun classical_channel_demo(const LmesSpec& spec, std::span<const int> payload, std::mt19937_64& rng);

/// Largest colour class of an optimal colouring of the interaction graph.
std::vector<int> extractable_set(const LmesSpec& spec);

struct LemmaReport {
  int specs = 0;
  int checks = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

/// For every three-qubit pi-LMES with gates on pairs and/or the triple,
/// every i, j and every (l_x, k) with non-zero overlap: the stabilizer
/// expectation on sigma_3^i|Psi> equals the one on |l_x k>.
LemmaReport verify_lemma1(double tol = 1e-9);

}  // namespace rep::lme
