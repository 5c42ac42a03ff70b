#pragma once

// Canonical-form circuits for n = 2 and n = 3 qubits, the parameter count
// P_n, and the small gate identities the construction relies on.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rep/qsim.hpp"

namespace rep::cf {

/// Angle of a phase gate taken from the parameter list at run time:
/// angle = scale * params[index].
struct Slot {
  int index = 0;
  double scale = 1.0;
  bool operator==(const Slot&) const = default;
};

struct SeqGate {
  qsim::Gate gate;            // for slotted gates gate.angle is ignored
  std::optional<Slot> slot;
};

/// Ordered gates on `num_qubits` wires. Allowed kinds are H, Phase, XPhase,
/// CZ and CNOT; only Phase gates may carry a slot.
struct GateSequence {
  int num_qubits = 0;
  std::vector<SeqGate> gates;

  /// Number of distinct slot indices required (max index + 1).
  int slot_count() const;
  /// Number of gates that will need a controlling qubit: slotted gates plus
  /// constant phase gates whose angle is not a multiple of pi/4.
  int non_clifford_count() const;
  /// Concrete gates with every slot filled in.
  std::vector<qsim::Gate> bind(std::span<const double> params) const;

  nlohmann::json to_json() const;
  static GateSequence from_json(const nlohmann::json& j);
};

/// Throws std::invalid_argument if the sequence uses a general unitary, a
/// slot on a non-phase gate, or a gate that acts non-diagonally on qubit 0
/// (H, XPhase, or a CNOT targeting it).
void validate_sequence(const GateSequence& seq);

/// P_n from the closed form; 1 for n = 2. Throws for n < 2 or n > 60.
long long param_count(int n);
/// P_n from the recurrence P_n = 2 P_{n-1} + 3 (n-1), P_3 = 5.
long long param_count_recursive(int n);

/// Symbolic canonical-form circuit; slot i holds alpha_{i+1}. Supported
/// n: 2, 3.
GateSequence cf_circuit(int n);

/// The n = 3 circuit with alpha_3 = alpha_4 = pi/4 fixed as constant
/// Clifford phases; remaining slots keep indices 0, 1 and 4.
GateSequence mes_circuit();

/// Full five-angle list for the fixed family.
std::vector<double> mes_params(double a1, double a2, double a5);

/// Canonical-form state: cf_circuit(n) bound to params, applied to |+>^n.
qsim::StateVector cf_state(int n, std::span<const double> params);

/// (Z_S(alpha/2), Z_{S+c}(-alpha/2)); their product is the controlled
/// Z_S(alpha) with control c.
std::pair<qsim::Gate, qsim::Gate> controlled_phase_decompose(int control, std::vector<int> support, double alpha);

struct EulerAngles {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double global_phase = 0.0;
};

/// U = e^{i phase} Z(a1) H Z(a2) H Z(a3). Throws for non-unitary input.
EulerAngles euler_decompose(const qsim::Matrix2& u);

/// Gates implementing exp(i sum_k a_k sigma_k (x) sigma_k) on qubits (q0, q1);
/// zero terms are skipped.
std::vector<qsim::Gate> nonlocal_two_qubit_decompose(double a1, double a2, double a3, int q0 = 0, int q1 = 1);

}  // namespace rep::cf
