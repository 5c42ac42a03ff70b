#pragma once

// Compiles a gate sequence acting on |+>^n into a stabilizer resource state
// plus an ordered, adaptive single-qubit measurement schedule.
//
// Every phase gate with an angle slot (or a constant angle that is not a
// multiple of pi/4) gets a controlling qubit prepared in |0> and coupled by
// CNOTs from each wire of the gate's support, so it holds the support's
// parity. Measuring it in B_beta applies Z_S(beta) to the wires, times Z_S
// for outcome 1. Other gates are Cliffords and are applied to the wires
// directly.
//
// Qubit layout: controlling qubits 0..P-1 in schedule order, then wires
// P..P+n-1.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "rep/canonical_form.hpp"
#include "rep/pauli.hpp"
#include "rep/qsim.hpp"

namespace rep::compiler {

using pauli::PauliString;

struct MeasurementStep {
  int position = 0;  // 0-based order in the schedule
  int ancilla = 0;
  std::optional<cf::Slot> slot;
  double constant_angle = 0.0;  // used when slot is empty
  std::vector<int> support;     // wire indices of the phase gate
  int sign = 1;                 // nominal sign of the measured angle
  /// Z on the support at coupling time, pushed through every later circuit
  /// gate: the Pauli picked up when the effective outcome is 1.
  PauliString byproduct;

  double angle(std::span<const double> params) const;
};

struct CompiledProtocol {
  int num_wires = 0;
  int num_ancillas = 0;
  std::vector<qsim::Gate> circuit;  // Clifford only, acts on |0...0>
  std::vector<MeasurementStep> schedule;
  std::vector<int> output_map;      // wire i -> qubit index
  bool prepares_wires = true;       // circuit starts with H on every wire

  int total_qubits() const { return num_wires + num_ancillas; }
  nlohmann::json to_json() const;
  /// FNV-1a hash of the serialized construction circuit.
  std::uint64_t circuit_hash() const;
};

struct CompileOptions {
  /// When false the circuit expects the wires to be supplied by the caller
  /// (used to run a gadget on an arbitrary input).
  bool prepare_wires = true;
};

/// Throws std::invalid_argument for malformed sequences (see
/// cf::validate_sequence) and when the qubit budget (23) would be exceeded.
CompiledProtocol compile(const cf::GateSequence& seq, CompileOptions options = {});

/// Statevector of the construction circuit applied to |0...0>.
qsim::StateVector resource_state(const CompiledProtocol& cp);

PauliString frame_conjugate(const PauliString& frame, const qsim::Gate& gate);

struct EffectiveMeasurement {
  int sign = 1;  // multiply the nominal angle by this
  int flip = 0;  // XOR into the raw outcome
};

/// Frame letter X or Y on the ancilla flips the angle sign; Z or Y flips the
/// reported outcome.
EffectiveMeasurement effective_measurement(const MeasurementStep& step, const PauliString& frame);

struct ScheduleResult {
  std::vector<int> raw_outcomes;
  std::vector<int> effective_outcomes;
  std::vector<double> measured_angles;
  PauliString correction;  // on the wires, in wire order, phase dropped
  qsim::StateVector output{0};  // wires only, before correction
};

/// Measures the ancillas of `state` (which must hold the resource on
/// cp.total_qubits() qubits) following the schedule.
ScheduleResult run_on(const CompiledProtocol& cp, qsim::StateVector state, std::span<const double> params,
                      qsim::OutcomeSource& source);

/// run_on applied to resource_state(cp).
ScheduleResult run_schedule(const CompiledProtocol& cp, std::span<const double> params, qsim::OutcomeSource& source);

/// Frame applied to the output: the state the gate sequence should produce,
/// up to global phase.
qsim::StateVector corrected_output(const ScheduleResult& r);

enum class GadgetVariant {
  Direct,      // CNOT coupling into a fresh controlling qubit
  Teleported,  // GHZ resource + Bell measurement per input wire
};

/// Runs one phase gate on an arbitrary input through a gadget, undoes the
/// reported byproduct, and compares to apply_gate. True iff the fidelity is
/// at least 1 - 1e-9.
bool gadget_check(const qsim::Gate& phase_gate, const qsim::StateVector& input, std::mt19937_64& rng,
                  GadgetVariant variant = GadgetVariant::Direct);

}  // namespace rep::compiler
