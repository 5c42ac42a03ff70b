#include "rep/compiler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rep::compiler {

using qsim::Gate;
using qsim::GateKind;

double MeasurementStep::angle(std::span<const double> params) const {
  if (!slot) return constant_angle;
  if (slot->index < 0 || static_cast<std::size_t>(slot->index) >= params.size()) {
    throw std::invalid_argument("unbound angle slot " + std::to_string(slot->index));
  }
  return slot->scale * params[static_cast<std::size_t>(slot->index)];
}

nlohmann::json CompiledProtocol::to_json() const {
  nlohmann::json circ = nlohmann::json::array();
  for (const Gate& g : circuit) {
    nlohmann::json e{{"kind", qsim::to_string(g.kind)}, {"qubits", g.qubits}};
    if (g.kind == GateKind::Phase || g.kind == GateKind::XPhase) e["angle"] = g.angle;
    circ.push_back(std::move(e));
  }
  nlohmann::json sched = nlohmann::json::array();
  for (const MeasurementStep& s : schedule) {
    nlohmann::json e{{"position", s.position},
                     {"ancilla", s.ancilla},
                     {"support", s.support},
                     {"sign", s.sign},
                     {"byproduct", s.byproduct.to_string()}};
    if (s.slot) {
      e["slot"] = {{"index", s.slot->index}, {"scale", s.slot->scale}};
    } else {
      e["angle"] = s.constant_angle;
    }
    sched.push_back(std::move(e));
  }
  return {{"qubits", total_qubits()},
          {"wires", num_wires},
          {"ancillas", num_ancillas},
          {"circuit", std::move(circ)},
          {"schedule", std::move(sched)},
          {"output_map", output_map}};
}

std::uint64_t CompiledProtocol::circuit_hash() const {
  const std::string text = to_json().at("circuit").dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CompiledProtocol compile(const cf::GateSequence& seq, CompileOptions options) {
  cf::validate_sequence(seq);
  const int n = seq.num_qubits;
  const int p = seq.non_clifford_count();
  if (n + p > qsim::kMaxQubits) {
    throw std::invalid_argument("resource needs " + std::to_string(n + p) + " qubits, budget is 23");
  }
  CompiledProtocol cp;
  cp.num_wires = n;
  cp.num_ancillas = p;
  cp.prepares_wires = options.prepare_wires;
  for (int w = 0; w < n; ++w) cp.output_map.push_back(p + w);
  auto wire = [&](int w) { return p + w; };

  if (options.prepare_wires) {
    for (int w = 0; w < n; ++w) cp.circuit.push_back(Gate::h(wire(w)));
  }
  std::vector<std::size_t> coupling_end;  // circuit length right after each coupling
  for (const cf::SeqGate& sg : seq.gates) {
    const bool needs_ancilla = sg.slot.has_value() || !qsim::is_clifford(sg.gate);
    if (!needs_ancilla) {
      Gate g = sg.gate;
      for (int& q : g.qubits) q = wire(q);
      cp.circuit.push_back(std::move(g));
      continue;
    }
    MeasurementStep step;
    step.position = static_cast<int>(cp.schedule.size());
    step.ancilla = step.position;
    step.slot = sg.slot;
    step.constant_angle = sg.gate.angle;
    step.support = sg.gate.qubits;
    for (int w : sg.gate.qubits) cp.circuit.push_back(Gate::cnot(wire(w), step.ancilla));
    coupling_end.push_back(cp.circuit.size());
    cp.schedule.push_back(std::move(step));
  }

  const int total = cp.total_qubits();
  for (std::size_t t = 0; t < cp.schedule.size(); ++t) {
    MeasurementStep& step = cp.schedule[t];
    std::vector<int> wires;
    for (int w : step.support) wires.push_back(wire(w));
    PauliString b = PauliString::z_on(total, wires);
    for (std::size_t g = coupling_end[t]; g < cp.circuit.size(); ++g) b = pauli::conjugate(b, cp.circuit[g]);
    step.byproduct = std::move(b);
  }
  return cp;
}

qsim::StateVector resource_state(const CompiledProtocol& cp) {
  if (cp.total_qubits() > qsim::kMaxQubits) throw std::invalid_argument("qubit budget exceeded");
  return qsim::apply_circuit(qsim::StateVector(cp.total_qubits()), cp.circuit);
}

PauliString frame_conjugate(const PauliString& frame, const qsim::Gate& gate) { return pauli::conjugate(frame, gate); }

EffectiveMeasurement effective_measurement(const MeasurementStep& step, const PauliString& frame) {
  const pauli::Pauli letter = frame.at(step.ancilla);
  EffectiveMeasurement e;
  if (letter == pauli::Pauli::X || letter == pauli::Pauli::Y) e.sign = -1;
  if (letter == pauli::Pauli::Z || letter == pauli::Pauli::Y) e.flip = 1;
  return e;
}

ScheduleResult run_on(const CompiledProtocol& cp, qsim::StateVector state, std::span<const double> params,
                      qsim::OutcomeSource& source) {
  const int total = cp.total_qubits();
  if (state.num_qubits() != total) throw std::invalid_argument("state does not match the compiled protocol");
  for (const MeasurementStep& step : cp.schedule) (void)step.angle(params);  // fail before measuring

  std::vector<int> live(static_cast<std::size_t>(total));
  for (int q = 0; q < total; ++q) live[static_cast<std::size_t>(q)] = q;
  PauliString frame(total);
  ScheduleResult r;
  for (const MeasurementStep& step : cp.schedule) {
    const auto it = std::find(live.begin(), live.end(), step.ancilla);
    const int index = static_cast<int>(it - live.begin());
    const EffectiveMeasurement eff = effective_measurement(step, frame);
    const double beta = eff.sign * step.sign * step.angle(params);
    qsim::MeasureResult m = qsim::measure_basis(state, index, beta, source);
    const int effective = m.outcome ^ eff.flip;
    if (effective) frame *= step.byproduct;
    frame.set(step.ancilla, pauli::Pauli::I);
    state = std::move(m.post_state);
    live.erase(it);
    r.raw_outcomes.push_back(m.outcome);
    r.effective_outcomes.push_back(effective);
    r.measured_angles.push_back(beta);
  }
  // Remaining qubits are the wires, in order.
  r.correction = frame.restricted(cp.output_map);
  r.correction.set_phase(0);
  r.output = std::move(state);
  return r;
}

ScheduleResult run_schedule(const CompiledProtocol& cp, std::span<const double> params, qsim::OutcomeSource& source) {
  return run_on(cp, resource_state(cp), params, source);
}

qsim::StateVector corrected_output(const ScheduleResult& r) { return pauli::apply_pauli(r.output, r.correction); }

namespace {

bool direct_gadget(const Gate& gate, const qsim::StateVector& input, std::mt19937_64& rng) {
  cf::GateSequence seq;
  seq.num_qubits = input.num_qubits();
  seq.gates.push_back(cf::SeqGate{Gate::phase(gate.qubits, 0.0), cf::Slot{0, 1.0}});
  const CompiledProtocol cp = compile(seq, CompileOptions{.prepare_wires = false});
  const qsim::StateVector start =
      qsim::apply_circuit(qsim::StateVector(cp.num_ancillas).tensor(input), cp.circuit);
  const double params[1] = {gate.angle};
  qsim::OutcomeSource src = qsim::OutcomeSource::sampled(rng);
  const ScheduleResult r = run_on(cp, start, params, src);
  return qsim::fidelity(corrected_output(r), qsim::apply_gate(input, gate)) >= 1.0 - 1e-9;
}

bool teleported_gadget(const Gate& gate, const qsim::StateVector& input, std::mt19937_64& rng) {
  const int n = input.num_qubits();
  const std::vector<int>& support = gate.qubits;
  const int m = static_cast<int>(support.size());
  const int total = n + 2 * m + 1;
  if (total > qsim::kMaxQubits) throw std::invalid_argument("gadget exceeds the qubit budget");
  // Labels: input 0..n-1, Bell halves n..n+m-1, outputs n+m..n+2m-1,
  // controlling qubit n+2m. Resource: sum_y |y>_B |y>_C |parity(y)>_a.
  const int a = n + 2 * m;
  std::vector<Gate> prep;
  for (int j = 0; j < m; ++j) {
    prep.push_back(Gate::h(n + j));
    prep.push_back(Gate::cnot(n + j, n + m + j));
    prep.push_back(Gate::cnot(n + m + j, a));
  }
  qsim::StateVector state = qsim::apply_circuit(input.tensor(qsim::StateVector(2 * m + 1)), prep);
  std::vector<int> live(static_cast<std::size_t>(total));
  for (int q = 0; q < total; ++q) live[static_cast<std::size_t>(q)] = q;
  auto index_of = [&](int label) {
    return static_cast<int>(std::find(live.begin(), live.end(), label) - live.begin());
  };
  auto drop = [&](int label) { live.erase(live.begin() + index_of(label)); };

  qsim::OutcomeSource src = qsim::OutcomeSource::sampled(rng);
  PauliString correction(n);
  int x_type = 0;
  for (int j = 0; j < m; ++j) {
    const qsim::MeasureResult bell = qsim::bell_measure(state, index_of(support[j]), index_of(n + j), src);
    state = bell.post_state;
    drop(support[j]);
    drop(n + j);
    // The output wire now carries sigma_i applied to the input qubit.
    correction.set(support[j], static_cast<pauli::Pauli>(bell.outcome));
    if (bell.outcome == 1 || bell.outcome == 2) ++x_type;
  }
  const double beta = (x_type % 2 ? -1.0 : 1.0) * gate.angle;
  const qsim::MeasureResult meas = qsim::measure_basis(state, index_of(a), beta, src);
  state = meas.post_state;
  drop(a);

  std::vector<int> order;
  for (int q = 0; q < n; ++q) {
    const auto it = std::find(support.begin(), support.end(), q);
    order.push_back(index_of(it == support.end() ? q : n + m + static_cast<int>(it - support.begin())));
  }
  qsim::StateVector out = state.permuted(order);
  // out = Z_S^k sigma Z_S(alpha) xi, so sigma Z_S^k out recovers the target.
  if (meas.outcome) out = pauli::apply_pauli(out, PauliString::z_on(n, support));
  out = pauli::apply_pauli(out, correction);
  return qsim::fidelity(out, qsim::apply_gate(input, gate)) >= 1.0 - 1e-9;
}

}  // namespace

bool gadget_check(const Gate& phase_gate, const qsim::StateVector& input, std::mt19937_64& rng,
                  GadgetVariant variant) {
  if (phase_gate.kind != GateKind::Phase) throw std::invalid_argument("gadget_check needs a phase gate");
  return variant == GadgetVariant::Direct ? direct_gadget(phase_gate, input, rng)
                                          : teleported_gadget(phase_gate, input, rng);
}

}  // namespace rep::compiler
