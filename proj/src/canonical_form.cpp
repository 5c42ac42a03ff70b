#include "rep/canonical_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rep::cf {

using qsim::Gate;
using qsim::GateKind;

namespace {

constexpr double kQuarter = std::numbers::pi / 4.0;

SeqGate fixed(Gate g) { return SeqGate{std::move(g), std::nullopt}; }
SeqGate slotted(std::vector<int> support, int index) {
  return SeqGate{Gate::phase(std::move(support), 0.0), Slot{index, 1.0}};
}

}  // namespace

int GateSequence::slot_count() const {
  int count = 0;
  for (const SeqGate& g : gates) {
    if (g.slot) count = std::max(count, g.slot->index + 1);
  }
  return count;
}

int GateSequence::non_clifford_count() const {
  int count = 0;
  for (const SeqGate& g : gates) {
    if (g.slot || !qsim::is_clifford(g.gate)) ++count;
  }
  return count;
}

std::vector<Gate> GateSequence::bind(std::span<const double> params) const {
  std::vector<Gate> out;
  out.reserve(gates.size());
  for (const SeqGate& g : gates) {
    Gate concrete = g.gate;
    if (g.slot) {
      if (g.slot->index < 0 || static_cast<std::size_t>(g.slot->index) >= params.size()) {
        throw std::invalid_argument("unbound angle slot " + std::to_string(g.slot->index));
      }
      concrete.angle = g.slot->scale * params[static_cast<std::size_t>(g.slot->index)];
      if (!std::isfinite(concrete.angle)) throw std::invalid_argument("non-finite angle");
    }
    out.push_back(std::move(concrete));
  }
  return out;
}

nlohmann::json GateSequence::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const SeqGate& g : gates) {
    nlohmann::json e{{"kind", qsim::to_string(g.gate.kind)}, {"qubits", g.gate.qubits}};
    if (g.slot) {
      e["slot"] = {{"index", g.slot->index}, {"scale", g.slot->scale}};
    } else if (g.gate.kind == GateKind::Phase || g.gate.kind == GateKind::XPhase) {
      e["angle"] = g.gate.angle;
    }
    list.push_back(std::move(e));
  }
  return {{"qubits", num_qubits}, {"gates", std::move(list)}};
}

GateSequence GateSequence::from_json(const nlohmann::json& j) {
  GateSequence seq;
  seq.num_qubits = j.at("qubits").get<int>();
  for (const auto& e : j.at("gates")) {
    SeqGate g;
    g.gate.kind = qsim::gate_kind_from_string(e.at("kind").get<std::string>());
    g.gate.qubits = e.at("qubits").get<std::vector<int>>();
    if (e.contains("slot")) {
      g.slot = Slot{e["slot"].at("index").get<int>(), e["slot"].value("scale", 1.0)};
    } else if (e.contains("angle")) {
      g.gate.angle = e["angle"].get<double>();
    }
    seq.gates.push_back(std::move(g));
  }
  validate_sequence(seq);
  return seq;
}

void validate_sequence(const GateSequence& seq) {
  if (seq.num_qubits < 1 || seq.num_qubits > qsim::kMaxQubits) {
    throw std::invalid_argument("sequence qubit count out of range");
  }
  for (const SeqGate& g : seq.gates) {
    const Gate& gate = g.gate;
    if (gate.kind == GateKind::Unitary) throw std::invalid_argument("general unitaries are not allowed in a sequence");
    if (g.slot && gate.kind != GateKind::Phase) throw std::invalid_argument("only phase gates may carry an angle slot");
    if (g.slot && g.slot->index < 0) throw std::invalid_argument("negative slot index");
    if (gate.qubits.empty()) throw std::invalid_argument("gate without qubits");
    for (int q : gate.qubits) {
      if (q < 0 || q >= seq.num_qubits) throw std::out_of_range("gate qubit outside the sequence");
    }
    std::vector<int> sorted = gate.qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("gate repeats a qubit");
    }
    if (!std::isfinite(gate.angle)) throw std::invalid_argument("non-finite angle");
    const bool touches_first = std::find(gate.qubits.begin(), gate.qubits.end(), 0) != gate.qubits.end();
    const bool off_diagonal = gate.kind == GateKind::H || gate.kind == GateKind::XPhase ||
                              (gate.kind == GateKind::CNOT && gate.qubits[1] == 0);
    if (touches_first && off_diagonal) {
      throw std::invalid_argument("only diagonal gates may act on qubit 1, found " + qsim::to_string(gate.kind));
    }
  }
}

long long param_count(int n) {
  if (n < 2 || n > 60) throw std::invalid_argument("param_count needs 2 <= n <= 60");
  if (n == 2) return 1;
  // 2^{n+1} - 3(n+1) + 2^{n-3}
  return (1LL << (n + 1)) - 3LL * (n + 1) + (1LL << (n - 3));
}

long long param_count_recursive(int n) {
  if (n < 2 || n > 60) throw std::invalid_argument("param_count needs 2 <= n <= 60");
  if (n == 2) return 1;
  long long p = 5;
  for (int m = 4; m <= n; ++m) p = 2 * p + 3LL * (m - 1);
  return p;
}

GateSequence cf_circuit(int n) {
  GateSequence seq;
  seq.num_qubits = n;
  if (n == 2) {
    seq.gates.push_back(slotted({0, 1}, 0));
    return seq;
  }
  if (n != 3) throw std::invalid_argument("canonical-form circuit available for n = 2 and n = 3 only");
  seq.gates.push_back(slotted({1, 2}, 4));
  // T_2(a3, a4) on qubit 2, rightmost factor first.
  seq.gates.push_back(fixed(Gate::h(1)));
  seq.gates.push_back(slotted({1}, 3));
  seq.gates.push_back(fixed(Gate::x_phase(1, -kQuarter)));
  seq.gates.push_back(slotted({1}, 2));
  seq.gates.push_back(fixed(Gate::x_phase(1, kQuarter)));
  // T_3 on qubit 3.
  seq.gates.push_back(fixed(Gate::h(2)));
  seq.gates.push_back(fixed(Gate::phase({2}, -kQuarter)));
  seq.gates.push_back(fixed(Gate::x_phase(2, -kQuarter)));
  seq.gates.push_back(slotted({0, 1}, 1));
  seq.gates.push_back(slotted({0, 2}, 0));
  return seq;
}

GateSequence mes_circuit() {
  GateSequence seq = cf_circuit(3);
  for (SeqGate& g : seq.gates) {
    if (g.slot && (g.slot->index == 2 || g.slot->index == 3)) {
      g.gate.angle = kQuarter;
      g.slot.reset();
    }
  }
  return seq;
}

std::vector<double> mes_params(double a1, double a2, double a5) { return {a1, a2, kQuarter, kQuarter, a5}; }

qsim::StateVector cf_state(int n, std::span<const double> params) {
  const GateSequence seq = cf_circuit(n);
  if (params.size() != static_cast<std::size_t>(param_count(n))) {
    throw std::invalid_argument("expected " + std::to_string(param_count(n)) + " angles");
  }
  const std::vector<Gate> gates = seq.bind(params);
  return qsim::apply_circuit(qsim::StateVector::plus(n), gates);
}

std::pair<Gate, Gate> controlled_phase_decompose(int control, std::vector<int> support, double alpha) {
  if (support.empty()) throw std::invalid_argument("empty phase-gate support");
  if (std::find(support.begin(), support.end(), control) != support.end()) {
    throw std::invalid_argument("control qubit lies in the support");
  }
  std::vector<int> extended = support;
  extended.push_back(control);
  return {Gate::phase(std::move(support), alpha / 2.0), Gate::phase(std::move(extended), -alpha / 2.0)};
}

EulerAngles euler_decompose(const qsim::Matrix2& u) {
  if ((u.adjoint() * u - qsim::Matrix2::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("euler_decompose needs a unitary matrix");
  }
  // H Z(a2) H = exp(i a2 X), so U ~ exp(i a1 Z) exp(i a2 X) exp(i a3 Z), whose
  // SU(2) form is [[c e^{i(a1+a3)}, i s e^{i(a1-a3)}], [., .]].
  const qsim::Complex det_root = std::sqrt(u.determinant());
  const qsim::Matrix2 v = u / det_root;
  const double c = std::abs(v(0, 0));
  const double s = std::abs(v(0, 1));
  EulerAngles e;
  e.a2 = std::atan2(s, c);
  const double sum = c > 1e-12 ? std::arg(v(0, 0)) : 0.0;
  const double diff = s > 1e-12 ? std::arg(v(0, 1) / qsim::Complex(0, 1)) : 0.0;
  e.a1 = (sum + diff) / 2.0;
  e.a3 = (sum - diff) / 2.0;
  // Recover the global phase against the reconstruction.
  qsim::Matrix2 h;
  h << 1, 1, 1, -1;
  h /= std::numbers::sqrt2;
  auto z = [](double a) {
    qsim::Matrix2 m = qsim::Matrix2::Zero();
    m(0, 0) = std::polar(1.0, a);
    m(1, 1) = std::polar(1.0, -a);
    return m;
  };
  const qsim::Matrix2 rec = z(e.a1) * h * z(e.a2) * h * z(e.a3);
  Eigen::Index r = 0;
  Eigen::Index col = 0;
  rec.cwiseAbs().maxCoeff(&r, &col);
  e.global_phase = std::arg(u(r, col) / rec(r, col));
  return e;
}

std::vector<Gate> nonlocal_two_qubit_decompose(double a1, double a2, double a3, int q0, int q1) {
  for (double a : {a1, a2, a3}) {
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite angle");
  }
  std::vector<Gate> out;
  // The three terms commute; each is a ZZ phase in a rotated frame.
  if (a1 != 0.0) {
    out.insert(out.end(), {Gate::h(q0), Gate::h(q1), Gate::phase({q0, q1}, a1), Gate::h(q0), Gate::h(q1)});
  }
  if (a2 != 0.0) {
    // exp(-i pi/4 X) Z exp(i pi/4 X) = -Y on each qubit, so ZZ maps to YY.
    out.insert(out.end(), {Gate::x_phase(q0, kQuarter), Gate::x_phase(q1, kQuarter), Gate::phase({q0, q1}, a2),
                           Gate::x_phase(q0, -kQuarter), Gate::x_phase(q1, -kQuarter)});
  }
  if (a3 != 0.0) out.push_back(Gate::phase({q0, q1}, a3));
  return out;
}

}  // namespace rep::cf
