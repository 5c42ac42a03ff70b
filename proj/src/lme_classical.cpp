#include "rep/lme_classical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rep/compiler.hpp"

namespace rep::lme {

namespace {

std::uint64_t qubit_bit(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

// Phase f(x) of U|x> = e^{i f(x)} |x>.
double phase_of(const LmesSpec& spec, std::uint64_t x) {
  double f = 0.0;
  for (const LmesGate& g : spec.gates) {
    bool all = true;
    for (int q : g.support) all = all && (x & qubit_bit(q, spec.num_qubits));
    if (all) f += g.angle;
  }
  return f;
}

bool is_pi_angle(double a) {
  const double r = std::remainder(a, std::numbers::pi);
  return std::abs(r) < 1e-12;
}

// Samples a computational-basis measurement of one qubit.
qsim::MeasureResult measure_z(const qsim::StateVector& state, int index, qsim::OutcomeSource& source) {
  qsim::MeasureResult r0 = qsim::project_qubit(state, index, Eigen::Vector2cd(1, 0));
  qsim::MeasureResult r1 = qsim::project_qubit(state, index, Eigen::Vector2cd(0, 1));
  const double probs[2] = {r0.probability, r1.probability};
  const int k = source.choose(probs);
  qsim::MeasureResult& chosen = k == 0 ? r0 : r1;
  chosen.outcome = k;
  return std::move(chosen);
}

}  // namespace

bool LmesSpec::is_pi() const {
  return std::all_of(gates.begin(), gates.end(), [](const LmesGate& g) { return is_pi_angle(g.angle); });
}

graphstab::Graph LmesSpec::interaction_graph() const {
  graphstab::Graph g(num_qubits);
  for (const LmesGate& gate : gates) {
    for (std::size_t a = 0; a < gate.support.size(); ++a) {
      for (std::size_t b = a + 1; b < gate.support.size(); ++b) g.add_edge(gate.support[a], gate.support[b]);
    }
  }
  return g;
}

void LmesSpec::validate() const {
  if (num_qubits < 1 || num_qubits > qsim::kMaxQubits) throw std::invalid_argument("LMES qubit count out of range");
  for (const LmesGate& g : gates) {
    if (g.support.empty()) throw std::invalid_argument("LMES gate with empty support");
    if (!std::isfinite(g.angle)) throw std::invalid_argument("LMES gate angle is not finite");
    std::vector<int> s = g.support;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("LMES gate repeats a qubit");
    if (s.front() < 0 || s.back() >= num_qubits) throw std::invalid_argument("LMES gate qubit out of range");
  }
}

nlohmann::json LmesSpec::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const LmesGate& g : gates) list.push_back({{"support", g.support}, {"angle", g.angle}});
  return {{"n", num_qubits}, {"gates", std::move(list)}};
}

LmesSpec LmesSpec::from_json(const nlohmann::json& j) {
  LmesSpec spec;
  try {
    spec.num_qubits = j.at("n").get<int>();
    for (const auto& g : j.at("gates")) {
      spec.gates.push_back({g.at("support").get<std::vector<int>>(), g.at("angle").get<double>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed LMES spec: ") + ex.what());
  }
  spec.validate();
  return spec;
}

LmesSpec path_lmes(int n) {
  LmesSpec spec{n, {}};
  for (int q = 0; q + 1 < n; ++q) spec.gates.push_back({{q, q + 1}, std::numbers::pi});
  return spec;
}

LmesSpec triple_pi_lmes() { return LmesSpec{3, {{{0, 1, 2}, std::numbers::pi}}}; }

qsim::StateVector build_lmes(const LmesSpec& spec) {
  spec.validate();
  const std::size_t dim = std::size_t{1} << spec.num_qubits;
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::uint64_t x = 0; x < dim; ++x) amps[static_cast<Eigen::Index>(x)] = std::polar(norm, phase_of(spec, x));
  return qsim::StateVector::from_amplitudes(std::move(amps));
}

Eigen::MatrixXcd generalized_stabilizer(const LmesSpec& spec, int k) {
  spec.validate();
  if (k < 0 || k >= spec.num_qubits) throw std::out_of_range("stabilizer index out of range");
  if (spec.num_qubits > 10) throw std::invalid_argument("dense stabilizer limited to 10 qubits");
  const std::size_t dim = std::size_t{1} << spec.num_qubits;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::uint64_t flip = qubit_bit(k, spec.num_qubits);
  // U X_k U^dagger |x> = e^{i (f(x ^ e_k) - f(x))} |x ^ e_k>.
  for (std::uint64_t x = 0; x < dim; ++x) {
    s(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) =
        std::polar(1.0, phase_of(spec, x ^ flip) - phase_of(spec, x));
  }
  return s;
}

int neighbour_sign(const LmesSpec& spec, int k, std::uint64_t bits) {
  const std::uint64_t flip = qubit_bit(k, spec.num_qubits);
  const std::uint64_t x = bits & ~flip;
  const std::complex<double> m = std::polar(1.0, phase_of(spec, x ^ flip) - phase_of(spec, x));
  if (std::abs(m.imag()) > 1e-9 || std::abs(std::abs(m.real()) - 1.0) > 1e-9) {
    throw std::domain_error("stabilizer diagonal part is not +-1; the state is not a pi-LMES");
  }
  return m.real() > 0 ? 1 : -1;
}

std::vector<int> extract_independent_set(const LmesSpec& spec, const qsim::StateVector& state,
                                         std::span<const int> set, qsim::OutcomeSource& source) {
  if (!spec.is_pi()) throw std::invalid_argument("bit extraction needs a pi-LMES");
  const int n = spec.num_qubits;
  if (state.num_qubits() != n) throw std::invalid_argument("state size does not match the spec");
  const graphstab::Graph g = spec.interaction_graph();
  std::vector<bool> in_set(static_cast<std::size_t>(n), false);
  for (int j : set) {
    if (j < 0 || j >= n) throw std::out_of_range("vertex outside the LMES");
    in_set[static_cast<std::size_t>(j)] = true;
  }
  for (int a : set) {
    for (int b : set) {
      if (a != b && g.adjacent(a, b)) throw std::invalid_argument("extraction set is not independent");
    }
  }
  std::vector<int> live(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) live[static_cast<std::size_t>(q)] = q;
  auto take = [&](int label) {
    const auto it = std::find(live.begin(), live.end(), label);
    const int idx = static_cast<int>(it - live.begin());
    live.erase(it);
    return idx;
  };
  qsim::StateVector cur = state;
  std::vector<int> x_sign(static_cast<std::size_t>(n), 1);
  std::uint64_t z_bits = 0;
  for (int j : set) {
    qsim::MeasureResult m = qsim::measure_basis(cur, take(j), 0.0, source);
    x_sign[static_cast<std::size_t>(j)] = m.outcome ? -1 : 1;
    cur = std::move(m.post_state);
  }
  for (int q = 0; q < n; ++q) {
    if (in_set[static_cast<std::size_t>(q)]) continue;
    bool neighbour = false;
    for (int j : set) neighbour = neighbour || g.adjacent(q, j);
    if (!neighbour) continue;
    qsim::MeasureResult m = measure_z(cur, take(q), source);
    if (m.outcome) z_bits |= qubit_bit(q, n);
    cur = std::move(m.post_state);
  }
  std::vector<int> bits;
  for (int j : set) {
    const int value = x_sign[static_cast<std::size_t>(j)] * neighbour_sign(spec, j, z_bits);
    bits.push_back(value < 0 ? 1 : 0);
  }
  return bits;
}

int extract_bit(const LmesSpec& spec, const qsim::StateVector& state, int j, qsim::OutcomeSource& source) {
  const int set[] = {j};
  return extract_independent_set(spec, state, set, source).front();
}

cf::GateSequence lmes_sequence(const LmesSpec& spec) {
  spec.validate();
  cf::GateSequence seq;
  seq.num_qubits = spec.num_qubits;
  for (std::size_t gi = 0; gi < spec.gates.size(); ++gi) {
    const std::vector<int>& s = spec.gates[gi].support;
    const int m = static_cast<int>(s.size());
    if (m > 6) throw std::invalid_argument("LMES gate support too large to expand");
    // prod_q (1 - Z_q)/2 = 2^{-m} sum_T (-1)^{|T|} Z_T; T = {} is a global phase.
    for (unsigned t = 1; t < (1u << m); ++t) {
      std::vector<int> support;
      for (int b = 0; b < m; ++b) {
        if (t & (1u << b)) support.push_back(s[static_cast<std::size_t>(b)]);
      }
      const double scale = (std::popcount(t) % 2 ? -1.0 : 1.0) / static_cast<double>(1 << m);
      seq.gates.push_back({qsim::Gate::phase(std::move(support), 0.0), cf::Slot{static_cast<int>(gi), scale}});
    }
  }
  return seq;
}

std::vector<double> lmes_params(const LmesSpec& spec) {
  std::vector<double> p;
  for (const LmesGate& g : spec.gates) p.push_back(g.angle);
  return p;
}

std::vector<int> extractable_set(const LmesSpec& spec) {
  const graphstab::ColoringResult col = graphstab::chromatic_info(spec.interaction_graph());
  std::vector<int> best;
  for (int c = 0; c < col.chromatic_number; ++c) {
    std::vector<int> cls;
    for (int v = 0; v < spec.num_qubits; ++v) {
      if (col.colors[static_cast<std::size_t>(v)] == c) cls.push_back(v);
    }
    if (cls.size() > best.size()) best = std::move(cls);
  }
  return best;
}

ChannelRun classical_channel_demo(const LmesSpec& spec, std::span<const int> payload, std::mt19937_64& rng) {
  if (!spec.is_pi()) throw std::invalid_argument("the classical channel needs a pi-LMES");
  const std::vector<int> channel = extractable_set(spec);
  if (payload.size() > channel.size()) {
    throw std::invalid_argument("payload longer than the " + std::to_string(channel.size()) + " extractable bits");
  }
  ChannelRun run;
  run.channel.assign(channel.begin(), channel.begin() + static_cast<std::ptrdiff_t>(payload.size()));

  // Sender: remote preparation; the frame is the random sigma_3^i.
  const compiler::CompiledProtocol cp = compiler::compile(lmes_sequence(spec));
  const std::vector<double> params = lmes_params(spec);
  qsim::OutcomeSource sender = qsim::OutcomeSource::sampled(rng);
  const compiler::ScheduleResult r = compiler::run_schedule(cp, params, sender);
  run.frame_z_type = r.correction.is_z_type();
  if (!run.frame_z_type) throw std::logic_error("LMES preparation produced a non-Z byproduct");
  for (int q = 0; q < spec.num_qubits; ++q) run.frame_bits.push_back(r.correction.at(q) == pauli::Pauli::Z ? 1 : 0);
  for (std::size_t k = 0; k < payload.size(); ++k) {
    if (payload[k] != 0 && payload[k] != 1) throw std::invalid_argument("payload entries must be bits");
    run.announced.push_back(payload[k] ^ run.frame_bits[static_cast<std::size_t>(run.channel[k])]);
  }

  // Receiver: one copy of sigma_3^i |Psi>, measured on the channel set.
  qsim::OutcomeSource receiver = qsim::OutcomeSource::sampled(rng);
  const std::vector<int> bits = extract_independent_set(spec, r.output, run.channel, receiver);
  for (std::size_t k = 0; k < bits.size(); ++k) run.received.push_back(bits[k] ^ run.announced[k]);
  return run;
}

LemmaReport verify_lemma1(double tol) {
  LemmaReport report;
  const std::vector<std::vector<int>> supports{{0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  const int n = 3;
  double worst = 0.0;
  for (unsigned subset = 0; subset < 16; ++subset) {
    LmesSpec spec{n, {}};
    for (unsigned s = 0; s < 4; ++s) {
      if (subset & (1u << s)) spec.gates.push_back({supports[s], std::numbers::pi});
    }
    ++report.specs;
    const qsim::StateVector psi0 = build_lmes(spec);
    for (int j = 0; j < n; ++j) {
      const Eigen::MatrixXcd sj = generalized_stabilizer(spec, j);
      for (unsigned i = 0; i < 8; ++i) {
        // sigma_3^i |Psi_0>.
        Eigen::VectorXcd psi = psi0.amplitudes();
        for (std::uint64_t x = 0; x < 8; ++x) {
          if (std::popcount(x & i) % 2) psi[static_cast<Eigen::Index>(x)] *= -1.0;
        }
        const std::complex<double> lhs = psi.dot(sj * psi);
        for (int lx = 0; lx < 2; ++lx) {
          for (unsigned k = 0; k < 4; ++k) {
            // |l_x> on qubit j, the bits of k on the other two qubits in order.
            Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(8);
            for (int xj = 0; xj < 2; ++xj) {
              std::uint64_t x = 0;
              int used = 0;
              for (int q = 0; q < n; ++q) {
                int b = 0;
                if (q == j) {
                  b = xj;
                } else {
                  b = (k >> (1 - used)) & 1;
                  ++used;
                }
                if (b) x |= qubit_bit(q, n);
              }
              probe[static_cast<Eigen::Index>(x)] = (lx == 1 && xj == 1 ? -1.0 : 1.0) / std::numbers::sqrt2;
            }
            if (std::abs(probe.dot(psi)) < 1e-9) continue;
            const std::complex<double> rhs = probe.dot(sj * probe);
            worst = std::max(worst, std::abs(lhs - rhs));
            ++report.checks;
          }
        }
      }
    }
  }
  report.max_deviation = worst;
  report.passed = report.checks > 0 && worst <= tol;
  return report;
}

}  // namespace rep::lme
