#include "rep/rep_protocol.hpp"

#include <cstdio>
#include <stdexcept>

#include "rep/canonical_form.hpp"
#include "rep/graphstab.hpp"
#include "rep/stats.hpp"

namespace rep::protocol {

namespace {

std::string format_double(double v, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* fmt) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    if constexpr (std::is_floating_point_v<T>) {
      s += format_double(values[i], fmt);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

REPRun execute(const compiler::CompiledProtocol& cp, int n, std::span<const double> params,
               const qsim::StateVector& target, qsim::OutcomeSource& source) {
  const compiler::ScheduleResult r = compiler::run_schedule(cp, params, source);
  REPRun run;
  run.n = n;
  run.params.assign(params.begin(), params.end());
  run.outcomes = r.raw_outcomes;
  run.correction = r.correction;
  if (run.correction.at(0) != pauli::Pauli::I && run.correction.at(0) != pauli::Pauli::Z) {
    throw std::logic_error("correction on qubit 1 is not diagonal: " + run.correction.to_string());
  }
  if (replay_frame(cp, r.raw_outcomes) != run.correction) {
    throw std::logic_error("receiver-side frame reconstruction disagrees with the sender");
  }
  run.ebits_shared = resource_ebits(cp);
  run.resource_hash = cp.circuit_hash();
  run.fidelity = qsim::fidelity(compiler::corrected_output(r), target);
  return run;
}

}  // namespace

nlohmann::json REPRun::to_json() const {
  return {{"n", n},
          {"variant", mes ? "mes" : "cf"},
          {"params", params},
          {"outcomes", outcomes},
          {"correction", correction.to_string().substr(1)},
          {"message", message},
          {"cbits", cbits_sent},
          {"ebits", ebits_shared},
          {"fidelity", fidelity}};
}

std::vector<int> encode_correction(const PauliString& correction) {
  std::vector<int> bits;
  const pauli::Pauli first = correction.at(0);
  if (first != pauli::Pauli::I && first != pauli::Pauli::Z) throw std::invalid_argument("qubit 1 letter must be I or Z");
  bits.push_back(first == pauli::Pauli::Z ? 1 : 0);
  for (int q = 1; q < correction.size(); ++q) {
    const int k = static_cast<int>(correction.at(q));
    bits.push_back(k >> 1);
    bits.push_back(k & 1);
  }
  return bits;
}

PauliString decode_correction(std::span<const int> bits, int n) {
  if (static_cast<int>(bits.size()) != 2 * n - 1) throw std::invalid_argument("message must have 2n - 1 bits");
  PauliString p(n);
  p.set(0, bits[0] ? pauli::Pauli::Z : pauli::Pauli::I);
  for (int q = 1; q < n; ++q) {
    const int k = 2 * bits[static_cast<std::size_t>(2 * q - 1)] + bits[static_cast<std::size_t>(2 * q)];
    p.set(q, static_cast<pauli::Pauli>(k));
  }
  return p;
}

PauliString replay_frame(const compiler::CompiledProtocol& cp, std::span<const int> raw_outcomes) {
  if (raw_outcomes.size() != cp.schedule.size()) throw std::invalid_argument("one outcome per schedule step required");
  PauliString frame(cp.total_qubits());
  for (std::size_t t = 0; t < cp.schedule.size(); ++t) {
    const compiler::MeasurementStep& step = cp.schedule[t];
    if (raw_outcomes[t] ^ compiler::effective_measurement(step, frame).flip) frame *= step.byproduct;
    frame.set(step.ancilla, pauli::Pauli::I);
  }
  PauliString out = frame.restricted(cp.output_map);
  out.set_phase(0);
  return out;
}

int resource_ebits(const compiler::CompiledProtocol& cp) {
  const graphstab::StabilizerTableau t = graphstab::tableau_from_circuit(cp.total_qubits(), cp.circuit);
  std::vector<int> sender;
  for (int a = 0; a < cp.num_ancillas; ++a) sender.push_back(a);
  return graphstab::stabilizer_entanglement(t, sender);
}

REPRun run_rep(int n, std::span<const double> params, qsim::OutcomeSource& source) {
  if (n != 2 && n != 3) throw std::invalid_argument("remote preparation supports n = 2 and n = 3");
  const compiler::CompiledProtocol cp = compiler::compile(cf::cf_circuit(n));
  REPRun run = execute(cp, n, params, cf::cf_state(n, params), source);
  if (n == 2) {
    const bool zz = run.correction == PauliString::parse("ZZ");
    if (!zz && !run.correction.is_identity()) throw std::logic_error("unexpected two-qubit correction");
    run.message = {zz ? 1 : 0};
  } else {
    run.message = encode_correction(run.correction);
    if (decode_correction(run.message, n) != run.correction) throw std::logic_error("correction encoding round trip failed");
  }
  run.cbits_sent = static_cast<int>(run.message.size());
  return run;
}

REPRun run_mes_rep(double a1, double a2, double a5, qsim::OutcomeSource& source) {
  const compiler::CompiledProtocol cp = compiler::compile(cf::mes_circuit());
  const std::vector<double> params = cf::mes_params(a1, a2, a5);
  REPRun run = execute(cp, 3, params, cf::cf_state(3, params), source);
  run.mes = true;
  run.message = run.outcomes;
  run.cbits_sent = static_cast<int>(run.message.size());
  return run;
}

nlohmann::json AuditReport::to_json() const {
  return {{"n", n},
          {"runs", runs},
          {"histogram_a", histogram_a},
          {"histogram_b", histogram_b},
          {"chi2", chi2},
          {"dof", dof},
          {"p_value", p_value},
          {"hash_a", hash_a},
          {"hash_b", hash_b},
          {"resource_identical", resource_identical()}};
}

AuditReport obliviousness_audit(int n, std::span<const double> params_a, std::span<const double> params_b, int runs,
                                std::mt19937_64& rng) {
  if (runs <= 0) throw std::invalid_argument("audit needs a positive run count");
  AuditReport report;
  report.n = n;
  report.runs = runs;
  const int bits = n == 2 ? 1 : 2 * n - 1;
  auto histogram = [&](std::span<const double> params, std::uint64_t& hash) {
    std::vector<long> h(std::size_t{1} << bits, 0);
    qsim::OutcomeSource src = qsim::OutcomeSource::sampled(rng);
    for (int k = 0; k < runs; ++k) {
      const REPRun run = run_rep(n, params, src);
      std::size_t index = 0;
      for (int b : run.message) index = (index << 1) | static_cast<std::size_t>(b);
      ++h[index];
      hash = run.resource_hash;
    }
    return h;
  };
  report.histogram_a = histogram(params_a, report.hash_a);
  report.histogram_b = histogram(params_b, report.hash_b);
  const stats::ChiSquare chi = stats::two_sample(report.histogram_a, report.histogram_b);
  report.chi2 = chi.statistic;
  report.dof = chi.dof;
  report.p_value = chi.p_value;
  return report;
}

std::string csv_header() { return "n,variant,params,outcomes,correction,cbits,ebits,fidelity"; }

std::string csv_row(const REPRun& run) {
  return std::to_string(run.n) + ',' + (run.mes ? "mes" : "cf") + ',' + join(run.params, "%.17g") + ',' +
         join(run.outcomes, "") + ',' + run.correction.to_string().substr(1) + ',' + std::to_string(run.cbits_sent) +
         ',' + format_double(run.ebits_shared, "%.0f") + ',' + format_double(run.fidelity, "%.12f");
}

}  // namespace rep::protocol
