#pragma once

// End-to-end remote preparation: the sender measures the controlling
// qubits of the compiled resource, announces a short classical message, and
// the receiver applies the Pauli correction it encodes.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rep/compiler.hpp"
#include "rep/pauli.hpp"
#include "rep/qsim.hpp"

namespace rep::protocol {

using pauli::PauliString;

struct REPRun {
  int n = 0;
  bool mes = false;
  std::vector<double> params;
  std::vector<int> outcomes;  // raw measurement outcomes, schedule order
  PauliString correction;     // on the receiver's n qubits
  std::vector<int> message;   // bits sent
  int cbits_sent = 0;
  double ebits_shared = 0.0;
  double fidelity = 0.0;      // corrected state vs the target state
  std::uint64_t resource_hash = 0;

  nlohmann::json to_json() const;
};

/// Message bits for a correction: qubit 1 gives one bit (I = 0, Z = 1),
/// each other qubit two bits, high bit first, indexing I, X, Y, Z.
std::vector<int> encode_correction(const PauliString& correction);
PauliString decode_correction(std::span<const int> bits, int n);

/// Receiver-side frame reconstruction from raw outcomes alone.
PauliString replay_frame(const compiler::CompiledProtocol& cp, std::span<const int> raw_outcomes);

/// Entanglement (GF(2) rank) between controlling qubits and wires.
int resource_ebits(const compiler::CompiledProtocol& cp);

/// n = 2 sends the single outcome bit (correction I or Z(x)Z); n = 3 sends
/// the 2n - 1 bit correction encoding. Throws for other n.
REPRun run_rep(int n, std::span<const double> params, qsim::OutcomeSource& source);

/// Fixed family with alpha_3 = alpha_4 = pi/4: six-qubit resource, three
/// raw outcome bits as the message.
REPRun run_mes_rep(double a1, double a2, double a5, qsim::OutcomeSource& source);

struct AuditReport {
  int n = 0;
  int runs = 0;
  std::vector<long> histogram_a;
  std::vector<long> histogram_b;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::uint64_t hash_a = 0;
  std::uint64_t hash_b = 0;

  bool resource_identical() const { return hash_a == hash_b; }
  nlohmann::json to_json() const;
};

/// Message distributions for two parameter sets, compared by a two-sample
/// chi-squared test, plus the resource hashes used by each.
AuditReport obliviousness_audit(int n, std::span<const double> params_a, std::span<const double> params_b, int runs,
                                std::mt19937_64& rng);

/// Column names of csv_row.
std::string csv_header();
std::string csv_row(const REPRun& run);

}  // namespace rep::protocol
