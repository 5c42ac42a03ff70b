#pragma once

// Dense statevector / density-matrix engine.
//
// Qubit indexing: qubit 0 is the most significant bit of the basis index,
// i.e. for n qubits basis state |b_0 b_1 ... b_{n-1}> has index
// sum_q b_q * 2^(n-1-q). Every module in the project uses this convention.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace rep::qsim {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr int kMaxQubits = 23;

enum class GateKind {
  H,        // Hadamard
  Phase,    // exp(i * angle * Z^{(q1)} ... Z^{(qk)}) on the support
  XPhase,   // exp(i * angle * X) on one qubit
  CZ,
  CNOT,     // qubits = {control, target}
  Unitary,  // general single-qubit 2x2 matrix (verification only)
};

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  double angle = 0.0;
  Matrix2 matrix = Matrix2::Identity();

  static Gate h(int q);
  static Gate phase(std::vector<int> support, double angle);
  static Gate x_phase(int q, double angle);
  static Gate cz(int a, int b);
  static Gate cnot(int control, int target);
  static Gate unitary(int q, const Matrix2& u);

  bool operator==(const Gate& other) const;
};

/// True when the gate maps Pauli operators to Pauli operators. Phase and
/// XPhase gates qualify when their angle is an integer multiple of pi/4.
bool is_clifford(const Gate& g);

/// Integer k with angle == k*pi/4 (within 1e-12), if one exists.
std::optional<int> quarter_turns(double angle);

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int num_qubits);

  static StateVector plus(int num_qubits);
  static StateVector basis(int num_qubits, std::uint64_t index);
  /// Takes ownership of raw amplitudes; size must be a power of two and the
  /// vector must be normalized within 1e-10.
  static StateVector from_amplitudes(Eigen::VectorXcd amplitudes);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex amplitude(std::uint64_t index) const { return amps_[static_cast<Eigen::Index>(index)]; }
  double norm() const { return amps_.norm(); }

  /// Kronecker product; this state's qubits come first.
  StateVector tensor(const StateVector& other) const;

  /// Moves qubit order: the result's qubit i is this state's qubit order[i].
  StateVector permuted(std::span<const int> order) const;

  nlohmann::json to_json() const;

 private:
  StateVector(int num_qubits, Eigen::VectorXcd amps);
  friend StateVector apply_gate(StateVector, const Gate&);

  int num_qubits_;
  Eigen::VectorXcd amps_;
};

/// Chooses measurement outcomes: either sampled from the Born rule with an
/// explicit generator or forced from a fixed directive list.
class OutcomeSource {
 public:
  static OutcomeSource sampled(std::mt19937_64& rng);
  static OutcomeSource forced(std::vector<int> outcomes);

  /// Picks an outcome given the outcome probabilities. Throws
  /// std::domain_error if a forced outcome has probability below 1e-12, and
  /// std::out_of_range when a forced list runs out.
  int choose(std::span<const double> probabilities);

  bool is_forced() const { return rng_ == nullptr; }

 private:
  std::mt19937_64* rng_ = nullptr;
  std::vector<int> forced_;
  std::size_t next_ = 0;
};

struct MeasureResult {
  int outcome = 0;
  double probability = 0.0;
  StateVector post_state{0};  // measured qubit(s) removed
};

/// U|psi>. Throws std::out_of_range for bad qubit indices and
/// std::invalid_argument for malformed gates (empty support, repeated
/// qubits, non-finite angle, non-unitary matrix).
StateVector apply_gate(StateVector state, const Gate& gate);
StateVector apply_circuit(StateVector state, std::span<const Gate> gates);

/// Single-qubit basis B_beta = { Z^i Z(-beta)|+> : i = 0, 1 } with
/// Z(a) = exp(i a Z). Returns the basis vector for outcome i.
Eigen::Vector2cd basis_vector(double beta, int outcome);

/// Projective measurement of `qubit` in B_beta; the qubit is removed from
/// the renormalized post-measurement state.
MeasureResult measure_basis(const StateVector& state, int qubit, double beta, OutcomeSource& source);

/// Projects the pair onto the Bell basis { (sigma_i (x) 1)|Phi+> }, sigma_i
/// acting on `first`. Both qubits are removed from the post state.
MeasureResult bell_measure(const StateVector& state, int first, int second, OutcomeSource& source);

/// Contracts `qubit` with the bra <v|, removes it, and renormalizes. Returns
/// the probability |<v|psi>|^2 alongside.
MeasureResult project_qubit(const StateVector& state, int qubit, const Eigen::Vector2cd& v);

/// Von Neumann entropy (base 2) of the reduced state on `subsystem`.
double entanglement_entropy(const StateVector& state, std::span<const int> subsystem);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// Expectation <psi|P|psi> for a dense operator over all qubits.
Complex expectation(const StateVector& state, const Eigen::MatrixXcd& op);

class DensityMatrix {
 public:
  static DensityMatrix from_pure(const StateVector& state);
  /// Validates Hermiticity and unit trace within 1e-10.
  static DensityMatrix from_matrix(Eigen::MatrixXcd m);

  int num_qubits() const { return num_qubits_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Complex trace() const { return rho_.trace(); }

  /// p*rho + (1-p)/4 * sum_i sigma_i rho sigma_i on one qubit.
  DensityMatrix depolarized(int qubit, double survival) const;
  DensityMatrix conjugated(const Eigen::MatrixXcd& unitary) const;
  DensityMatrix partial_transpose(std::span<const int> qubits) const;

 private:
  DensityMatrix(int n, Eigen::MatrixXcd m) : num_qubits_(n), rho_(std::move(m)) {}
  int num_qubits_ = 0;
  Eigen::MatrixXcd rho_;
};

/// Minimum eigenvalue of the partial transpose over `subsystem`. Throws
/// std::invalid_argument for non-Hermitian input.
double ppt_min_eigenvalue(const DensityMatrix& rho, std::span<const int> subsystem);

}  // namespace rep::qsim
