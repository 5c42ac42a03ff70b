#include "rep/qsim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rep::qsim {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kZeroProbability = 1e-12;

std::uint64_t bit_of(int qubit, int n) { return std::uint64_t{1} << (n - 1 - qubit); }

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " outside [0, " + std::to_string(n) + ")");
  }
}

void validate(const Gate& g, int n) {
  if (g.qubits.empty()) throw std::invalid_argument("gate has no qubits");
  for (int q : g.qubits) check_qubit(q, n);
  auto sorted = g.qubits;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("gate acts twice on the same qubit");
  }
  switch (g.kind) {
    case GateKind::H:
    case GateKind::XPhase:
    case GateKind::Unitary:
      if (g.qubits.size() != 1) throw std::invalid_argument("single-qubit gate with wrong arity");
      break;
    case GateKind::CZ:
    case GateKind::CNOT:
      if (g.qubits.size() != 2) throw std::invalid_argument("two-qubit gate with wrong arity");
      break;
    case GateKind::Phase:
      break;
  }
  if (!std::isfinite(g.angle)) throw std::invalid_argument("gate angle is not finite");
  if (g.kind == GateKind::Unitary) {
    const Matrix2 prod = g.matrix.adjoint() * g.matrix;
    if ((prod - Matrix2::Identity()).cwiseAbs().maxCoeff() > kUnitaryTol) {
      throw std::invalid_argument("gate matrix is not unitary");
    }
  }
}

// Applies a 2x2 matrix to one qubit in place.
void apply_single(Eigen::VectorXcd& amps, int n, int q, const Matrix2& u) {
  const std::uint64_t bit = bit_of(q, n);
  const auto dim = static_cast<std::uint64_t>(amps.size());
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(i);
    const auto i1 = static_cast<Eigen::Index>(i | bit);
    const Complex a0 = amps[i0];
    const Complex a1 = amps[i1];
    amps[i0] = u(0, 0) * a0 + u(0, 1) * a1;
    amps[i1] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

Matrix2 hadamard() {
  Matrix2 h;
  const double s = 1.0 / std::numbers::sqrt2;
  h << s, s, s, -s;
  return h;
}

// Index of the state with `qubit` removed, given the full index.
std::uint64_t remove_bit(std::uint64_t index, int qubit, int n) {
  const int pos = n - 1 - qubit;
  const std::uint64_t low = index & ((std::uint64_t{1} << pos) - 1);
  const std::uint64_t high = index >> (pos + 1);
  return (high << pos) | low;
}

double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda > 1e-15) s -= lambda * std::log2(lambda);
  }
  return s;
}

}  // namespace

Gate Gate::h(int q) { return Gate{GateKind::H, {q}}; }
Gate Gate::phase(std::vector<int> support, double angle) {
  return Gate{GateKind::Phase, std::move(support), angle};
}
Gate Gate::x_phase(int q, double angle) { return Gate{GateKind::XPhase, {q}, angle}; }
Gate Gate::cz(int a, int b) { return Gate{GateKind::CZ, {a, b}}; }
Gate Gate::cnot(int control, int target) { return Gate{GateKind::CNOT, {control, target}}; }
Gate Gate::unitary(int q, const Matrix2& u) { return Gate{GateKind::Unitary, {q}, 0.0, u}; }

bool Gate::operator==(const Gate& other) const {
  return kind == other.kind && qubits == other.qubits && angle == other.angle &&
         (kind != GateKind::Unitary || matrix == other.matrix);
}

std::optional<int> quarter_turns(double angle) {
  const double k = angle / (std::numbers::pi / 4.0);
  const double r = std::round(k);
  if (std::abs(k - r) < 1e-12) return static_cast<int>(r);
  return std::nullopt;
}

bool is_clifford(const Gate& g) {
  switch (g.kind) {
    case GateKind::H:
    case GateKind::CZ:
    case GateKind::CNOT:
      return true;
    case GateKind::Phase:
    case GateKind::XPhase:
      return quarter_turns(g.angle).has_value();
    case GateKind::Unitary:
      return false;
  }
  return false;
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::Phase: return "phase";
    case GateKind::XPhase: return "xphase";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::Unitary: return "unitary";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& name) {
  if (name == "H") return GateKind::H;
  if (name == "phase") return GateKind::Phase;
  if (name == "xphase") return GateKind::XPhase;
  if (name == "CZ") return GateKind::CZ;
  if (name == "CNOT") return GateKind::CNOT;
  if (name == "unitary") return GateKind::Unitary;
  throw std::invalid_argument("unknown gate kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count " + std::to_string(num_qubits) + " outside [0, 23]");
  }
  amps_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, Eigen::VectorXcd amps)
    : num_qubits_(num_qubits), amps_(std::move(amps)) {}

StateVector StateVector::plus(int num_qubits) {
  StateVector s(num_qubits);
  s.amps_.setConstant(1.0 / std::sqrt(static_cast<double>(s.amps_.size())));
  return s;
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
  StateVector s(num_qubits);
  if (index >= s.dimension()) throw std::out_of_range("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const auto size = static_cast<std::uint64_t>(amplitudes.size());
  if (size == 0 || (size & (size - 1)) != 0) {
    throw std::invalid_argument("amplitude count is not a power of two");
  }
  int n = 0;
  while ((std::uint64_t{1} << n) < size) ++n;
  if (n > kMaxQubits) throw std::invalid_argument("too many qubits");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw std::invalid_argument("amplitudes not normalized");
  return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::tensor(const StateVector& other) const {
  const int n = num_qubits_ + other.num_qubits_;
  if (n > kMaxQubits) throw std::invalid_argument("qubit budget exceeded");
  Eigen::VectorXcd out(amps_.size() * other.amps_.size());
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    out.segment(i * other.amps_.size(), other.amps_.size()) = amps_[i] * other.amps_;
  }
  return StateVector(n, std::move(out));
}

StateVector StateVector::permuted(std::span<const int> order) const {
  const int n = num_qubits_;
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (int q : order) {
    check_qubit(q, n);
    if (seen[q]) throw std::invalid_argument("not a permutation");
    seen[q] = true;
  }
  Eigen::VectorXcd out(amps_.size());
  for (std::uint64_t src = 0; src < dimension(); ++src) {
    std::uint64_t dst = 0;
    for (int i = 0; i < n; ++i) {
      if (src & bit_of(order[i], n)) dst |= bit_of(i, n);
    }
    out[static_cast<Eigen::Index>(dst)] = amps_[static_cast<Eigen::Index>(src)];
  }
  return StateVector(n, std::move(out));
}

nlohmann::json StateVector::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Complex& a : amps_) arr.push_back({a.real(), a.imag()});
  return arr;
}

// ---------------------------------------------------------------------------
// OutcomeSource

OutcomeSource OutcomeSource::sampled(std::mt19937_64& rng) {
  OutcomeSource s;
  s.rng_ = &rng;
  return s;
}

OutcomeSource OutcomeSource::forced(std::vector<int> outcomes) {
  OutcomeSource s;
  s.forced_ = std::move(outcomes);
  return s;
}

int OutcomeSource::choose(std::span<const double> probabilities) {
  if (rng_ == nullptr) {
    if (next_ >= forced_.size()) throw std::out_of_range("forced outcome list exhausted");
    const int k = forced_[next_++];
    if (k < 0 || static_cast<std::size_t>(k) >= probabilities.size()) {
      throw std::invalid_argument("forced outcome out of range");
    }
    if (probabilities[static_cast<std::size_t>(k)] < kZeroProbability) {
      throw std::domain_error("forced outcome has zero probability");
    }
    return k;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double r = uniform(*rng_);
  int last_possible = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    last_possible = static_cast<int>(k);
    if (r < probabilities[k]) return static_cast<int>(k);
    r -= probabilities[k];
  }
  return last_possible;
}

// ---------------------------------------------------------------------------
// Gates

StateVector apply_gate(StateVector state, const Gate& gate) {
  const int n = state.num_qubits_;
  validate(gate, n);
  Eigen::VectorXcd& amps = state.amps_;
  const auto dim = static_cast<std::uint64_t>(amps.size());
  switch (gate.kind) {
    case GateKind::H:
      apply_single(amps, n, gate.qubits[0], hadamard());
      break;
    case GateKind::XPhase: {
      const double c = std::cos(gate.angle);
      const double s = std::sin(gate.angle);
      Matrix2 u;
      u << c, Complex(0, s), Complex(0, s), c;
      apply_single(amps, n, gate.qubits[0], u);
      break;
    }
    case GateKind::Unitary:
      apply_single(amps, n, gate.qubits[0], gate.matrix);
      break;
    case GateKind::Phase: {
      std::uint64_t mask = 0;
      for (int q : gate.qubits) mask |= bit_of(q, n);
      const Complex even = std::polar(1.0, gate.angle);
      const Complex odd = std::polar(1.0, -gate.angle);
      for (std::uint64_t i = 0; i < dim; ++i) {
        amps[static_cast<Eigen::Index>(i)] *= (std::popcount(i & mask) & 1) ? odd : even;
      }
      break;
    }
    case GateKind::CZ: {
      const std::uint64_t mask = bit_of(gate.qubits[0], n) | bit_of(gate.qubits[1], n);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & mask) == mask) amps[static_cast<Eigen::Index>(i)] *= -1.0;
      }
      break;
    }
    case GateKind::CNOT: {
      const std::uint64_t c = bit_of(gate.qubits[0], n);
      const std::uint64_t t = bit_of(gate.qubits[1], n);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & c) && !(i & t)) {
          std::swap(amps[static_cast<Eigen::Index>(i)], amps[static_cast<Eigen::Index>(i | t)]);
        }
      }
      break;
    }
  }
  return state;
}

StateVector apply_circuit(StateVector state, std::span<const Gate> gates) {
  for (const Gate& g : gates) state = apply_gate(std::move(state), g);
  return state;
}

// ---------------------------------------------------------------------------
// Measurements

Eigen::Vector2cd basis_vector(double beta, int outcome) {
  // Z(-beta)|+> = (e^{-i beta}|0> + e^{i beta}|1>)/sqrt2, then Z^outcome.
  const double s = 1.0 / std::numbers::sqrt2;
  Eigen::Vector2cd v;
  v << s * std::polar(1.0, -beta), s * std::polar(1.0, beta) * (outcome ? -1.0 : 1.0);
  return v;
}

MeasureResult project_qubit(const StateVector& state, int qubit, const Eigen::Vector2cd& v) {
  const int n = state.num_qubits();
  check_qubit(qubit, n);
  const std::uint64_t bit = bit_of(qubit, n);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(state.dimension() / 2));
  const Complex b0 = std::conj(v[0]);
  const Complex b1 = std::conj(v[1]);
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    const auto j = static_cast<Eigen::Index>(remove_bit(i, qubit, n));
    out[j] += ((i & bit) ? b1 : b0) * state.amplitude(i);
  }
  const double prob = out.squaredNorm();
  MeasureResult r;
  r.probability = prob;
  if (prob > 0.0) out /= std::sqrt(prob);
  r.post_state = prob > 0.0 ? StateVector::from_amplitudes(std::move(out)) : StateVector(n - 1);
  return r;
}

MeasureResult measure_basis(const StateVector& state, int qubit, double beta, OutcomeSource& source) {
  MeasureResult r0 = project_qubit(state, qubit, basis_vector(beta, 0));
  MeasureResult r1 = project_qubit(state, qubit, basis_vector(beta, 1));
  const double probs[2] = {r0.probability, r1.probability};
  const int k = source.choose(probs);
  MeasureResult& chosen = k == 0 ? r0 : r1;
  chosen.outcome = k;
  return std::move(chosen);
}

MeasureResult bell_measure(const StateVector& state, int first, int second, OutcomeSource& source) {
  const int n = state.num_qubits();
  check_qubit(first, n);
  check_qubit(second, n);
  if (first == second) throw std::invalid_argument("Bell measurement needs two distinct qubits");
  // Bell vectors (sigma_i (x) 1)|Phi+> with `first` as the left factor.
  const double s = 1.0 / std::numbers::sqrt2;
  const Complex I(0, 1);
  std::array<Eigen::Vector4cd, 4> bell;
  bell[0] << s, 0, 0, s;
  bell[1] << 0, s, s, 0;
  bell[2] << 0, -I * s, I * s, 0;
  bell[3] << s, 0, 0, -s;
  const std::uint64_t b1 = bit_of(first, n);
  const std::uint64_t b2 = bit_of(second, n);
  std::array<Eigen::VectorXcd, 4> projected;
  std::array<double, 4> probs{};
  for (int k = 0; k < 4; ++k) {
    projected[k] = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(state.dimension() / 4));
  }
  const int hi = std::min(first, second);
  const int lo = std::max(first, second);
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    const int pair = ((i & b1) ? 2 : 0) | ((i & b2) ? 1 : 0);
    // Remove the larger-index qubit first so the other index is unchanged.
    const auto j = static_cast<Eigen::Index>(remove_bit(remove_bit(i, lo, n), hi, n - 1));
    for (int k = 0; k < 4; ++k) projected[k][j] += std::conj(bell[k][pair]) * state.amplitude(i);
  }
  for (int k = 0; k < 4; ++k) probs[k] = projected[k].squaredNorm();
  const int k = source.choose(probs);
  MeasureResult r;
  r.outcome = k;
  r.probability = probs[k];
  r.post_state = StateVector::from_amplitudes(projected[k] / std::sqrt(probs[k]));
  return r;
}

// ---------------------------------------------------------------------------
// Entanglement and overlaps

double entanglement_entropy(const StateVector& state, std::span<const int> subsystem) {
  const int n = state.num_qubits();
  std::vector<bool> in_a(n, false);
  for (int q : subsystem) {
    check_qubit(q, n);
    if (in_a[q]) throw std::invalid_argument("repeated qubit in bipartition");
    in_a[q] = true;
  }
  const int na = static_cast<int>(subsystem.size());
  if (na == 0 || na == n) throw std::invalid_argument("bipartition must be non-trivial");
  std::vector<int> a_qubits;
  std::vector<int> b_qubits;
  for (int q = 0; q < n; ++q) (in_a[q] ? a_qubits : b_qubits).push_back(q);
  // Reshape into a (2^|A| x 2^|B|) matrix and diagonalize the smaller Gram matrix.
  const Eigen::Index rows = Eigen::Index{1} << a_qubits.size();
  const Eigen::Index cols = Eigen::Index{1} << b_qubits.size();
  Eigen::MatrixXcd m(rows, cols);
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    std::uint64_t r = 0;
    std::uint64_t c = 0;
    for (int q : a_qubits) r = (r << 1) | ((i & bit_of(q, n)) ? 1 : 0);
    for (int q : b_qubits) c = (c << 1) | ((i & bit_of(q, n)) ? 1 : 0);
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = state.amplitude(i);
  }
  const Eigen::MatrixXcd rho = rows <= cols ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  return entropy_bits(solver.eigenvalues());
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("fidelity of states with different sizes");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

Complex expectation(const StateVector& state, const Eigen::MatrixXcd& op) {
  if (op.rows() != static_cast<Eigen::Index>(state.dimension()) || op.cols() != op.rows()) {
    throw std::invalid_argument("operator dimension mismatch");
  }
  return state.amplitudes().dot(op * state.amplitudes());
}

// ---------------------------------------------------------------------------
// Density matrices

DensityMatrix DensityMatrix::from_pure(const StateVector& state) {
  return DensityMatrix(state.num_qubits(), state.amplitudes() * state.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
  const auto size = static_cast<std::uint64_t>(m.rows());
  if (m.rows() != m.cols() || size == 0 || (size & (size - 1)) != 0) {
    throw std::invalid_argument("density matrix must be square with power-of-two size");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("density matrix not Hermitian");
  if (std::abs(m.trace() - Complex(1.0)) > 1e-10) throw std::invalid_argument("density matrix trace is not 1");
  int n = 0;
  while ((std::uint64_t{1} << n) < size) ++n;
  return DensityMatrix(n, std::move(m));
}

DensityMatrix DensityMatrix::depolarized(int qubit, double survival) const {
  check_qubit(qubit, num_qubits_);
  if (!(survival >= 0.0 && survival <= 1.0)) throw std::invalid_argument("survival parameter outside [0,1]");
  // sum_i sigma_i rho sigma_i = 2 * Tr_q(rho) (x) 1_q, so
  // E(rho) = p*rho + (1-p)/2 * Tr_q(rho) (x) 1.
  const int n = num_qubits_;
  const std::uint64_t bit = bit_of(qubit, n);
  const auto dim = static_cast<std::uint64_t>(rho_.rows());
  Eigen::MatrixXcd out = survival * rho_;
  const double w = (1.0 - survival) / 2.0;
  for (std::uint64_t r = 0; r < dim; ++r) {
    for (std::uint64_t c = 0; c < dim; ++c) {
      if (((r ^ c) & bit) != 0) continue;
      const auto rr = static_cast<Eigen::Index>(r & ~bit);
      const auto cc = static_cast<Eigen::Index>(c & ~bit);
      const Complex traced = rho_(rr, cc) + rho_(rr | static_cast<Eigen::Index>(bit), cc | static_cast<Eigen::Index>(bit));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += w * traced;
    }
  }
  return DensityMatrix(n, std::move(out));
}

DensityMatrix DensityMatrix::conjugated(const Eigen::MatrixXcd& unitary) const {
  if (unitary.rows() != rho_.rows() || unitary.cols() != rho_.cols()) {
    throw std::invalid_argument("unitary dimension mismatch");
  }
  return DensityMatrix(num_qubits_, unitary * rho_ * unitary.adjoint());
}

DensityMatrix DensityMatrix::partial_transpose(std::span<const int> qubits) const {
  const int n = num_qubits_;
  std::uint64_t mask = 0;
  for (int q : qubits) {
    check_qubit(q, n);
    mask |= bit_of(q, n);
  }
  const auto dim = static_cast<std::uint64_t>(rho_.rows());
  Eigen::MatrixXcd out(rho_.rows(), rho_.cols());
  for (std::uint64_t r = 0; r < dim; ++r) {
    for (std::uint64_t c = 0; c < dim; ++c) {
      // Swap the transposed qubits' bits between row and column.
      const std::uint64_t nr = (r & ~mask) | (c & mask);
      const std::uint64_t nc = (c & ~mask) | (r & mask);
      out(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc)) =
          rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return DensityMatrix(n, std::move(out));
}

double ppt_min_eigenvalue(const DensityMatrix& rho, std::span<const int> subsystem) {
  const Eigen::MatrixXcd& m = rho.matrix();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("density matrix not Hermitian");
  const DensityMatrix pt = rho.partial_transpose(subsystem);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(pt.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace rep::qsim
