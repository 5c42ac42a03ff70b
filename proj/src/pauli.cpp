#include "rep/pauli.hpp"

#include <array>
#include <bit>
#include <stdexcept>

namespace rep::pauli {

namespace {

struct Product {
  Pauli result;
  int phase;  // exponent of i
};

// sigma_a * sigma_b = i^phase * sigma_result
Product multiply(Pauli a, Pauli b) {
  static constexpr std::array<std::array<Product, 4>, 4> kTable{{
      {{{Pauli::I, 0}, {Pauli::X, 0}, {Pauli::Y, 0}, {Pauli::Z, 0}}},
      {{{Pauli::X, 0}, {Pauli::I, 0}, {Pauli::Z, 1}, {Pauli::Y, 3}}},
      {{{Pauli::Y, 0}, {Pauli::Z, 3}, {Pauli::I, 0}, {Pauli::X, 1}}},
      {{{Pauli::Z, 0}, {Pauli::Y, 1}, {Pauli::X, 3}, {Pauli::I, 0}}},
  }};
  return kTable[static_cast<int>(a)][static_cast<int>(b)];
}

bool has_x(Pauli p) { return p == Pauli::X || p == Pauli::Y; }
bool has_z(Pauli p) { return p == Pauli::Z || p == Pauli::Y; }

Eigen::Matrix2cd dense(Pauli p) {
  const qsim::Complex I(0, 1);
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -I, I, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// exp(i k pi/4 Q) P exp(-i k pi/4 Q) for a Pauli string Q.
PauliString rotate(const PauliString& p, const PauliString& q, int k) {
  if (p.commutes_with(q)) return p;
  // Anticommuting: the result is exp(2i k pi/4 Q) P.
  switch (((k % 4) + 4) % 4) {
    case 0: return p;
    case 2: {
      PauliString r = p;
      r.set_phase(p.phase() + 2);
      return r;
    }
    case 1: {
      PauliString iq = q;
      iq.set_phase(q.phase() + 1);
      return iq * p;
    }
    default: {
      PauliString iq = q;
      iq.set_phase(q.phase() + 3);
      return iq * p;
    }
  }
}

}  // namespace

char letter(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

PauliString::PauliString(int num_qubits) : letters_(static_cast<std::size_t>(num_qubits), Pauli::I) {
  if (num_qubits < 0) throw std::invalid_argument("negative qubit count");
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  if (text.starts_with("-i")) {
    phase = 3;
    text.remove_prefix(2);
  } else if (text.starts_with("+i")) {
    phase = 1;
    text.remove_prefix(2);
  } else if (text.starts_with("-")) {
    phase = 2;
    text.remove_prefix(1);
  } else if (text.starts_with("+")) {
    text.remove_prefix(1);
  } else if (text.starts_with("i")) {
    phase = 1;
    text.remove_prefix(1);
  }
  PauliString p(static_cast<int>(text.size()));
  for (std::size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I': break;
      case 'X': p.letters_[q] = Pauli::X; break;
      case 'Y': p.letters_[q] = Pauli::Y; break;
      case 'Z': p.letters_[q] = Pauli::Z; break;
      default: throw std::invalid_argument(std::string("bad Pauli letter '") + text[q] + "'");
    }
  }
  p.phase_ = phase;
  return p;
}

PauliString PauliString::single(int num_qubits, int qubit, Pauli p) {
  PauliString s(num_qubits);
  s.set(qubit, p);
  return s;
}

PauliString PauliString::z_on(int num_qubits, std::span<const int> support) {
  PauliString s(num_qubits);
  for (int q : support) s.set(q, Pauli::Z);
  return s;
}

PauliString PauliString::operator*(const PauliString& rhs) const {
  PauliString out = *this;
  out *= rhs;
  return out;
}

PauliString& PauliString::operator*=(const PauliString& rhs) {
  if (rhs.size() != size()) throw std::invalid_argument("Pauli strings of different length");
  int phase = phase_ + rhs.phase_;
  for (std::size_t q = 0; q < letters_.size(); ++q) {
    const Product pr = multiply(letters_[q], rhs.letters_[q]);
    letters_[q] = pr.result;
    phase += pr.phase;
  }
  set_phase(phase);
  return *this;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.size() != size()) throw std::invalid_argument("Pauli strings of different length");
  int anti = 0;
  for (std::size_t q = 0; q < letters_.size(); ++q) {
    const Pauli a = letters_[q];
    const Pauli b = other.letters_[q];
    if (a != Pauli::I && b != Pauli::I && a != b) ++anti;
  }
  return anti % 2 == 0;
}

bool PauliString::is_identity() const {
  for (Pauli p : letters_) {
    if (p != Pauli::I) return false;
  }
  return true;
}

bool PauliString::is_z_type() const {
  for (Pauli p : letters_) {
    if (has_x(p)) return false;
  }
  return true;
}

PauliString PauliString::restricted(std::span<const int> qubits) const {
  PauliString out(static_cast<int>(qubits.size()));
  for (std::size_t i = 0; i < qubits.size(); ++i) out.letters_[i] = at(qubits[i]);
  out.phase_ = phase_;
  return out;
}

PauliString PauliString::without(int qubit) const {
  if (qubit < 0 || qubit >= size()) throw std::out_of_range("qubit outside Pauli string");
  PauliString out = *this;
  out.letters_.erase(out.letters_.begin() + qubit);
  return out;
}

Eigen::MatrixXcd PauliString::matrix() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (Pauli p : letters_) {
    const Eigen::Matrix2cd d = dense(p);
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    // m (x) d, so the first letter ends up most significant.
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) next.block<2, 2>(2 * i, 2 * j) = m(i, j) * d;
    }
    m = std::move(next);
  }
  static const std::array<qsim::Complex, 4> kPhases{1.0, qsim::Complex(0, 1), -1.0, qsim::Complex(0, -1)};
  return kPhases[static_cast<std::size_t>(phase_)] * m;
}

std::string PauliString::to_string() const {
  static const std::array<const char*, 4> kPrefix{"+", "+i", "-", "-i"};
  std::string s = kPrefix[static_cast<std::size_t>(phase_)];
  for (Pauli p : letters_) s += letter(p);
  return s;
}

PauliString conjugate(const PauliString& p, const qsim::Gate& gate) {
  using qsim::GateKind;
  const int n = p.size();
  for (int q : gate.qubits) {
    if (q < 0 || q >= n) throw std::out_of_range("gate qubit outside Pauli string");
  }
  switch (gate.kind) {
    case GateKind::Phase:
    case GateKind::XPhase: {
      const auto k = qsim::quarter_turns(gate.angle);
      if (!k) throw std::invalid_argument("phase gate angle is not a multiple of pi/4");
      const PauliString axis = gate.kind == GateKind::Phase
                                   ? PauliString::z_on(n, gate.qubits)
                                   : PauliString::single(n, gate.qubits[0], Pauli::X);
      return rotate(p, axis, *k);
    }
    case GateKind::Unitary:
      throw std::invalid_argument("cannot conjugate a Pauli string by a general unitary");
    case GateKind::H:
    case GateKind::CZ:
    case GateKind::CNOT:
      break;
  }

  // Images of X_q and Z_q for the gate's qubits; the map is a homomorphism,
  // and Y = i X Z.
  auto image_x = [&](int q) {
    PauliString r = PauliString::single(n, q, Pauli::X);
    switch (gate.kind) {
      case GateKind::H: r.set(q, Pauli::Z); break;
      case GateKind::CZ: r.set(q == gate.qubits[0] ? gate.qubits[1] : gate.qubits[0], Pauli::Z); break;
      case GateKind::CNOT:
        if (q == gate.qubits[0]) r.set(gate.qubits[1], Pauli::X);
        break;
      default: break;
    }
    return r;
  };
  auto image_z = [&](int q) {
    PauliString r = PauliString::single(n, q, Pauli::Z);
    switch (gate.kind) {
      case GateKind::H: r.set(q, Pauli::X); break;
      case GateKind::CNOT:
        if (q == gate.qubits[1]) r.set(gate.qubits[0], Pauli::Z);
        break;
      default: break;
    }
    return r;
  };

  PauliString out = p;
  for (int q : gate.qubits) out.set(q, Pauli::I);
  for (int q : gate.qubits) {
    switch (p.at(q)) {
      case Pauli::I: break;
      case Pauli::X: out *= image_x(q); break;
      case Pauli::Z: out *= image_z(q); break;
      case Pauli::Y: {
        PauliString y = image_x(q) * image_z(q);
        y.set_phase(y.phase() + 1);
        out *= y;
        break;
      }
    }
  }
  return out;
}

qsim::StateVector apply_pauli(const qsim::StateVector& state, const PauliString& p) {
  const int n = state.num_qubits();
  if (p.size() != n) throw std::invalid_argument("Pauli string length does not match the state");
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  int y_count = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    if (has_x(p.at(q))) flip |= bit;
    if (has_z(p.at(q))) sign |= bit;
    if (p.at(q) == Pauli::Y) ++y_count;
  }
  // Y = i X Z: apply Z, then X, then the factor i per Y.
  static const std::array<qsim::Complex, 4> kPhases{1.0, qsim::Complex(0, 1), -1.0, qsim::Complex(0, -1)};
  const qsim::Complex factor = kPhases[static_cast<std::size_t>((p.phase() + y_count) % 4)];
  Eigen::VectorXcd out(state.amplitudes().size());
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    const double s = (std::popcount(i & sign) & 1) ? -1.0 : 1.0;
    out[static_cast<Eigen::Index>(i ^ flip)] = factor * s * state.amplitude(i);
  }
  return qsim::StateVector::from_amplitudes(std::move(out));
}

}  // namespace rep::pauli
