#pragma once

// Pauli strings with an i^k phase, and their conjugation by Clifford gates.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rep/qsim.hpp"

namespace rep::pauli {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter(Pauli p);

class PauliString {
 public:
  PauliString() = default;
  /// Identity on n qubits.
  explicit PauliString(int num_qubits);

  /// Parses "XZI" with an optional prefix "+", "-", "i", "-i".
  static PauliString parse(std::string_view text);
  static PauliString single(int num_qubits, int qubit, Pauli p);
  /// Product of Z over `support`.
  static PauliString z_on(int num_qubits, std::span<const int> support);

  int size() const { return static_cast<int>(letters_.size()); }
  Pauli at(int qubit) const { return letters_.at(static_cast<std::size_t>(qubit)); }
  void set(int qubit, Pauli p) { letters_.at(static_cast<std::size_t>(qubit)) = p; }
  /// Exponent k of the overall factor i^k, in 0..3.
  int phase() const { return phase_; }
  void set_phase(int k) { phase_ = ((k % 4) + 4) % 4; }

  PauliString operator*(const PauliString& rhs) const;
  PauliString& operator*=(const PauliString& rhs);
  bool operator==(const PauliString& rhs) const = default;

  bool commutes_with(const PauliString& other) const;
  /// True when every letter is I (the phase is ignored).
  bool is_identity() const;
  /// True when every letter is I or Z.
  bool is_z_type() const;

  /// Letters on the listed qubits, in that order; the phase is kept.
  PauliString restricted(std::span<const int> qubits) const;
  /// Removes one qubit; the phase is kept.
  PauliString without(int qubit) const;

  /// Dense 2^n x 2^n matrix (qubit 0 = most significant bit).
  Eigen::MatrixXcd matrix() const;

  /// e.g. "+XZI", "-iYY".
  std::string to_string() const;

 private:
  std::vector<Pauli> letters_;
  int phase_ = 0;
};

/// U P U^dagger for a Clifford gate U. Throws std::invalid_argument for
/// non-Clifford gates.
PauliString conjugate(const PauliString& p, const qsim::Gate& gate);

/// P|psi>, including the i^k phase.
qsim::StateVector apply_pauli(const qsim::StateVector& state, const PauliString& p);

}  // namespace rep::pauli
