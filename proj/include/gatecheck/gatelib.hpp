#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gatecheck/qmath.hpp"

namespace gatecheck::gatelib {

using qmath::CMatrix;
using qmath::CVector;

/// Tensor product of single-qubit operators from {I, X, Y, Z}, written as a
/// string such as "ZX". The first letter acts on the control qubit (the
/// leading tensor factor).
class PauliLabel {
public:
  explicit PauliLabel(std::string_view letters);

  int n_qubits() const { return static_cast<int>(letters_.size()); }
  const std::string& str() const { return letters_; }
  char letter(int qubit) const { return letters_.at(qubit); }

  /// Base-4 rank with digit order I, X, Y, Z and the control letter most
  /// significant; "II" -> 0, "IX" -> 1, "XI" -> 4, ...
  int index() const;

  static PauliLabel from_index(int n_qubits, int index);
  /// All 4^N labels in index order.
  static std::vector<PauliLabel> all(int n_qubits);

  friend bool operator==(const PauliLabel& a, const PauliLabel& b) = default;
  friend auto operator<=>(const PauliLabel& a, const PauliLabel& b) = default;

private:
  std::string letters_;
};

/// Which output bits a Pauli error flips when the output is read in the Z
/// product basis (z_mask) and in the X product basis (x_mask). Bit
/// (n_qubits - 1) of a mask is the control qubit.
struct FlipPattern {
  int n_qubits = 2;
  unsigned z_mask = 0;
  unsigned x_mask = 0;

  /// Two-symbol form "j_z j_x", e.g. "TC"; defined for n_qubits == 2.
  std::string str() const;

  friend bool operator==(const FlipPattern&, const FlipPattern&) = default;
};

/// Two-qubit mask <-> symbol: 00 -> '0', 10 -> 'C', 01 -> 'T', 11 -> 'B'.
char pattern_symbol(unsigned mask);
unsigned pattern_mask(char symbol);

enum class BasisKind { ZProduct, XProduct, ZxEigen, XzEigen, Bell };

std::string basis_name(BasisKind kind);       // "Z", "X", "ZX", "XZ", "BELL"
BasisKind basis_from_name(std::string_view name);

/// A complete orthonormal set of two-qubit input states together with the
/// ideal gate's action on it: member k is mapped, up to a global phase, to
/// member perm[k] of the family `output_kind` (the family itself except for
/// the entangler XZ -> BELL and the analyzer BELL -> XZ).
struct BasisFamily {
  BasisKind kind;
  BasisKind output_kind;
  std::vector<CVector> members;
  std::vector<int> perm;
  std::vector<std::string> labels;

  int dim() const { return static_cast<int>(members.size()); }
};

CMatrix pauli(const PauliLabel& label);
CMatrix pauli(std::string_view letters);

/// Controlled-NOT on two qubits, control first.
CMatrix cnot();

BasisFamily basis_family(BasisKind kind);

/// Classifies an error operator by its observable effect: z_mask collects
/// the qubits whose letter is X or Y (bit flips in the Z basis), x_mask the
/// qubits whose letter is Z or Y (bit flips in the X basis).
FlipPattern flip_pattern(const PauliLabel& label);

/// The Pauli errors that leave every member of the given output family
/// unchanged up to a global phase. Supported kinds: ZxEigen (identity
/// operation), Bell (entangler outputs), XzEigen (analyzer outputs).
std::vector<PauliLabel> preserved_errors(BasisKind output_kind);

}  // namespace gatecheck::gatelib
