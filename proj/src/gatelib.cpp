#include "gatecheck/gatelib.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace gatecheck::gatelib {

namespace {

constexpr std::string_view kLetters = "IXYZ";

int letter_rank(char c) {
  switch (c) {
    case 'I': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: return -1;
  }
}

const CMatrix& single_qubit_pauli(char letter) {
  using qmath::Complex;
  static const std::array<CMatrix, 4> ops = [] {
    std::array<CMatrix, 4> a;
    a[0] = CMatrix::Identity(2, 2);
    a[1] = CMatrix{{Complex(0, 0), Complex(1, 0)}, {Complex(1, 0), Complex(0, 0)}};
    a[2] = CMatrix{{Complex(0, 0), Complex(0, -1)}, {Complex(0, 1), Complex(0, 0)}};
    a[3] = CMatrix{{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(-1, 0)}};
    return a;
  }();
  return ops[letter_rank(letter)];
}

CVector ket(std::initializer_list<qmath::Complex> amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (const auto& a : amps) v[i++] = a;
  return v;
}

// Single-qubit basis states.
CVector z0() { return ket({1, 0}); }
CVector z1() { return ket({0, 1}); }
CVector x0() { return ket({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}); }
CVector x1() { return ket({1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}); }

CVector pair_state(const CVector& control, const CVector& target) {
  CVector v(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) v[a * 2 + b] = control[a] * target[b];
  return v;
}

}  // namespace

PauliLabel::PauliLabel(std::string_view letters) : letters_(letters) {
  if (letters_.empty()) throw std::invalid_argument("PauliLabel: empty label");
  for (char c : letters_) {
    if (letter_rank(c) < 0) {
      throw std::invalid_argument("PauliLabel: invalid letter '" +
                                  std::string(1, c) + "' in \"" + letters_ + "\"");
    }
  }
}

int PauliLabel::index() const {
  int idx = 0;
  for (char c : letters_) idx = idx * 4 + letter_rank(c);
  return idx;
}

PauliLabel PauliLabel::from_index(int n_qubits, int index) {
  if (n_qubits < 1 || index < 0 || index >= (1 << (2 * n_qubits))) {
    throw std::invalid_argument("PauliLabel::from_index: out of range");
  }
  std::string letters(n_qubits, 'I');
  for (int q = n_qubits - 1; q >= 0; --q) {
    letters[q] = kLetters[index % 4];
    index /= 4;
  }
  return PauliLabel(letters);
}

std::vector<PauliLabel> PauliLabel::all(int n_qubits) {
  std::vector<PauliLabel> labels;
  const int count = 1 << (2 * n_qubits);
  labels.reserve(count);
  for (int i = 0; i < count; ++i) labels.push_back(from_index(n_qubits, i));
  return labels;
}

std::string FlipPattern::str() const {
  if (n_qubits != 2) {
    throw std::logic_error("FlipPattern::str: symbols are defined for two qubits");
  }
  return std::string{pattern_symbol(z_mask), pattern_symbol(x_mask)};
}

char pattern_symbol(unsigned mask) {
  switch (mask) {
    case 0b00: return '0';
    case 0b10: return 'C';
    case 0b01: return 'T';
    case 0b11: return 'B';
    default: throw std::invalid_argument("pattern_symbol: mask out of range");
  }
}

unsigned pattern_mask(char symbol) {
  switch (symbol) {
    case '0': return 0b00;
    case 'C': return 0b10;
    case 'T': return 0b01;
    case 'B': return 0b11;
    default:
      throw std::invalid_argument("pattern_mask: unknown symbol '" +
                                  std::string(1, symbol) + "'");
  }
}

std::string basis_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::ZProduct: return "Z";
    case BasisKind::XProduct: return "X";
    case BasisKind::ZxEigen: return "ZX";
    case BasisKind::XzEigen: return "XZ";
    case BasisKind::Bell: return "BELL";
  }
  throw std::logic_error("basis_name: unreachable");
}

BasisKind basis_from_name(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "Z") return BasisKind::ZProduct;
  if (upper == "X") return BasisKind::XProduct;
  if (upper == "ZX") return BasisKind::ZxEigen;
  if (upper == "XZ") return BasisKind::XzEigen;
  if (upper == "BELL") return BasisKind::Bell;
  throw std::invalid_argument("basis_from_name: unknown basis \"" + std::string(name) + "\"");
}

CMatrix pauli(const PauliLabel& label) {
  CMatrix op = single_qubit_pauli(label.letter(0));
  for (int q = 1; q < label.n_qubits(); ++q) {
    op = qmath::tensor(op, single_qubit_pauli(label.letter(q)));
  }
  return op;
}

CMatrix pauli(std::string_view letters) { return pauli(PauliLabel(letters)); }

CMatrix cnot() {
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 0) = 1;
  u(1, 1) = 1;
  u(2, 3) = 1;
  u(3, 2) = 1;
  return u;
}

BasisFamily basis_family(BasisKind kind) {
  BasisFamily family;
  family.kind = kind;
  family.output_kind = kind;
  switch (kind) {
    case BasisKind::ZProduct:
      family.members = {pair_state(z0(), z0()), pair_state(z0(), z1()),
                        pair_state(z1(), z0()), pair_state(z1(), z1())};
      family.perm = {0, 1, 3, 2};
      family.labels = {"0z0z", "0z1z", "1z0z", "1z1z"};
      break;
    case BasisKind::XProduct:
      // In the X basis the gate acts as a reversed controlled-NOT: the
      // target value flips the control.
      family.members = {pair_state(x0(), x0()), pair_state(x0(), x1()),
                        pair_state(x1(), x0()), pair_state(x1(), x1())};
      family.perm = {0, 3, 2, 1};
      family.labels = {"0x0x", "0x1x", "1x0x", "1x1x"};
      break;
    case BasisKind::ZxEigen:
      // Eigenstates of the gate; the induced permutation is the identity.
      family.members = {pair_state(z0(), x0()), pair_state(z0(), x1()),
                        pair_state(z1(), x0()), pair_state(z1(), x1())};
      family.perm = {0, 1, 2, 3};
      family.labels = {"0z0x", "0z1x", "1z0x", "1z1x"};
      break;
    case BasisKind::XzEigen:
      // Entangler inputs: member k is mapped to Bell member k.
      family.members = {pair_state(x0(), z0()), pair_state(x0(), z1()),
                        pair_state(x1(), z0()), pair_state(x1(), z1())};
      family.perm = {0, 1, 2, 3};
      family.labels = {"0x0z", "0x1z", "1x0z", "1x1z"};
      family.output_kind = BasisKind::Bell;
      break;
    case BasisKind::Bell: {
      // Ordered so that the analyzer (the gate on Bell inputs) maps member k
      // to XZ member k.
      const double s = 1.0 / std::sqrt(2.0);
      family.members = {ket({s, 0, 0, s}), ket({0, s, s, 0}),
                        ket({s, 0, 0, -s}), ket({0, s, -s, 0})};
      family.perm = {0, 1, 2, 3};
      family.labels = {"phi+", "psi+", "phi-", "psi-"};
      family.output_kind = BasisKind::XzEigen;
      break;
    }
  }
  return family;
}

FlipPattern flip_pattern(const PauliLabel& label) {
  FlipPattern p;
  p.n_qubits = label.n_qubits();
  for (int q = 0; q < p.n_qubits; ++q) {
    const unsigned bit = 1u << (p.n_qubits - 1 - q);
    const char c = label.letter(q);
    if (c == 'X' || c == 'Y') p.z_mask |= bit;
    if (c == 'Z' || c == 'Y') p.x_mask |= bit;
  }
  return p;
}

std::vector<PauliLabel> preserved_errors(BasisKind output_kind) {
  if (output_kind != BasisKind::ZxEigen && output_kind != BasisKind::Bell &&
      output_kind != BasisKind::XzEigen) {
    throw std::invalid_argument(
        "preserved_errors: supported kinds are ZX, BELL and XZ");
  }
  const BasisFamily family = basis_family(output_kind);
  std::vector<PauliLabel> preserved;
  for (const PauliLabel& label : PauliLabel::all(2)) {
    const CMatrix op = pauli(label);
    bool keeps_all = true;
    for (const CVector& m : family.members) {
      const double overlap = std::abs(qmath::Complex(m.adjoint() * op * m));
      if (std::abs(overlap - 1.0) > 1e-12) {
        keeps_all = false;
        break;
      }
    }
    if (keeps_all) preserved.push_back(label);
  }
  return preserved;
}

}  // namespace gatecheck::gatelib
