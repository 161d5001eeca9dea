#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gatecheck::qmath {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Deterministic random stream. The mapping from raw engine output to
/// doubles is pinned here instead of relying on std::*_distribution, so a
/// given seed produces the same stream on every platform and toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01();

  /// Standard normal deviate (Box-Muller).
  double gauss();

private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Kronecker product; the first factor is the leading (most significant)
/// subsystem, so tensor(A, B) acts with A on the control qubit.
CMatrix tensor(const CMatrix& a, const CMatrix& b);

/// Coefficient of `basis_op` in the expansion of `target` over an orthogonal
/// unitary operator basis: Tr(basis_op^dagger * target) / d.
/// Throws std::invalid_argument unless both are square with equal dimension.
Complex hs_coefficient(const CMatrix& basis_op, const CMatrix& target);

/// Unit vector drawn from the unitarily invariant (Haar) distribution on
/// pure states, deterministic per seed.
CVector haar_state(int dim, std::uint64_t seed);
CVector haar_state(int dim, Rng& rng);

bool is_unitary(const CMatrix& m, double tol);
bool is_hermitian(const CMatrix& m, double tol);

}  // namespace gatecheck::qmath
