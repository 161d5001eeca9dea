#include "gatecheck/qmath.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gatecheck::qmath {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Complex hs_coefficient(const CMatrix& basis_op, const CMatrix& target) {
  if (basis_op.rows() != basis_op.cols() || target.rows() != target.cols() ||
      basis_op.rows() != target.rows()) {
    throw std::invalid_argument(
        "hs_coefficient: operators must be square and of equal dimension");
  }
  const auto d = static_cast<double>(basis_op.rows());
  return (basis_op.adjoint() * target).trace() / d;
}

CVector haar_state(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_state: dim must be >= 1");
  CVector v(dim);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) {
      v[i] = Complex(rng.gauss(), rng.gauss());
    }
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  return v / std::sqrt(norm2);
}

CVector haar_state(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return haar_state(dim, rng);
}

bool is_unitary(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const CMatrix gram = m.adjoint() * m;
  return (gram - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace gatecheck::qmath
