#pragma once

// Shared helpers for the test and acceptance binaries: deterministic random
// models, unitaries and marginals built on the library's pinned Rng.

#include <cmath>
#include <utility>
#include <vector>

#include "gatecheck/analysis.hpp"
#include "gatecheck/channel.hpp"
#include "gatecheck/gatelib.hpp"
#include "gatecheck/qmath.hpp"

namespace testsupport {

using gatecheck::qmath::CMatrix;
using gatecheck::qmath::Complex;
using gatecheck::qmath::CVector;
using gatecheck::qmath::Rng;

/// Random unitary via modified Gram-Schmidt on a complex Gaussian matrix.
inline CMatrix random_unitary(Rng& rng, int d) {
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.gauss(), rng.gauss());
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) {
      g.col(j) -= (g.col(k).adjoint() * g.col(j))(0, 0) * g.col(k);
    }
    g.col(j) /= g.col(j).norm();
  }
  return g;
}

/// Coherent error: (cos t * I + i sin t * P) * U0 for a random Pauli P.
inline CMatrix coherent_error_unitary(Rng& rng, const CMatrix& ideal) {
  const int label_index = 1 + static_cast<int>(rng.uniform01() * 15.0) % 15;
  const CMatrix pauli =
      gatecheck::gatelib::pauli(gatecheck::gatelib::PauliLabel::from_index(2, label_index));
  const double t = rng.uniform01() * 3.0;
  return (std::cos(t) * CMatrix::Identity(4, 4) +
          Complex(0, 1) * std::sin(t) * pauli) *
         ideal;
}

/// Random Pauli error channel on the CNOT; roughly half the mass stays on
/// the identity so fidelities vary over the whole range.
inline gatecheck::channel::NoisyGateModel random_chi_diagonal(Rng& rng) {
  std::vector<double> weights(16, 0.0);
  const bool sparse = rng.uniform01() < 0.3;
  double total = 0.0;
  for (int i = 0; i < 16; ++i) {
    if (sparse && i > 0 && rng.uniform01() < 0.6) continue;
    weights[i] = -std::log(1.0 - rng.uniform01());
    if (i == 0) weights[i] *= 1.0 + 8.0 * rng.uniform01();
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return gatecheck::channel::NoisyGateModel::chi_diagonal(gatecheck::gatelib::cnot(),
                                                          std::move(weights));
}

/// Random mixture of unitaries around the CNOT: the ideal gate, coherent
/// Pauli rotations of it, and fully Haar-random intruders.
inline gatecheck::channel::NoisyGateModel random_unitary_mixture(Rng& rng,
                                                                 int components) {
  const CMatrix ideal = gatecheck::gatelib::cnot();
  std::vector<std::pair<double, CMatrix>> ops;
  double total = 0.0;
  for (int m = 0; m < components; ++m) {
    const double p = 0.05 + rng.uniform01();
    const double pick = rng.uniform01();
    CMatrix op;
    if (pick < 0.4) {
      op = ideal;
    } else if (pick < 0.8) {
      op = coherent_error_unitary(rng, ideal);
    } else {
      op = random_unitary(rng, 4);
    }
    ops.emplace_back(p, std::move(op));
    total += p;
  }
  for (auto& [p, op] : ops) p /= total;
  return gatecheck::channel::NoisyGateModel::unitary_mixture(ideal, std::move(ops));
}

/// Random nonnegative vector of size n summing to 1; sometimes contains
/// exact zeros to exercise degenerate marginals.
inline Eigen::VectorXd random_marginals(Rng& rng, int n) {
  Eigen::VectorXd m(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    m[i] = rng.uniform01() < 0.15 ? 0.0 : -std::log(1.0 - rng.uniform01());
    total += m[i];
  }
  if (total == 0.0) {
    m[0] = 1.0;
    total = 1.0;
  }
  return m / total;
}

/// Random nonempty subset of {0..n-1}.
inline std::vector<int> random_index_set(Rng& rng, int n) {
  std::vector<int> set;
  while (set.empty()) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform01() < 0.5) set.push_back(i);
    }
  }
  return set;
}

/// Classical fidelity of the model on the given input family, simulated
/// directly; the reference value the grid bounds must stay below.
inline double simulated_operation_fidelity(const gatecheck::channel::NoisyGateModel& model,
                                           gatecheck::gatelib::BasisKind kind) {
  const auto family = gatecheck::gatelib::basis_family(kind);
  return gatecheck::analysis::classical_fidelity(
      gatecheck::channel::truth_table(model, family));
}

}  // namespace testsupport
