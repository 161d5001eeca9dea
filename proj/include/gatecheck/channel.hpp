#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gatecheck/analysis.hpp"
#include "gatecheck/gatelib.hpp"
#include "gatecheck/qmath.hpp"

namespace gatecheck::channel {

using qmath::CMatrix;
using qmath::Complex;
using qmath::CVector;

struct DensityMatrix {
  CMatrix rho;

  static DensityMatrix pure(const CVector& state);
  int dim() const { return static_cast<int>(rho.rows()); }

  /// Throws unless Hermitian, unit trace and positive semidefinite within
  /// tolerance 1e-10.
  void validate() const;
};

/// Noisy realization of an intended unitary: either a distribution of
/// output-error weights over the Pauli labels (a Pauli error channel, the
/// diagonal of the process matrix) or an explicit probabilistic mixture of
/// unitary operations.
class NoisyGateModel {
public:
  enum class Variant { ChiDiagonal, UnitaryMixture };

  /// Weights indexed like PauliLabel::index(); must be nonnegative and sum
  /// to 1 within 1e-9.
  static NoisyGateModel chi_diagonal(CMatrix ideal, std::vector<double> weights);
  static NoisyGateModel chi_diagonal(CMatrix ideal,
                                     const std::map<std::string, double>& weights);
  /// Pairs (p_m, A_m); probabilities sum to 1 within 1e-9 and every A_m is
  /// unitary within 1e-9.
  static NoisyGateModel unitary_mixture(CMatrix ideal,
                                        std::vector<std::pair<double, CMatrix>> ops);
  static NoisyGateModel ideal_cnot();

  Variant variant() const { return variant_; }
  const CMatrix& ideal() const { return ideal_; }
  int dim() const { return static_cast<int>(ideal_.rows()); }
  int n_qubits() const { return n_qubits_; }

  const std::vector<double>& chi_weights() const;
  const std::vector<std::pair<double, CMatrix>>& mixture() const;

  /// Output-error operator basis U_i = F_i * U_0 in label-index order.
  std::vector<CMatrix> output_error_basis() const;

private:
  NoisyGateModel() = default;

  Variant variant_ = Variant::ChiDiagonal;
  CMatrix ideal_;
  int n_qubits_ = 0;
  std::vector<double> chi_weights_;
  std::vector<std::pair<double, CMatrix>> mixture_;
};

/// Process matrix chi in the output-error basis U_i = F_i * U_0, indexed by
/// Pauli labels. Hermitian, positive semidefinite, unit diagonal sum.
class ProcessMatrix {
public:
  ProcessMatrix(Eigen::MatrixXcd chi, int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const Eigen::MatrixXcd& chi() const { return chi_; }
  Complex at(const gatelib::PauliLabel& i, const gatelib::PauliLabel& j) const;
  double diagonal(const gatelib::PauliLabel& i) const;
  /// chi_{II,II}, the process fidelity.
  double process_fidelity() const;

  double hermiticity_residual() const;
  double trace_residual() const;
  double min_eigenvalue() const;
  /// Throws unless Hermitian within 1e-10, diagonal >= -1e-10 with unit sum
  /// within 1e-9, and eigenvalues >= -1e-9.
  void validate() const;

private:
  Eigen::MatrixXcd chi_;
  int n_qubits_ = 0;
};

/// E(rho) = sum_m p_m A_m rho A_m^dagger, or the Pauli-channel analogue for
/// chi-diagonal models.
DensityMatrix apply(const NoisyGateModel& model, const DensityMatrix& rho);

ProcessMatrix process_matrix(const NoisyGateModel& model);

/// Fidelity of the channel applied to one half of a maximally entangled
/// pair against the ideal output, computed operationally on the doubled
/// space; equals the chi_{II,II} element of process_matrix.
double choi_fidelity(const NoisyGateModel& model);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Monte-Carlo average of the output fidelity over Haar-random pure inputs;
/// deterministic per seed.
McEstimate average_fidelity_mc(const NoisyGateModel& model, std::int64_t samples,
                               std::uint64_t seed);

/// Exact output probability table for the given input family, measured in
/// the family's output basis.
analysis::TruthTable truth_table(const NoisyGateModel& model,
                                 const gatelib::BasisFamily& family);

/// Multinomial counts drawn from each row of the table; deterministic per
/// seed.
analysis::CountTable sample_counts(const analysis::TruthTable& table,
                                   std::int64_t shots_per_row, std::uint64_t seed);

/// Residuals of the algebraic identities tying the simulated truth tables
/// to the process matrix: the classical fidelities as diagonal sums, the
/// unit diagonal sum, the reconstruction of the process fidelity from
/// F_Z + F_X - 1 plus the doubly-erroneous diagonal mass, and the Choi-state
/// route to chi_{II,II}.
struct IdentityResiduals {
  double f_z_vs_diagonal = 0.0;
  double f_x_vs_diagonal = 0.0;
  double diagonal_sum_rule = 0.0;
  double fidelity_reconstruction = 0.0;
  double choi_vs_chi00 = 0.0;

  double max_residual() const;
};

IdentityResiduals verify_identities(const NoisyGateModel& model);

}  // namespace gatecheck::channel
