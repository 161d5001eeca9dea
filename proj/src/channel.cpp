#include "gatecheck/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gatecheck::channel {

namespace {

int qubit_count_for_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d <<= 1;
    ++n;
  }
  if (d != dim || n < 1) {
    throw std::invalid_argument("NoisyGateModel: dimension must be 2^N, N >= 1");
  }
  return n;
}

void check_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw std::invalid_argument(std::string(what) + ": operator must be square");
  }
}

/// Maximally entangled ket sum_n |n>|n> / sqrt(d) on the doubled space.
CVector max_entangled(int d) {
  CVector e = CVector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int n = 0; n < d; ++n) e[n * d + n] = amp;
  return e;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const CVector& state) {
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("DensityMatrix::pure: state is not normalized");
  }
  return DensityMatrix{state * state.adjoint()};
}

void DensityMatrix::validate() const {
  if (rho.rows() != rho.cols() || rho.rows() < 1) {
    throw std::invalid_argument("DensityMatrix: must be square");
  }
  if (!qmath::is_hermitian(rho, 1e-10)) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 ||
      std::abs(rho.trace().imag()) > 1e-10) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }
}

NoisyGateModel NoisyGateModel::chi_diagonal(CMatrix ideal, std::vector<double> weights) {
  check_square(ideal, "NoisyGateModel");
  NoisyGateModel model;
  model.n_qubits_ = qubit_count_for_dim(ideal.rows());
  const auto expected = static_cast<std::size_t>(1) << (2 * model.n_qubits_);
  if (weights.size() != expected) {
    throw std::invalid_argument("NoisyGateModel: expected one weight per Pauli label");
  }
  double total = 0.0;
  for (double& w : weights) {
    if (!std::isfinite(w) || w < -1e-12) {
      throw std::invalid_argument("NoisyGateModel: negative chi weight");
    }
    w = std::max(w, 0.0);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("NoisyGateModel: chi weights must sum to 1");
  }
  model.variant_ = Variant::ChiDiagonal;
  model.ideal_ = std::move(ideal);
  model.chi_weights_ = std::move(weights);
  return model;
}

NoisyGateModel NoisyGateModel::chi_diagonal(
    CMatrix ideal, const std::map<std::string, double>& weights) {
  check_square(ideal, "NoisyGateModel");
  const int n = qubit_count_for_dim(ideal.rows());
  std::vector<double> by_index(static_cast<std::size_t>(1) << (2 * n), 0.0);
  for (const auto& [letters, weight] : weights) {
    const gatelib::PauliLabel label(letters);
    if (label.n_qubits() != n) {
      throw std::invalid_argument("NoisyGateModel: label \"" + letters +
                                  "\" has the wrong qubit count");
    }
    by_index[label.index()] += weight;
  }
  return chi_diagonal(std::move(ideal), std::move(by_index));
}

NoisyGateModel NoisyGateModel::unitary_mixture(
    CMatrix ideal, std::vector<std::pair<double, CMatrix>> ops) {
  check_square(ideal, "NoisyGateModel");
  if (ops.empty()) {
    throw std::invalid_argument("NoisyGateModel: mixture must be nonempty");
  }
  NoisyGateModel model;
  model.n_qubits_ = qubit_count_for_dim(ideal.rows());
  double total = 0.0;
  for (const auto& [p, op] : ops) {
    if (!std::isfinite(p) || p < -1e-12) {
      throw std::invalid_argument("NoisyGateModel: negative mixture probability");
    }
    if (op.rows() != ideal.rows() || op.cols() != ideal.cols()) {
      throw std::invalid_argument("NoisyGateModel: mixture operator dimension mismatch");
    }
    if (!qmath::is_unitary(op, 1e-9)) {
      throw std::invalid_argument("NoisyGateModel: mixture operator is not unitary");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("NoisyGateModel: mixture probabilities must sum to 1");
  }
  model.variant_ = Variant::UnitaryMixture;
  model.ideal_ = std::move(ideal);
  model.mixture_ = std::move(ops);
  return model;
}

NoisyGateModel NoisyGateModel::ideal_cnot() {
  std::vector<double> weights(16, 0.0);
  weights[0] = 1.0;
  return chi_diagonal(gatelib::cnot(), std::move(weights));
}

const std::vector<double>& NoisyGateModel::chi_weights() const {
  if (variant_ != Variant::ChiDiagonal) {
    throw std::logic_error("NoisyGateModel: not a chi-diagonal model");
  }
  return chi_weights_;
}

const std::vector<std::pair<double, CMatrix>>& NoisyGateModel::mixture() const {
  if (variant_ != Variant::UnitaryMixture) {
    throw std::logic_error("NoisyGateModel: not a unitary mixture");
  }
  return mixture_;
}

std::vector<CMatrix> NoisyGateModel::output_error_basis() const {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(1) << (2 * n_qubits_));
  for (const gatelib::PauliLabel& label : gatelib::PauliLabel::all(n_qubits_)) {
    basis.push_back(gatelib::pauli(label) * ideal_);
  }
  return basis;
}

ProcessMatrix::ProcessMatrix(Eigen::MatrixXcd chi, int n_qubits)
    : chi_(std::move(chi)), n_qubits_(n_qubits) {
  const Eigen::Index expected = Eigen::Index{1} << (2 * n_qubits_);
  if (chi_.rows() != expected || chi_.cols() != expected) {
    throw std::invalid_argument("ProcessMatrix: wrong dimension for qubit count");
  }
}

Complex ProcessMatrix::at(const gatelib::PauliLabel& i,
                          const gatelib::PauliLabel& j) const {
  return chi_(i.index(), j.index());
}

double ProcessMatrix::diagonal(const gatelib::PauliLabel& i) const {
  return chi_(i.index(), i.index()).real();
}

double ProcessMatrix::process_fidelity() const { return chi_(0, 0).real(); }

double ProcessMatrix::hermiticity_residual() const {
  return (chi_ - chi_.adjoint()).cwiseAbs().maxCoeff();
}

double ProcessMatrix::trace_residual() const {
  return std::abs(chi_.diagonal().sum().real() - 1.0) +
         std::abs(chi_.diagonal().sum().imag());
}

double ProcessMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(chi_);
  return solver.eigenvalues().minCoeff();
}

void ProcessMatrix::validate() const {
  if (hermiticity_residual() > 1e-10) {
    throw std::invalid_argument("ProcessMatrix: not Hermitian");
  }
  for (Eigen::Index i = 0; i < chi_.rows(); ++i) {
    if (chi_(i, i).real() < -1e-10) {
      throw std::invalid_argument("ProcessMatrix: negative diagonal entry");
    }
  }
  if (trace_residual() > 1e-9) {
    throw std::invalid_argument("ProcessMatrix: diagonal does not sum to 1");
  }
  if (min_eigenvalue() < -1e-9) {
    throw std::invalid_argument("ProcessMatrix: not positive semidefinite");
  }
}

DensityMatrix apply(const NoisyGateModel& model, const DensityMatrix& rho) {
  if (rho.dim() != model.dim()) {
    throw std::invalid_argument("apply: state and model dimensions differ");
  }
  CMatrix out = CMatrix::Zero(model.dim(), model.dim());
  if (model.variant() == NoisyGateModel::Variant::ChiDiagonal) {
    const std::vector<CMatrix> basis = model.output_error_basis();
    const std::vector<double>& weights = model.chi_weights();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      out += weights[i] * (basis[i] * rho.rho * basis[i].adjoint());
    }
  } else {
    for (const auto& [p, op] : model.mixture()) {
      if (p == 0.0) continue;
      out += p * (op * rho.rho * op.adjoint());
    }
  }
  return DensityMatrix{std::move(out)};
}

ProcessMatrix process_matrix(const NoisyGateModel& model) {
  const Eigen::Index d2 = Eigen::Index{1} << (2 * model.n_qubits());
  Eigen::MatrixXcd chi = Eigen::MatrixXcd::Zero(d2, d2);
  if (model.variant() == NoisyGateModel::Variant::ChiDiagonal) {
    const std::vector<double>& weights = model.chi_weights();
    for (Eigen::Index i = 0; i < d2; ++i) chi(i, i) = weights[i];
  } else {
    const std::vector<CMatrix> basis = model.output_error_basis();
    Eigen::VectorXcd coeffs(d2);
    for (const auto& [p, op] : model.mixture()) {
      for (Eigen::Index i = 0; i < d2; ++i) {
        coeffs[i] = qmath::hs_coefficient(basis[i], op);
      }
      chi += p * (coeffs * coeffs.adjoint());
    }
  }
  return ProcessMatrix(std::move(chi), model.n_qubits());
}

double choi_fidelity(const NoisyGateModel& model) {
  const int d = model.dim();
  const CVector entangled = max_entangled(d);
  const CMatrix identity = CMatrix::Identity(d, d);
  const CMatrix rho_in = entangled * entangled.adjoint();

  // Apply the channel to subsystem A of the doubled space.
  CMatrix rho_out = CMatrix::Zero(d * d, d * d);
  if (model.variant() == NoisyGateModel::Variant::ChiDiagonal) {
    const std::vector<CMatrix> basis = model.output_error_basis();
    const std::vector<double>& weights = model.chi_weights();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const CMatrix lifted = qmath::tensor(basis[i], identity);
      rho_out += weights[i] * (lifted * rho_in * lifted.adjoint());
    }
  } else {
    for (const auto& [p, op] : model.mixture()) {
      if (p == 0.0) continue;
      const CMatrix lifted = qmath::tensor(op, identity);
      rho_out += p * (lifted * rho_in * lifted.adjoint());
    }
  }

  const CVector ideal_out = qmath::tensor(model.ideal(), identity) * entangled;
  return std::real(Complex(ideal_out.adjoint() * rho_out * ideal_out));
}

McEstimate average_fidelity_mc(const NoisyGateModel& model, std::int64_t samples,
                               std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("average_fidelity_mc: samples must be >= 1");
  }
  const int d = model.dim();

  // Per-sample fidelity as a sum of amplitude overlaps; collect the
  // operators and weights once.
  std::vector<double> weights;
  std::vector<CMatrix> ops;
  if (model.variant() == NoisyGateModel::Variant::ChiDiagonal) {
    const std::vector<CMatrix> basis = model.output_error_basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (model.chi_weights()[i] == 0.0) continue;
      weights.push_back(model.chi_weights()[i]);
      ops.push_back(basis[i]);
    }
  } else {
    for (const auto& [p, op] : model.mixture()) {
      if (p == 0.0) continue;
      weights.push_back(p);
      ops.push_back(op);
    }
  }

  qmath::Rng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const CVector psi = qmath::haar_state(d, rng);
    const CVector ideal_out = model.ideal() * psi;
    double fidelity = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      fidelity += weights[i] * std::norm(Complex(ideal_out.adjoint() * (ops[i] * psi)));
    }
    sum += fidelity;
    sum_sq += fidelity * fidelity;
  }

  McEstimate estimate;
  estimate.samples = samples;
  estimate.mean = sum / static_cast<double>(samples);
  if (samples > 1) {
    const double n = static_cast<double>(samples);
    const double variance =
        std::max(0.0, (sum_sq - n * estimate.mean * estimate.mean) / (n - 1.0));
    estimate.std_error = std::sqrt(variance / n);
  }
  return estimate;
}

analysis::TruthTable truth_table(const NoisyGateModel& model,
                                 const gatelib::BasisFamily& family) {
  if (family.dim() < 1 || family.members.front().size() != model.dim()) {
    throw std::invalid_argument("truth_table: family and model dimensions differ");
  }
  const gatelib::BasisFamily output =
      family.output_kind == family.kind ? family
                                        : gatelib::basis_family(family.output_kind);
  const int d = family.dim();
  analysis::TruthTable table;
  table.basis = family.kind;
  table.d = d;
  table.ideal_permutation = family.perm;
  table.provenance = analysis::Provenance::Exact;
  table.probs = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const DensityMatrix rho_out = apply(model, DensityMatrix::pure(family.members[k]));
    for (int j = 0; j < d; ++j) {
      const CVector& out = output.members[j];
      table.probs(k, j) =
          std::max(0.0, std::real(Complex(out.adjoint() * rho_out.rho * out)));
    }
    const double row_sum = table.probs.row(k).sum();
    if (row_sum > 0.0) table.probs.row(k) /= row_sum;
  }
  table.validate();
  return table;
}

analysis::CountTable sample_counts(const analysis::TruthTable& table,
                                   std::int64_t shots_per_row, std::uint64_t seed) {
  if (shots_per_row < 1) {
    throw std::invalid_argument("sample_counts: shots_per_row must be >= 1");
  }
  table.validate();
  const int d = table.d;
  analysis::CountTable counts;
  counts.basis = table.basis;
  counts.ideal_permutation = table.ideal_permutation;
  counts.counts.setZero(d, d);
  qmath::Rng rng(seed);
  for (int k = 0; k < d; ++k) {
    for (std::int64_t shot = 0; shot < shots_per_row; ++shot) {
      const double u = rng.uniform01();
      double cumulative = 0.0;
      int outcome = d - 1;
      for (int j = 0; j < d; ++j) {
        cumulative += table.probs(k, j);
        if (u < cumulative) {
          outcome = j;
          break;
        }
      }
      ++counts.counts(k, outcome);
    }
  }
  return counts;
}

double IdentityResiduals::max_residual() const {
  return std::max({f_z_vs_diagonal, f_x_vs_diagonal, diagonal_sum_rule,
                   fidelity_reconstruction, choi_vs_chi00});
}

IdentityResiduals verify_identities(const NoisyGateModel& model) {
  const ProcessMatrix chi = process_matrix(model);
  const int n = model.n_qubits();

  const analysis::TruthTable z_table =
      truth_table(model, gatelib::basis_family(gatelib::BasisKind::ZProduct));
  const analysis::TruthTable x_table =
      truth_table(model, gatelib::basis_family(gatelib::BasisKind::XProduct));
  const double f_z_table = analysis::classical_fidelity(z_table);
  const double f_x_table = analysis::classical_fidelity(x_table);

  // Diagonal sums per flip pattern.
  double f_z_diag = 0.0;
  double f_x_diag = 0.0;
  double both_error_mass = 0.0;
  for (const gatelib::PauliLabel& label : gatelib::PauliLabel::all(n)) {
    const gatelib::FlipPattern pattern = gatelib::flip_pattern(label);
    const double value = chi.diagonal(label);
    if (pattern.z_mask == 0) f_z_diag += value;
    if (pattern.x_mask == 0) f_x_diag += value;
    if (pattern.z_mask != 0 && pattern.x_mask != 0) both_error_mass += value;
  }
  const double chi00 = chi.process_fidelity();

  IdentityResiduals residuals;
  residuals.f_z_vs_diagonal = std::abs(f_z_table - f_z_diag);
  residuals.f_x_vs_diagonal = std::abs(f_x_table - f_x_diag);
  residuals.diagonal_sum_rule =
      std::abs(chi00 - (1.0 - (f_z_diag - chi00) - (f_x_diag - chi00) - both_error_mass));
  residuals.fidelity_reconstruction =
      std::abs(chi00 - (f_z_table + f_x_table - 1.0 + both_error_mass));
  residuals.choi_vs_chi00 = std::abs(choi_fidelity(model) - chi00);
  return residuals;
}

}  // namespace gatecheck::channel
