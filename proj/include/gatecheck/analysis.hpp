#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gatecheck/gatelib.hpp"

namespace gatecheck::analysis {

enum class Provenance { Exact, Counts };

/// Row-stochastic table of output probabilities per input state. Row k is
/// the input (member k of the basis family), column j the output (member j
/// of the family's output basis); the correct output of row k is column
/// ideal_permutation[k].
struct TruthTable {
  gatelib::BasisKind basis = gatelib::BasisKind::ZProduct;
  int d = 0;
  Eigen::MatrixXd probs;
  std::vector<int> ideal_permutation;
  Provenance provenance = Provenance::Exact;
  std::int64_t shots_per_row = 0;  // meaningful for Provenance::Counts

  /// Throws std::invalid_argument on negative entries, malformed shape or
  /// rows not summing to 1 within 1e-6.
  void validate() const;
};

/// Raw multinomial counts; `normalized()` yields the corresponding
/// probability table with Provenance::Counts.
struct CountTable {
  gatelib::BasisKind basis = gatelib::BasisKind::ZProduct;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::vector<int> ideal_permutation;

  TruthTable normalized() const;
};

enum class Axis { Z, X };

/// Distribution of output flip patterns observed in one basis, indexed by
/// the pattern bit mask (for two qubits: 0 = '0', 1 = 'T', 2 = 'C',
/// 3 = 'B').
struct ErrorBudget {
  Axis axis = Axis::Z;
  Eigen::VectorXd eta;

  double at_mask(unsigned mask) const { return eta[static_cast<int>(mask)]; }
  double at_symbol(char symbol) const;

  void validate() const;
};

/// Row and column marginals of the diagonal error grid: rows are Z flip
/// patterns, columns X flip patterns, entries the (unknown) joint error
/// probabilities. Both marginals must be nonnegative and sum to 1.
struct MarginalGrid {
  Eigen::VectorXd row_marginals;
  Eigen::VectorXd col_marginals;

  MarginalGrid(Eigen::VectorXd rows, Eigen::VectorXd cols);

  int rows() const { return static_cast<int>(row_marginals.size()); }
  int cols() const { return static_cast<int>(col_marginals.size()); }
};

struct Interval {
  double lo = 0.0;           // clamped at zero
  double lo_unclamped = 0.0;
  double hi = 1.0;
};

/// A cell of the error grid: (z flip-pattern mask, x flip-pattern mask).
using Cell = std::pair<int, int>;

/// Optimal cell-set mass together with a grid attaining it.
struct GridSolution {
  double mass = 0.0;
  Eigen::MatrixXd grid;
};

/// Mean probability of the correct output: (1/d) sum_k probs[k][perm(k)].
double classical_fidelity(const TruthTable& table);

/// Flip-pattern distribution: eta(p) = (1/d) sum_k probs[k][perm(k) xor p].
ErrorBudget error_budget(const TruthTable& table);

/// Process-fidelity interval implied by the two classical fidelities:
/// max(0, F_Z + F_X - 1) <= F_qp <= min(F_Z, F_X).
Interval fidelity_interval(double f_z, double f_x);

/// Entanglement-capability lower bound (F - b) / (1 - b) from a fidelity F
/// against an entanglement witness with separable-state ceiling b in (0,1).
double capability_bound(double fidelity, double b);

/// Entanglement-discrimination lower bound 2F - 1.
double discrimination_bound(double fidelity);

/// Exact minimum (maximum) of the summed mass over `cells`, over all
/// nonnegative grids with the given marginals. Product cell sets R x C use
/// the closed form max(0, sum_R row + sum_C col - 1) (min) respectively
/// min(sum_R row, sum_C col) (max); other sets are solved exactly by the
/// transportation simplex.
double grid_min_mass(const MarginalGrid& grid, const std::vector<Cell>& cells);
double grid_max_mass(const MarginalGrid& grid, const std::vector<Cell>& cells);

/// Same optima, always solved by the simplex, returning a witness grid that
/// attains the bound and satisfies the marginals.
GridSolution solve_grid_min(const MarginalGrid& grid, const std::vector<Cell>& cells);
GridSolution solve_grid_max(const MarginalGrid& grid, const std::vector<Cell>& cells);

/// Closed-form Fréchet bounds for a product cell set rows(R) x cols(C).
double frechet_min(const MarginalGrid& grid, const std::vector<int>& row_set,
                   const std::vector<int>& col_set);
double frechet_max(const MarginalGrid& grid, const std::vector<int>& row_set,
                   const std::vector<int>& col_set);

/// If `cells` is exactly a product set R x C, returns {R, C}.
bool as_product_set(const std::vector<Cell>& cells, std::vector<int>& row_set,
                    std::vector<int>& col_set);

enum class DerivedOp { IdentityZx, Entangler, BellAnalyzer };

/// Grid cells of the errors that preserve the operation's output family,
/// obtained from the preserved Pauli sets via their flip patterns.
std::vector<Cell> preserved_cells(DerivedOp op);

/// Worst-case classical fidelity of the derived operation consistent with
/// the observed marginals.
double derived_fidelity_bound(DerivedOp op, const MarginalGrid& grid);

struct FidelityReport {
  double f_z = 0.0;
  double f_x = 0.0;
  double f_qp_lo = 0.0;
  double f_qp_lo_unclamped = 0.0;
  double f_qp_hi = 0.0;
  double c_coarse = 0.0;
  double c_coarse_unclamped = 0.0;
  double d_coarse = 0.0;
  double d_coarse_unclamped = 0.0;
  double f_i_min = 0.0;
  double f_c_min = 0.0;
  double f_d_min = 0.0;
  double c_refined = 0.0;
  double c_refined_unclamped = 0.0;
  double d_refined = 0.0;
  double d_refined_unclamped = 0.0;
  double witness_b = 0.5;
  ErrorBudget eta_z;
  ErrorBudget eta_x;
  /// Diagonal error distribution attaining the minimal process fidelity.
  Eigen::MatrixXd min_fqp_grid;
};

/// Full analysis of a Z-basis and an X-basis truth table: classical
/// fidelities, process-fidelity interval, coarse and refined capability and
/// discrimination bounds. Throws if the tables are not Z/X product tables.
FidelityReport full_report(const TruthTable& z_table, const TruthTable& x_table,
                           double b = 0.5);

}  // namespace gatecheck::analysis
