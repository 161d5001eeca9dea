#include "gatecheck/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace gatecheck::analysis {

namespace {

constexpr double kPivotTol = 1e-11;

bool is_permutation(const std::vector<int>& perm, int d) {
  if (static_cast<int>(perm.size()) != d) return false;
  std::vector<bool> seen(d, false);
  for (int p : perm) {
    if (p < 0 || p >= d || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

std::vector<Cell> unique_cells(const std::vector<Cell>& cells, int rows, int cols) {
  if (cells.empty()) {
    throw std::invalid_argument("grid optimization: cell set must be nonempty");
  }
  std::set<Cell> unique(cells.begin(), cells.end());
  for (const Cell& c : unique) {
    if (c.first < 0 || c.first >= rows || c.second < 0 || c.second >= cols) {
      throw std::invalid_argument("grid optimization: cell index out of range");
    }
  }
  return {unique.begin(), unique.end()};
}

/// Exact minimization of sum(objective .* G) over nonnegative grids G with
/// the given row and column marginals. Dense two-phase tableau simplex with
/// Bland's rule; the problem has at most a few dozen variables, so the
/// tableau form is both simple and fast.
GridSolution transport_simplex(const Eigen::VectorXd& row_marginals,
                               const Eigen::VectorXd& col_marginals,
                               const Eigen::MatrixXd& objective) {
  const int R = static_cast<int>(row_marginals.size());
  const int C = static_cast<int>(col_marginals.size());
  const double row_total = row_marginals.sum();
  const double col_total = col_marginals.sum();
  if (std::abs(row_total - col_total) > 1e-6) {
    throw std::invalid_argument("grid optimization: infeasible marginals (sums differ)");
  }
  // Make the totals match exactly so phase 1 can close the balance.
  Eigen::VectorXd cols = col_marginals;
  if (col_total > 0.0) cols *= row_total / col_total;

  const int n = R * C;              // grid variables, x[i*C + j] = G(i, j)
  const int m = R + C - 1;          // the last column constraint is redundant
  Eigen::MatrixXd tableau = Eigen::MatrixXd::Zero(m, n + m + 1);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) tableau(i, i * C + j) = 1.0;
    tableau(i, n + m) = row_marginals[i];
  }
  for (int j = 0; j + 1 < C; ++j) {
    const int row = R + j;
    for (int i = 0; i < R; ++i) tableau(row, i * C + j) = 1.0;
    tableau(row, n + m) = cols[j];
  }
  for (int i = 0; i < m; ++i) tableau(i, n + i) = 1.0;  // artificials

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  std::vector<double> phase1_cost(n + m, 0.0);
  for (int j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
  std::vector<double> phase2_cost(n + m, 0.0);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) phase2_cost[i * C + j] = objective(i, j);

  const auto pivot = [&](int row, int col) {
    tableau.row(row) /= tableau(row, col);
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double factor = tableau(i, col);
      if (factor != 0.0) tableau.row(i) -= factor * tableau.row(row);
    }
    basis[row] = col;
  };

  const auto run_phase = [&](const std::vector<double>& cost, int allowed_vars) {
    while (true) {
      // Reduced costs via the current basis (Bland: first negative enters).
      int entering = -1;
      for (int j = 0; j < allowed_vars; ++j) {
        double rc = cost[j];
        for (int i = 0; i < m; ++i) rc -= cost[basis[i]] * tableau(i, j);
        if (rc < -kPivotTol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = tableau(i, entering);
        if (a > kPivotTol) {
          const double ratio = tableau(i, n + m) / a;
          const bool better = ratio < best_ratio - kPivotTol;
          const bool tie = std::abs(ratio - best_ratio) <= kPivotTol &&
                           leaving >= 0 && basis[i] < basis[leaving];
          if (leaving < 0 || better || tie) {
            best_ratio = std::min(best_ratio, ratio);
            leaving = i;
          }
        }
      }
      if (leaving < 0) {
        throw std::logic_error("transport_simplex: unbounded (marginals invalid)");
      }
      pivot(leaving, entering);
    }
  };

  run_phase(phase1_cost, n + m);
  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) infeasibility += tableau(i, n + m);
  }
  if (infeasibility > 1e-7) {
    throw std::invalid_argument("grid optimization: infeasible marginals");
  }
  // Drive remaining zero-level artificials out of the basis; a row with no
  // usable pivot is redundant and is blanked so later pivots ignore it.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tableau(i, j)) > kPivotTol) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      pivot(i, col);
    } else {
      tableau.row(i).setZero();
    }
  }
  run_phase(phase2_cost, n);

  GridSolution solution;
  solution.grid = Eigen::MatrixXd::Zero(R, C);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) {
      solution.grid(basis[i] / C, basis[i] % C) = clamp0(tableau(i, n + m));
    }
  }
  solution.mass = 0.0;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) solution.mass += objective(i, j) * solution.grid(i, j);
  return solution;
}

Eigen::MatrixXd cell_indicator(const std::vector<Cell>& cells, int rows, int cols) {
  Eigen::MatrixXd indicator = Eigen::MatrixXd::Zero(rows, cols);
  for (const Cell& c : cells) indicator(c.first, c.second) = 1.0;
  return indicator;
}

std::vector<int> checked_index_set(const std::vector<int>& set, int size,
                                   const char* what) {
  if (set.empty()) {
    throw std::invalid_argument(std::string("frechet bound: empty ") + what + " set");
  }
  std::set<int> unique(set.begin(), set.end());
  for (int v : unique) {
    if (v < 0 || v >= size) {
      throw std::invalid_argument(std::string("frechet bound: ") + what +
                                  " index out of range");
    }
  }
  return {unique.begin(), unique.end()};
}

}  // namespace

void TruthTable::validate() const {
  if (d < 1) throw std::invalid_argument("TruthTable: dimension must be positive");
  if (probs.rows() != d || probs.cols() != d) {
    throw std::invalid_argument("TruthTable: probability matrix must be d x d");
  }
  if (!is_permutation(ideal_permutation, d)) {
    throw std::invalid_argument("TruthTable: ideal_permutation is not a permutation");
  }
  for (int k = 0; k < d; ++k) {
    double row_sum = 0.0;
    for (int j = 0; j < d; ++j) {
      const double p = probs(k, j);
      if (!std::isfinite(p) || p < -1e-12) {
        throw std::invalid_argument("TruthTable: negative or non-finite entry");
      }
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > 1e-6) {
      throw std::invalid_argument("TruthTable: row " + std::to_string(k) +
                                  " does not sum to 1");
    }
  }
}

TruthTable CountTable::normalized() const {
  const int d = static_cast<int>(counts.rows());
  if (counts.cols() != d || d < 1) {
    throw std::invalid_argument("CountTable: counts must be square and nonempty");
  }
  TruthTable table;
  table.basis = basis;
  table.d = d;
  table.ideal_permutation = ideal_permutation;
  table.provenance = Provenance::Counts;
  table.probs = Eigen::MatrixXd::Zero(d, d);
  std::int64_t common_shots = -1;
  bool uniform_shots = true;
  for (int k = 0; k < d; ++k) {
    std::int64_t row_total = 0;
    for (int j = 0; j < d; ++j) {
      if (counts(k, j) < 0) {
        throw std::invalid_argument("CountTable: negative count");
      }
      row_total += counts(k, j);
    }
    if (row_total == 0) {
      throw std::invalid_argument("CountTable: row " + std::to_string(k) +
                                  " has no counts");
    }
    if (common_shots < 0) common_shots = row_total;
    uniform_shots = uniform_shots && (row_total == common_shots);
    for (int j = 0; j < d; ++j) {
      table.probs(k, j) = static_cast<double>(counts(k, j)) /
                          static_cast<double>(row_total);
    }
  }
  table.shots_per_row = uniform_shots ? common_shots : 0;
  table.validate();
  return table;
}

double ErrorBudget::at_symbol(char symbol) const {
  return at_mask(gatelib::pattern_mask(symbol));
}

void ErrorBudget::validate() const {
  if (eta.size() < 1) throw std::invalid_argument("ErrorBudget: empty");
  for (int i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i]) || eta[i] < -1e-12) {
      throw std::invalid_argument("ErrorBudget: negative entry");
    }
  }
  if (std::abs(eta.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("ErrorBudget: entries do not sum to 1");
  }
}

MarginalGrid::MarginalGrid(Eigen::VectorXd rows, Eigen::VectorXd cols)
    : row_marginals(std::move(rows)), col_marginals(std::move(cols)) {
  for (const Eigen::VectorXd* m : {&row_marginals, &col_marginals}) {
    if (m->size() < 1) throw std::invalid_argument("MarginalGrid: empty marginals");
    for (int i = 0; i < m->size(); ++i) {
      if (!std::isfinite((*m)[i]) || (*m)[i] < -1e-12) {
        throw std::invalid_argument("MarginalGrid: negative marginal");
      }
    }
    if (std::abs(m->sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("MarginalGrid: marginals must sum to 1");
    }
  }
}

double classical_fidelity(const TruthTable& table) {
  table.validate();
  double total = 0.0;
  for (int k = 0; k < table.d; ++k) {
    total += table.probs(k, table.ideal_permutation[k]);
  }
  return total / table.d;
}

ErrorBudget error_budget(const TruthTable& table) {
  table.validate();
  const int d = table.d;
  if ((d & (d - 1)) != 0) {
    throw std::invalid_argument("error_budget: dimension must be a power of two");
  }
  ErrorBudget budget;
  budget.axis = table.basis == gatelib::BasisKind::XProduct ? Axis::X : Axis::Z;
  budget.eta = Eigen::VectorXd::Zero(d);
  for (int pattern = 0; pattern < d; ++pattern) {
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
      total += table.probs(k, table.ideal_permutation[k] ^ pattern);
    }
    budget.eta[pattern] = total / d;
  }
  return budget;
}

Interval fidelity_interval(double f_z, double f_x) {
  for (double f : {f_z, f_x}) {
    if (!(f >= -1e-9 && f <= 1.0 + 1e-9)) {
      throw std::invalid_argument("fidelity_interval: fidelity outside [0, 1]");
    }
  }
  Interval interval;
  interval.lo_unclamped = f_z + f_x - 1.0;
  interval.lo = clamp0(interval.lo_unclamped);
  interval.hi = std::min(f_z, f_x);
  return interval;
}

double capability_bound(double fidelity, double b) {
  if (!(b > 0.0 && b < 1.0)) {
    throw std::invalid_argument("capability_bound: b must lie in (0, 1)");
  }
  if (!(fidelity >= -1e-9 && fidelity <= 1.0 + 1e-9)) {
    throw std::invalid_argument("capability_bound: fidelity outside [0, 1]");
  }
  return (fidelity - b) / (1.0 - b);
}

double discrimination_bound(double fidelity) {
  if (!(fidelity >= -1e-9 && fidelity <= 1.0 + 1e-9)) {
    throw std::invalid_argument("discrimination_bound: fidelity outside [0, 1]");
  }
  return 2.0 * fidelity - 1.0;
}

bool as_product_set(const std::vector<Cell>& cells, std::vector<int>& row_set,
                    std::vector<int>& col_set) {
  std::set<Cell> unique(cells.begin(), cells.end());
  std::set<int> rows, cols;
  for (const Cell& c : unique) {
    rows.insert(c.first);
    cols.insert(c.second);
  }
  if (unique.size() != rows.size() * cols.size()) return false;
  row_set.assign(rows.begin(), rows.end());
  col_set.assign(cols.begin(), cols.end());
  return true;
}

double frechet_min(const MarginalGrid& grid, const std::vector<int>& row_set,
                   const std::vector<int>& col_set) {
  double row_mass = 0.0, col_mass = 0.0;
  for (int r : checked_index_set(row_set, grid.rows(), "row"))
    row_mass += grid.row_marginals[r];
  for (int c : checked_index_set(col_set, grid.cols(), "column"))
    col_mass += grid.col_marginals[c];
  return clamp0(row_mass + col_mass - 1.0);
}

double frechet_max(const MarginalGrid& grid, const std::vector<int>& row_set,
                   const std::vector<int>& col_set) {
  double row_mass = 0.0, col_mass = 0.0;
  for (int r : checked_index_set(row_set, grid.rows(), "row"))
    row_mass += grid.row_marginals[r];
  for (int c : checked_index_set(col_set, grid.cols(), "column"))
    col_mass += grid.col_marginals[c];
  return std::min(row_mass, col_mass);
}

double grid_min_mass(const MarginalGrid& grid, const std::vector<Cell>& cells) {
  const std::vector<Cell> checked = unique_cells(cells, grid.rows(), grid.cols());
  std::vector<int> row_set, col_set;
  if (as_product_set(checked, row_set, col_set)) {
    return frechet_min(grid, row_set, col_set);
  }
  return solve_grid_min(grid, checked).mass;
}

double grid_max_mass(const MarginalGrid& grid, const std::vector<Cell>& cells) {
  const std::vector<Cell> checked = unique_cells(cells, grid.rows(), grid.cols());
  std::vector<int> row_set, col_set;
  if (as_product_set(checked, row_set, col_set)) {
    return frechet_max(grid, row_set, col_set);
  }
  return solve_grid_max(grid, checked).mass;
}

GridSolution solve_grid_min(const MarginalGrid& grid, const std::vector<Cell>& cells) {
  const std::vector<Cell> checked = unique_cells(cells, grid.rows(), grid.cols());
  return transport_simplex(grid.row_marginals, grid.col_marginals,
                           cell_indicator(checked, grid.rows(), grid.cols()));
}

GridSolution solve_grid_max(const MarginalGrid& grid, const std::vector<Cell>& cells) {
  const std::vector<Cell> checked = unique_cells(cells, grid.rows(), grid.cols());
  GridSolution solution =
      transport_simplex(grid.row_marginals, grid.col_marginals,
                        -cell_indicator(checked, grid.rows(), grid.cols()));
  solution.mass = -solution.mass;
  return solution;
}

std::vector<Cell> preserved_cells(DerivedOp op) {
  gatelib::BasisKind output_kind;
  switch (op) {
    case DerivedOp::IdentityZx: output_kind = gatelib::BasisKind::ZxEigen; break;
    case DerivedOp::Entangler: output_kind = gatelib::BasisKind::Bell; break;
    case DerivedOp::BellAnalyzer: output_kind = gatelib::BasisKind::XzEigen; break;
    default: throw std::invalid_argument("preserved_cells: unknown operation");
  }
  std::vector<Cell> cells;
  for (const gatelib::PauliLabel& label : gatelib::preserved_errors(output_kind)) {
    const gatelib::FlipPattern pattern = gatelib::flip_pattern(label);
    cells.emplace_back(static_cast<int>(pattern.z_mask),
                       static_cast<int>(pattern.x_mask));
  }
  return cells;
}

double derived_fidelity_bound(DerivedOp op, const MarginalGrid& grid) {
  return grid_min_mass(grid, preserved_cells(op));
}

FidelityReport full_report(const TruthTable& z_table, const TruthTable& x_table,
                           double b) {
  if (z_table.basis != gatelib::BasisKind::ZProduct ||
      x_table.basis != gatelib::BasisKind::XProduct) {
    throw std::invalid_argument(
        "full_report: expected a Z-product and an X-product table");
  }
  FidelityReport report;
  report.witness_b = b;
  report.f_z = classical_fidelity(z_table);
  report.f_x = classical_fidelity(x_table);
  report.eta_z = error_budget(z_table);
  report.eta_x = error_budget(x_table);

  const Interval interval = fidelity_interval(report.f_z, report.f_x);
  report.f_qp_lo = interval.lo;
  report.f_qp_lo_unclamped = interval.lo_unclamped;
  report.f_qp_hi = interval.hi;
  report.c_coarse_unclamped = capability_bound(interval.lo, b);
  report.d_coarse_unclamped = discrimination_bound(interval.lo);
  report.c_coarse = clamp0(report.c_coarse_unclamped);
  report.d_coarse = clamp0(report.d_coarse_unclamped);

  const MarginalGrid grid(report.eta_z.eta, report.eta_x.eta);
  report.f_i_min = derived_fidelity_bound(DerivedOp::IdentityZx, grid);
  report.f_c_min = derived_fidelity_bound(DerivedOp::Entangler, grid);
  report.f_d_min = derived_fidelity_bound(DerivedOp::BellAnalyzer, grid);
  report.c_refined_unclamped = capability_bound(report.f_c_min, b);
  report.d_refined_unclamped = discrimination_bound(report.f_d_min);
  report.c_refined = clamp0(report.c_refined_unclamped);
  report.d_refined = clamp0(report.d_refined_unclamped);

  report.min_fqp_grid = solve_grid_min(grid, {{0, 0}}).grid;
  return report;
}

}  // namespace gatecheck::analysis
