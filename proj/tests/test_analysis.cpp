#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "gatecheck/analysis.hpp"
#include "gatecheck/channel.hpp"
#include "gatecheck/iofmt.hpp"
#include "support.hpp"

using namespace gatecheck;
using analysis::Cell;
using analysis::MarginalGrid;
using gatelib::BasisKind;

namespace {

analysis::TruthTable ideal_z_table() {
  return channel::truth_table(channel::NoisyGateModel::ideal_cnot(),
                              gatelib::basis_family(BasisKind::ZProduct));
}

/// Marginals as published alongside the bundled tables, indexed by pattern
/// mask (0, T, C, B).
MarginalGrid published_budget_grid() {
  Eigen::VectorXd eta_z(4), eta_x(4);
  eta_z << 0.853, 0.051, 0.052, 0.044;
  eta_x << 0.867, 0.034, 0.071, 0.028;
  return MarginalGrid(eta_z, eta_x);
}

/// Independent oracle: the optimum of a transportation LP is attained at a
/// vertex, and the vertices are exactly the spanning-tree basic solutions.
/// Enumerates every spanning tree of the bipartite row/column graph, solves
/// it by leaf elimination and keeps the best feasible objective.
double vertex_enumeration_optimum(const Eigen::VectorXd& rows,
                                  const Eigen::VectorXd& cols,
                                  const std::vector<Cell>& cells, bool maximize) {
  const int R = static_cast<int>(rows.size());
  const int C = static_cast<int>(cols.size());
  const int nodes = R + C;
  const int edges = R * C;
  const int tree_size = nodes - 1;

  Eigen::MatrixXd objective = Eigen::MatrixXd::Zero(R, C);
  for (const Cell& c : cells) objective(c.first, c.second) = 1.0;

  std::vector<int> find_parent(nodes);
  const auto find_root = [&](int v) {
    while (find_parent[v] != v) v = find_parent[v] = find_parent[find_parent[v]];
    return v;
  };

  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();

  std::vector<int> combo(tree_size);
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    // Spanning-tree check: tree_size edges joining distinct components.
    std::iota(find_parent.begin(), find_parent.end(), 0);
    bool acyclic = true;
    for (int e : combo) {
      const int u = e / C;
      const int v = R + e % C;
      const int ru = find_root(u), rv = find_root(v);
      if (ru == rv) {
        acyclic = false;
        break;
      }
      find_parent[ru] = rv;
    }
    if (acyclic) {
      // Leaf elimination on the tree.
      std::vector<double> remaining(nodes);
      for (int i = 0; i < R; ++i) remaining[i] = rows[i];
      for (int j = 0; j < C; ++j) remaining[R + j] = cols[j];
      std::vector<int> degree(nodes, 0);
      std::vector<bool> used(tree_size, false);
      for (int e : combo) {
        ++degree[e / C];
        ++degree[R + e % C];
      }
      double value = 0.0;
      bool feasible = true;
      for (int step = 0; step < tree_size; ++step) {
        int leaf = -1, edge_pos = -1;
        for (int v = 0; v < nodes && leaf < 0; ++v) {
          if (degree[v] != 1) continue;
          for (int p = 0; p < tree_size; ++p) {
            if (used[p]) continue;
            const int e = combo[p];
            if (e / C == v || R + e % C == v) {
              leaf = v;
              edge_pos = p;
              break;
            }
          }
        }
        REQUIRE(leaf >= 0);
        const int e = combo[edge_pos];
        const int i = e / C, j = e % C;
        const double mass = remaining[leaf];
        if (mass < -1e-9) {
          feasible = false;
          break;
        }
        value += objective(i, j) * mass;
        const int other = (leaf == i) ? R + j : i;
        remaining[other] -= mass;
        remaining[leaf] = 0.0;
        used[edge_pos] = true;
        --degree[leaf];
        --degree[other];
      }
      if (feasible) best = maximize ? std::max(best, value) : std::min(best, value);
    }
    // Next combination of tree_size edges out of `edges`.
    int pos = tree_size - 1;
    while (pos >= 0 && combo[pos] == edges - tree_size + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (int p = pos + 1; p < tree_size; ++p) combo[p] = combo[p - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("classical fidelity of the bundled tables") {
  CHECK(std::abs(analysis::classical_fidelity(iofmt::fixture_z_table()) - 0.853) < 5e-4);
  CHECK(std::abs(analysis::classical_fidelity(iofmt::fixture_x_table()) - 0.867) < 5e-4);
  CHECK(analysis::classical_fidelity(ideal_z_table()) == doctest::Approx(1.0));
}

TEST_CASE("error budget of the bundled tables matches the published averages") {
  const analysis::ErrorBudget eta_z = analysis::error_budget(iofmt::fixture_z_table());
  const analysis::ErrorBudget eta_x = analysis::error_budget(iofmt::fixture_x_table());
  CHECK(std::abs(eta_z.at_symbol('C') - 0.052) < 5e-4);
  CHECK(std::abs(eta_z.at_symbol('T') - 0.051) < 5e-4);
  CHECK(std::abs(eta_z.at_symbol('B') - 0.044) < 5e-4);
  CHECK(std::abs(eta_x.at_symbol('C') - 0.071) < 5e-4);
  CHECK(std::abs(eta_x.at_symbol('T') - 0.034) < 5e-4);
  CHECK(std::abs(eta_x.at_symbol('B') - 0.028) < 5e-4);
  eta_z.validate();
  eta_x.validate();
}

TEST_CASE("error budget of an ideal table is concentrated on no-error") {
  const analysis::ErrorBudget eta = analysis::error_budget(ideal_z_table());
  CHECK(eta.at_symbol('0') == doctest::Approx(1.0));
  CHECK(eta.at_symbol('C') == doctest::Approx(0.0));
  CHECK(eta.at_symbol('T') == doctest::Approx(0.0));
  CHECK(eta.at_symbol('B') == doctest::Approx(0.0));
}

TEST_CASE("eta(0) equals the classical fidelity exactly") {
  for (const auto& table : {iofmt::fixture_z_table(), iofmt::fixture_x_table()}) {
    CHECK(analysis::error_budget(table).at_symbol('0') ==
          analysis::classical_fidelity(table));
  }
}

TEST_CASE("fidelity interval") {
  const auto interval = analysis::fidelity_interval(0.853, 0.867);
  CHECK(interval.lo == doctest::Approx(0.720).epsilon(1e-9));
  CHECK(interval.hi == doctest::Approx(0.853));

  const auto perfect = analysis::fidelity_interval(1.0, 1.0);
  CHECK(perfect.lo == 1.0);
  CHECK(perfect.hi == 1.0);

  const auto depolarized = analysis::fidelity_interval(0.25, 0.25);
  CHECK(depolarized.lo == 0.0);
  CHECK(depolarized.lo_unclamped == doctest::Approx(-0.5));
  CHECK(depolarized.hi == doctest::Approx(0.25));

  CHECK_THROWS_AS(analysis::fidelity_interval(1.5, 0.5), std::invalid_argument);
}

TEST_CASE("capability and discrimination bounds") {
  CHECK(analysis::capability_bound(0.720, 0.5) == doctest::Approx(0.44).epsilon(1e-12));
  CHECK(analysis::capability_bound(1.0, 0.5) == doctest::Approx(1.0));
  CHECK(analysis::capability_bound(0.792, 0.5) == doctest::Approx(0.584).epsilon(1e-12));
  CHECK(analysis::discrimination_bound(0.720) == doctest::Approx(0.44).epsilon(1e-12));
  CHECK(analysis::discrimination_bound(0.806) == doctest::Approx(0.612).epsilon(1e-12));
  CHECK(analysis::discrimination_bound(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(analysis::capability_bound(0.7, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(analysis::capability_bound(0.7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(analysis::capability_bound(1.5, 0.5), std::invalid_argument);
}

TEST_CASE("capability bound at b = 1/2 is the discrimination bound") {
  qmath::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double f = rng.uniform01();
    CHECK(analysis::capability_bound(f, 0.5) ==
          doctest::Approx(analysis::discrimination_bound(f)).epsilon(1e-14));
  }
}

TEST_CASE("grid bounds on the bundled marginals") {
  const analysis::ErrorBudget eta_z = analysis::error_budget(iofmt::fixture_z_table());
  const analysis::ErrorBudget eta_x = analysis::error_budget(iofmt::fixture_x_table());
  const MarginalGrid grid(eta_z.eta, eta_x.eta);
  CHECK(std::abs(analysis::grid_min_mass(grid, {{0, 0}}) - 0.720) < 1e-3);
  CHECK(std::abs(analysis::grid_max_mass(grid, {{0, 0}}) - 0.853) < 5e-4);
}

TEST_CASE("grid bounds, trivial cases") {
  Eigen::VectorXd point(4), uniform(4);
  point << 1, 0, 0, 0;
  uniform << 0.25, 0.25, 0.25, 0.25;

  const MarginalGrid forced(point, point);
  CHECK(analysis::grid_min_mass(forced, {{0, 0}}) == doctest::Approx(1.0));

  const MarginalGrid flat(uniform, uniform);
  CHECK(analysis::grid_max_mass(flat, {{1, 2}}) == doctest::Approx(0.25));

  std::vector<Cell> all_cells;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) all_cells.push_back({i, j});
  CHECK(analysis::grid_min_mass(flat, all_cells) == doctest::Approx(1.0));
  CHECK(analysis::grid_max_mass(flat, all_cells) == doctest::Approx(1.0));

  CHECK_THROWS_AS(analysis::grid_min_mass(flat, {}), std::invalid_argument);
  CHECK_THROWS_AS(analysis::grid_min_mass(flat, {{4, 0}}), std::invalid_argument);
}

TEST_CASE("published error budget reproduces the refined analysis exactly") {
  const MarginalGrid grid = published_budget_grid();
  CHECK(analysis::grid_min_mass(grid, {{0, 0}}) == doctest::Approx(0.720).epsilon(1e-12));
  CHECK(analysis::derived_fidelity_bound(analysis::DerivedOp::IdentityZx, grid) ==
        doctest::Approx(0.842).epsilon(1e-12));
  CHECK(analysis::derived_fidelity_bound(analysis::DerivedOp::Entangler, grid) ==
        doctest::Approx(0.792).epsilon(1e-12));
  CHECK(analysis::derived_fidelity_bound(analysis::DerivedOp::BellAnalyzer, grid) ==
        doctest::Approx(0.806).epsilon(1e-12));
  CHECK(analysis::capability_bound(0.792, 0.5) == doctest::Approx(0.584).epsilon(1e-12));
  CHECK(analysis::discrimination_bound(0.806) == doctest::Approx(0.612).epsilon(1e-12));

  // The minimal-fidelity witness is unique: all doubly-erroneous cells are
  // empty, the first row carries the X errors and the first column the Z
  // errors.
  const analysis::GridSolution min_fqp = analysis::solve_grid_min(grid, {{0, 0}});
  CHECK(min_fqp.mass == doctest::Approx(0.720).epsilon(1e-10));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(0, 0) = 0.720;
  for (int p = 1; p < 4; ++p) {
    expected(0, p) = grid.col_marginals[p];
    expected(p, 0) = grid.row_marginals[p];
  }
  CHECK((min_fqp.grid - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("preserved cells of the derived operations") {
  const auto as_set = [](const std::vector<Cell>& cells) {
    return std::set<Cell>(cells.begin(), cells.end());
  };
  CHECK(as_set(analysis::preserved_cells(analysis::DerivedOp::IdentityZx)) ==
        std::set<Cell>{{0, 0}, {0, 2}, {1, 0}, {1, 2}});
  CHECK(as_set(analysis::preserved_cells(analysis::DerivedOp::Entangler)) ==
        std::set<Cell>{{0, 0}, {3, 0}, {3, 3}, {0, 3}});
  CHECK(as_set(analysis::preserved_cells(analysis::DerivedOp::BellAnalyzer)) ==
        std::set<Cell>{{0, 0}, {2, 0}, {0, 1}, {2, 1}});
}

TEST_CASE("simplex agrees with the product closed form and emits witnesses") {
  qmath::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    // Grids stay generic in the pattern count: exercise one-, two- and
    // three-qubit sizes.
    const int n = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 4 : 8);
    const MarginalGrid grid(testsupport::random_marginals(rng, n),
                            testsupport::random_marginals(rng, n));
    const std::vector<int> row_set = testsupport::random_index_set(rng, n);
    const std::vector<int> col_set = testsupport::random_index_set(rng, n);
    std::vector<Cell> cells;
    for (int r : row_set)
      for (int c : col_set) cells.push_back({r, c});

    const analysis::GridSolution lo = analysis::solve_grid_min(grid, cells);
    const analysis::GridSolution hi = analysis::solve_grid_max(grid, cells);
    CHECK(std::abs(lo.mass - analysis::frechet_min(grid, row_set, col_set)) < 1e-10);
    CHECK(std::abs(hi.mass - analysis::frechet_max(grid, row_set, col_set)) < 1e-10);
    CHECK(lo.mass <= hi.mass + 1e-12);

    for (const analysis::GridSolution* solution : {&lo, &hi}) {
      CHECK(solution->grid.minCoeff() >= 0.0);
      CHECK((solution->grid.rowwise().sum() - grid.row_marginals).cwiseAbs().maxCoeff() <
            1e-9);
      CHECK((solution->grid.colwise().sum().transpose() - grid.col_marginals)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("simplex matches the vertex-enumeration oracle on non-product sets") {
  qmath::Rng rng(99);
  int tested = 0;
  while (tested < 25) {
    const MarginalGrid grid(testsupport::random_marginals(rng, 4),
                            testsupport::random_marginals(rng, 4));
    std::set<Cell> cell_set;
    const int wanted = 2 + static_cast<int>(rng.uniform01() * 7.0);
    while (static_cast<int>(cell_set.size()) < wanted) {
      cell_set.insert({static_cast<int>(rng.uniform01() * 4.0) % 4,
                       static_cast<int>(rng.uniform01() * 4.0) % 4});
    }
    std::vector<Cell> cells(cell_set.begin(), cell_set.end());
    std::vector<int> row_set, col_set;
    if (analysis::as_product_set(cells, row_set, col_set)) continue;
    ++tested;

    const double lo = analysis::grid_min_mass(grid, cells);
    const double hi = analysis::grid_max_mass(grid, cells);
    CHECK(std::abs(lo - vertex_enumeration_optimum(grid.row_marginals,
                                                   grid.col_marginals, cells, false)) <
          1e-9);
    CHECK(std::abs(hi - vertex_enumeration_optimum(grid.row_marginals,
                                                   grid.col_marginals, cells, true)) <
          1e-9);
  }
}

TEST_CASE("marginal grid validation") {
  Eigen::VectorXd good(4), bad_sum(4), negative(4);
  good << 0.7, 0.1, 0.1, 0.1;
  bad_sum << 0.7, 0.1, 0.1, 0.2;
  negative << 1.1, -0.1, 0.0, 0.0;
  CHECK_NOTHROW(MarginalGrid(good, good));
  CHECK_THROWS_AS(MarginalGrid(good, bad_sum), std::invalid_argument);
  CHECK_THROWS_AS(MarginalGrid(negative, good), std::invalid_argument);
}

TEST_CASE("full report on the bundled tables") {
  const analysis::FidelityReport report =
      analysis::full_report(iofmt::fixture_z_table(), iofmt::fixture_x_table(), 0.5);
  CHECK(std::abs(report.f_z - 0.853) < 5e-4);
  CHECK(std::abs(report.f_x - 0.867) < 5e-4);
  CHECK(std::abs(report.f_qp_lo - 0.720) < 1e-3);
  CHECK(std::abs(report.f_qp_hi - 0.853) < 5e-4);
  CHECK(std::abs(report.c_coarse - 0.440) < 2e-3);
  CHECK(std::abs(report.d_coarse - 0.440) < 2e-3);
  CHECK(std::abs(report.f_i_min - 0.842) < 1e-3);
  CHECK(std::abs(report.f_c_min - 0.792) < 1e-3);
  CHECK(std::abs(report.f_d_min - 0.806) < 1e-3);

  // The refined bounds are tied to the minimal fidelities by construction.
  CHECK(report.c_refined ==
        doctest::Approx(analysis::capability_bound(report.f_c_min, 0.5)));
  CHECK(report.d_refined ==
        doctest::Approx(analysis::discrimination_bound(report.f_d_min)));
  CHECK(report.f_d_min > report.f_c_min);
  CHECK(report.d_refined > report.c_refined);
  CHECK(report.f_qp_lo == report.f_qp_lo_unclamped);
  CHECK(report.witness_b == 0.5);

  // Witness grid carries the marginals.
  CHECK((report.min_fqp_grid.rowwise().sum() - report.eta_z.eta).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK((report.min_fqp_grid.colwise().sum().transpose() - report.eta_x.eta)
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("full report on ideal tables certifies everything") {
  const auto ideal = channel::NoisyGateModel::ideal_cnot();
  const analysis::FidelityReport report = analysis::full_report(
      channel::truth_table(ideal, gatelib::basis_family(BasisKind::ZProduct)),
      channel::truth_table(ideal, gatelib::basis_family(BasisKind::XProduct)), 0.5);
  for (double v : {report.f_z, report.f_x, report.f_qp_lo, report.f_qp_hi,
                   report.c_coarse, report.d_coarse, report.f_i_min, report.f_c_min,
                   report.f_d_min, report.c_refined, report.d_refined}) {
    CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("full report rejects mismatched bases") {
  CHECK_THROWS_AS(
      analysis::full_report(iofmt::fixture_z_table(), iofmt::fixture_z_table(), 0.5),
      std::invalid_argument);
}

TEST_CASE("interval and derived bounds are sound on random models") {
  qmath::Rng rng(314159);
  for (int trial = 0; trial < 100; ++trial) {
    const channel::NoisyGateModel model =
        trial % 3 == 2 ? testsupport::random_unitary_mixture(rng, 2 + trial % 4)
                       : testsupport::random_chi_diagonal(rng);
    const double f_qp = channel::choi_fidelity(model);

    const analysis::FidelityReport report = analysis::full_report(
        channel::truth_table(model, gatelib::basis_family(BasisKind::ZProduct)),
        channel::truth_table(model, gatelib::basis_family(BasisKind::XProduct)), 0.5);
    CHECK(report.f_qp_lo_unclamped <= f_qp + 1e-9);
    CHECK(f_qp <= report.f_qp_hi + 1e-9);

    CHECK(report.f_i_min <=
          testsupport::simulated_operation_fidelity(model, BasisKind::ZxEigen) + 1e-9);
    CHECK(report.f_c_min <=
          testsupport::simulated_operation_fidelity(model, BasisKind::XzEigen) + 1e-9);
    CHECK(report.f_d_min <=
          testsupport::simulated_operation_fidelity(model, BasisKind::Bell) + 1e-9);
  }
}

TEST_CASE("count tables normalize per row") {
  analysis::CountTable counts;
  counts.basis = BasisKind::ZProduct;
  counts.ideal_permutation = {0, 1, 3, 2};
  counts.counts.setZero(4, 4);
  for (int k = 0; k < 4; ++k) counts.counts(k, k) = 50 + k;
  const analysis::TruthTable table = counts.normalized();
  CHECK(table.provenance == analysis::Provenance::Counts);
  CHECK(table.shots_per_row == 0);  // rows differ
  for (int k = 0; k < 4; ++k) CHECK(table.probs(k, k) == doctest::Approx(1.0));

  counts.counts(2, 2) = 0;
  CHECK_THROWS_AS(counts.normalized(), std::invalid_argument);
}
