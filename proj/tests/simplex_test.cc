#include "pmedian/simplex.hpp"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "pmedian/benders.hpp"
#include "pmedian/errors.hpp"
#include "test_support.hpp"

namespace pmedian {
namespace {

using testing::Rng;

constexpr double kFeas = 1e-7;

// Primal and dual feasibility plus complementary slackness of an optimal
// solution, checked from the model alone.
void ExpectCertified(const LpModel& model, const LpSolution& sol) {
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  const int ns = model.num_sites();
  const int nc = model.num_clients();
  double sum_y = std::accumulate(sol.y.begin(), sol.y.end(), 0.0);
  EXPECT_NEAR(sum_y, model.p(), kFeas);
  for (int j = 0; j < ns; ++j) {
    EXPECT_GE(sol.y[j], model.lower(j) - kFeas);
    EXPECT_LE(sol.y[j], model.upper(j) + kFeas);
  }
  for (int i = 0; i < nc; ++i) EXPECT_GE(sol.theta[i], -kFeas);
  const auto rows = model.rows();
  std::vector<double> pi_sum(nc, 0.0);
  std::vector<double> site_dual(ns, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    double lhs = sol.theta[row.client];
    for (const auto& [site, coeff] : row.coeffs) lhs += coeff * sol.y[site];
    const double scale = std::max(1.0, std::abs(row.rhs));
    EXPECT_GE(lhs, row.rhs - kFeas * scale) << "row " << r;
    EXPECT_GE(sol.row_duals[r], -kFeas);
    EXPECT_LE(sol.row_duals[r] * (lhs - row.rhs), 1e-6 * scale) << "row " << r;
    pi_sum[row.client] += sol.row_duals[r];
    for (const auto& [site, coeff] : row.coeffs) site_dual[site] += coeff * sol.row_duals[r];
  }
  // Stationarity in theta: 1 - sum pi = theta reduced cost >= 0.
  for (int i = 0; i < nc; ++i) {
    EXPECT_NEAR(1.0 - pi_sum[i], sol.theta_reduced_costs[i], 1e-7);
    EXPECT_GE(sol.theta_reduced_costs[i], -1e-7);
    EXPECT_LE(sol.theta_reduced_costs[i] * sol.theta[i], 1e-6 * std::max(1.0, sol.theta[i]));
  }
  // Stationarity in y: 0 = mu + sum_r c_rj pi_r + v_j - w_j.
  for (int j = 0; j < ns; ++j) {
    const double scale = std::max(1.0, std::abs(site_dual[j]));
    EXPECT_NEAR(sol.cardinality_dual + site_dual[j] + sol.reduced_costs[j], 0.0, 1e-7 * scale);
    EXPECT_GE(sol.lower_bound_duals[j], -1e-7 * scale);
    EXPECT_GE(sol.upper_bound_duals[j], -1e-7 * scale);
    if (sol.reduced_costs[j] > 1e-7 * scale) EXPECT_NEAR(sol.y[j], model.lower(j), 1e-6);
    if (sol.reduced_costs[j] < -1e-7 * scale) EXPECT_NEAR(sol.y[j], model.upper(j), 1e-6);
  }
  EXPECT_NEAR(sol.objective, sol.dual_objective, 1e-7 * std::max(1.0, std::abs(sol.objective)));
}

LpModel ExampleModel() {
  // Three sites and clients, p = 1, with three hand-written cuts.
  LpModel model(3, 3, 1);
  model.add_row(0, {{0, 4.0}}, 4.0);
  model.add_row(1, {{1, 4.0}}, 4.0);
  model.add_row(2, {{2, 3.0}}, 3.0);
  return model;
}

TEST(SimplexTest, OnlyCardinalityGivesZero) {
  LpModel model(4, 3, 2);
  const LpSolution sol = lp_solve(model);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(sol.objective, 0.0);
  for (double t : sol.theta) EXPECT_DOUBLE_EQ(t, 0.0);
  ExpectCertified(model, sol);
}

TEST(SimplexTest, ThreeCutExampleMatchesVertexEnumeration) {
  const LpModel model = ExampleModel();
  const auto vertex = testing::vertex_lp_value(model);
  ASSERT_TRUE(vertex.has_value());
  // Putting the whole unit on y_1 (or y_2) leaves 0 + 4 + 3.
  EXPECT_NEAR(*vertex, 7.0, 1e-9);
  const LpSolution sol = lp_solve(model);
  EXPECT_NEAR(sol.objective, *vertex, 1e-9);
  ExpectCertified(model, sol);
}

TEST(SimplexTest, UniformPointIsNotOptimalForExample) {
  // y = (1/3, 1/3, 1/3) scores 22/3, strictly worse than the LP optimum.
  const LpModel model = ExampleModel();
  const LpSolution sol = lp_solve(model);
  EXPECT_LT(sol.objective, 22.0 / 3.0 - 0.1);
}

TEST(SimplexTest, WarmStartFromOwnBasisNeedsNoPivot) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = testing::random_instance(rng, 6, 6, 2, 1, 20, trial % 2 == 0);
    const Preprocessed prep(inst);
    LpModel model(6, 6, 2);
    for (int i = 0; i < 6; ++i) {
      for (int k = 0; k < prep.num_levels(i); k += 2) model.add_cut(build_cut(i, k, prep));
    }
    const LpSolution first = lp_solve(model);
    const LpSolution again = lp_solve(model, &first.basis);
    EXPECT_NEAR(again.objective, first.objective, 1e-9);
    EXPECT_LE(again.iterations, 1);
  }
}

TEST(SimplexTest, FixVariablePinsTheOpenSite) {
  const LpModel model = ExampleModel();
  const LpModel fixed = fix_variable(model, 1, 1);
  const LpSolution sol = lp_solve(fixed);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.y[0], 0.0, 1e-9);
  EXPECT_NEAR(sol.y[1], 1.0, 1e-9);
  EXPECT_NEAR(sol.y[2], 0.0, 1e-9);
  EXPECT_NEAR(sol.objective, 7.0, 1e-9);
  ExpectCertified(fixed, sol);
}

TEST(SimplexTest, AllFixedToZeroIsInfeasible) {
  LpModel model = ExampleModel();
  for (int j = 0; j < 3; ++j) model = fix_variable(model, j, 0);
  EXPECT_EQ(lp_solve(model).status, LpStatus::kInfeasible);
  EXPECT_FALSE(testing::dense_lp_value(model).has_value());
}

TEST(SimplexTest, ContradictoryFixingThrows) {
  const LpModel model = fix_variable(ExampleModel(), 0, 1);
  EXPECT_THROW(fix_variable(model, 0, 0), InfeasibleFixing);
  EXPECT_NO_THROW(fix_variable(model, 0, 1));
}

TEST(SimplexTest, CopiesShareRowsUntilWritten) {
  LpModel a = ExampleModel();
  LpModel b = a;
  EXPECT_EQ(a.structure_tag(), b.structure_tag());
  b.add_row(0, {}, 1.0);
  EXPECT_NE(a.structure_tag(), b.structure_tag());
  EXPECT_EQ(a.num_rows(), 3u);
  EXPECT_EQ(b.num_rows(), 4u);
  const RowId id = a.rows()[1].id;
  EXPECT_TRUE(a.remove_row(id));
  EXPECT_FALSE(a.remove_row(id));
  EXPECT_EQ(a.find_row(id), nullptr);
  EXPECT_NE(b.find_row(id), nullptr);
}

// Random master models: cuts from random levels, random fixings. The
// dense tableau oracle is the reference; the vertex oracle covers the
// smallest shapes too.
TEST(SimplexTest, RandomModelsMatchDenseOracle) {
  Rng rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = testing::uniform_int(rng, 2, 7);
    const int m = testing::uniform_int(rng, 2, 7);
    const int p = testing::uniform_int(rng, 1, m);
    const Instance inst = testing::random_instance(rng, n, m, p, 1, 30, false);
    const Preprocessed prep(inst);
    LpModel model(m, n, p);
    const int cuts = testing::uniform_int(rng, 0, 3 * n);
    for (int c = 0; c < cuts; ++c) {
      const int i = testing::uniform_int(rng, 0, n - 1);
      const int k = testing::uniform_int(rng, 0, prep.num_levels(i) - 1);
      model.add_cut(build_cut(i, k, prep));
    }
    for (int j = 0; j < m; ++j) {
      const int r = testing::uniform_int(rng, 0, 9);
      if (r == 0) model.set_bounds(j, 0.0, 0.0);
      if (r == 1) model.set_bounds(j, 1.0, 1.0);
    }
    const auto expected = testing::dense_lp_value(model);
    const LpSolution sol = lp_solve(model);
    if (!expected) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *expected, 1e-7 * std::max(1.0, *expected)) << "trial " << trial;
    ExpectCertified(model, sol);
    if (n + m <= 7 && model.num_rows() + n + 2 * m <= 16) {
      const auto vertex = testing::vertex_lp_value(model);
      ASSERT_TRUE(vertex.has_value());
      EXPECT_NEAR(*vertex, *expected, 1e-7 * std::max(1.0, *expected));
    }
  }
}

// One solver object across a cutting-plane style sequence: append rows,
// change bounds, remove rows. Every solve must agree with a cold solve.
TEST(SimplexTest, IncrementalSolvesAgreeWithColdSolves) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 3, 9);
    const int m = testing::uniform_int(rng, 3, 9);
    const int p = testing::uniform_int(rng, 1, m - 1);
    const Instance inst = testing::random_instance(rng, n, m, p, 1, 50, false);
    const Preprocessed prep(inst);
    LpModel model(m, n, p);
    SimplexSolver solver;
    for (int round = 0; round < 12; ++round) {
      const int action = testing::uniform_int(rng, 0, 5);
      if (action <= 3) {
        for (int c = 0; c < 3; ++c) {
          const int i = testing::uniform_int(rng, 0, n - 1);
          const int k = testing::uniform_int(rng, 0, prep.num_levels(i) - 1);
          model.add_cut(build_cut(i, k, prep));
        }
      } else if (action == 4 && model.num_rows() > 0) {
        const auto rows = model.rows();
        model.remove_row(rows[testing::uniform_int(rng, 0, static_cast<int>(rows.size()) - 1)].id);
      } else {
        const int j = testing::uniform_int(rng, 0, m - 1);
        const double v = testing::uniform_int(rng, 0, 1);
        if (model.lower(j) == model.upper(j)) {
          model.set_bounds(j, 0.0, 1.0);
        } else {
          model.set_bounds(j, v, v);
        }
      }
      const LpSolution warm = solver.solve(model);
      const LpSolution cold = lp_solve(model);
      ASSERT_EQ(warm.status, cold.status) << "trial " << trial << " round " << round;
      if (cold.status == LpStatus::kOptimal) {
        EXPECT_NEAR(warm.objective, cold.objective, 1e-7 * std::max(1.0, cold.objective));
        ExpectCertified(model, warm);
      }
    }
  }
}

TEST(SimplexTest, DeterministicAcrossRuns) {
  Rng rng(5);
  const Instance inst = testing::random_instance(rng, 10, 10, 3, 1, 100, true);
  const Preprocessed prep(inst);
  LpModel model(10, 10, 3);
  for (int i = 0; i < 10; ++i) {
    for (int k = 0; k < prep.num_levels(i); ++k) model.add_cut(build_cut(i, k, prep));
  }
  const LpSolution a = lp_solve(model);
  const LpSolution b = lp_solve(model);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.basis.entries, b.basis.entries);
  ExpectCertified(model, a);
}

}  // namespace
}  // namespace pmedian
