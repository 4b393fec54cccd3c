#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "iabsim/revised_simplex.hpp"

using iabsim::lp::RevisedSimplex;
using iabsim::lp::Status;

namespace {

struct Lp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

RevisedSimplex make(const Lp& lp) {
  RevisedSimplex s(lp.b);
  for (Eigen::Index j = 0; j < lp.a.cols(); ++j) s.add_column(lp.a.col(j), lp.c[j]);
  return s;
}

// Vertex enumeration: every m-subset of columns that forms a nonsingular,
// feasible basis. Returns +inf when no vertex exists.
double brute_force_min(const Lp& lp) {
  const auto m = lp.a.rows(), n = lp.a.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(m));
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == m) {
      Eigen::MatrixXd bm(m, m);
      Eigen::VectorXd cb(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        bm.col(i) = lp.a.col(pick[static_cast<std::size_t>(i)]);
        cb[i] = lp.c[pick[static_cast<std::size_t>(i)]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(bm);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(lp.b);
      if (x.minCoeff() < -1e-9) return;
      best = std::min(best, cb.dot(x));
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[static_cast<std::size_t>(depth)] = j;
      self(self, j + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST(RevisedSimplex, TextbookProblem) {
  // min -x1 - x2  s.t.  x1 + 2 x2 + s1 = 4,  3 x1 + x2 + s2 = 6
  Lp lp;
  lp.a.resize(2, 4);
  lp.a << 1, 2, 1, 0, 3, 1, 0, 1;
  lp.b.resize(2);
  lp.b << 4, 6;
  lp.c.resize(4);
  lp.c << -1, -1, 0, 0;
  auto s = make(lp);
  ASSERT_EQ(s.solve(), Status::optimal);
  const auto x = s.primal();
  EXPECT_NEAR(x[0], 1.6, 1e-12);
  EXPECT_NEAR(x[1], 1.2, 1e-12);
  EXPECT_NEAR(s.objective(), -2.8, 1e-12);
  const auto y = s.duals();
  EXPECT_NEAR(y[0] * 4 + y[1] * 6, -2.8, 1e-12);
}

TEST(RevisedSimplex, DetectsInfeasible) {
  Lp lp;
  lp.a.resize(1, 2);
  lp.a << 1, 1;
  lp.b.resize(1);
  lp.b << -1;
  lp.c = Eigen::VectorXd::Zero(2);
  auto s = make(lp);
  EXPECT_EQ(s.solve(), Status::infeasible);
}

TEST(RevisedSimplex, DetectsUnbounded) {
  Lp lp;
  lp.a.resize(1, 2);
  lp.a << 1, -1;
  lp.b.resize(1);
  lp.b << 0;
  lp.c.resize(2);
  lp.c << -1, 0;
  auto s = make(lp);
  EXPECT_EQ(s.solve(), Status::unbounded);
}

TEST(RevisedSimplex, RedundantRowIsHarmless) {
  Lp lp;
  lp.a.resize(2, 3);
  lp.a << 1, 1, 1, 2, 2, 2;
  lp.b.resize(2);
  lp.b << 1, 2;
  lp.c.resize(3);
  lp.c << 3, 1, 2;
  auto s = make(lp);
  ASSERT_EQ(s.solve(), Status::optimal);
  EXPECT_NEAR(s.objective(), 1.0, 1e-12);
}

TEST(RevisedSimplex, MatchesVertexEnumerationAndStrongDuality) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> entry(-2.0, 3.0), pos(0.0, 2.0), cost(0.1, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 3, n = m + 2 + trial % 4;
    Lp lp;
    lp.a.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) lp.a(i, j) = entry(rng);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = (j % 2 == 0) ? pos(rng) : 0.0;  // degenerate starts
    lp.b = lp.a * x0;
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = cost(rng);
    auto s = make(lp);
    ASSERT_EQ(s.solve(), Status::optimal) << "trial " << trial;
    const double expected = brute_force_min(lp);
    EXPECT_NEAR(s.objective(), expected, 1e-8 * (1 + std::abs(expected))) << "trial " << trial;
    const auto y = s.duals();
    double dual_obj = 0;
    for (int i = 0; i < m; ++i) dual_obj += y[static_cast<std::size_t>(i)] * lp.b[i];
    EXPECT_NEAR(dual_obj, s.objective(), 1e-8 * (1 + std::abs(expected)));
    // Primal feasibility of the reported point.
    const auto x = s.primal();
    Eigen::VectorXd xv(n);
    for (int j = 0; j < n; ++j) {
      EXPECT_GE(x[static_cast<std::size_t>(j)], -1e-10);
      xv[j] = x[static_cast<std::size_t>(j)];
    }
    EXPECT_LE((lp.a * xv - lp.b).lpNorm<Eigen::Infinity>(), 1e-8);
    // Dual feasibility: every reduced cost is nonnegative.
    for (int j = 0; j < n; ++j) EXPECT_GE(s.reduced_cost(lp.a.col(j), lp.c[j]), -1e-8);
  }
}

TEST(RevisedSimplex, WarmStartAfterAddingColumns) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> entry(-1.0, 2.0), cost(0.5, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3, n = 8;
    Lp lp;
    lp.a.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) lp.a(i, j) = entry(rng);
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, 0.5);
    lp.b = lp.a * x0;
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = cost(rng);

    RevisedSimplex warm(lp.b);
    for (int j = 0; j < n; ++j) {
      warm.add_column(lp.a.col(j), lp.c[j]);
      // Early subsets may be infeasible; phase one reruns until a basis exists.
      if (j >= m + 1) (void)warm.solve();
    }
    ASSERT_EQ(warm.solve(), Status::optimal);
    auto cold = make(lp);
    ASSERT_EQ(cold.solve(), Status::optimal);
    EXPECT_NEAR(warm.objective(), cold.objective(), 1e-9 * (1 + std::abs(cold.objective())));
  }
}

TEST(RevisedSimplex, RefactorizationKeepsAccuracy) {
  // Enough pivots to cross several refactorization boundaries.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> entry(0.0, 1.0);
  const int m = 20, n = 120;
  Lp lp;
  lp.a.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) lp.a(i, j) = entry(rng);
  lp.b = lp.a * Eigen::VectorXd::Constant(n, 1.0);
  lp.c.resize(n);
  for (int j = 0; j < n; ++j) lp.c[j] = -entry(rng);
  // Bound the problem: add sum x <= n via a slack row.
  Eigen::MatrixXd a2(m + 1, n + 1);
  a2.setZero();
  a2.topLeftCorner(m, n) = lp.a;
  a2.row(m).head(n).setOnes();
  a2(m, n) = 1.0;
  Eigen::VectorXd b2(m + 1);
  b2.head(m) = lp.b;
  b2[m] = n;
  Eigen::VectorXd c2(n + 1);
  c2.head(n) = lp.c;
  c2[n] = 0;
  Lp big{a2, b2, c2};
  auto s = make(big);
  ASSERT_EQ(s.solve(), Status::optimal);
  EXPECT_GT(s.pivots(), 50);
  const auto x = s.primal();
  Eigen::VectorXd xv(n + 1);
  for (int j = 0; j <= n; ++j) xv[j] = x[static_cast<std::size_t>(j)];
  EXPECT_LE((big.a * xv - big.b).lpNorm<Eigen::Infinity>(), 1e-8);
  const auto y = s.duals();
  double dual_obj = 0;
  for (int i = 0; i <= m; ++i) dual_obj += y[static_cast<std::size_t>(i)] * big.b[i];
  EXPECT_NEAR(dual_obj, s.objective(), 1e-8 * std::abs(s.objective()));
}
