#include "menuprune/lp/simplex.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <random>

using namespace menuprune::lp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Best vertex of {Ax <= b, lo <= x <= hi} (all finite) by enumerating every
// choice of n tight constraints.
double vertex_enumeration(const LinearProgram<double>& lp, bool* feasible) {
  const auto n = lp.objective.size();
  const auto m = lp.A.rows();
  MatrixXd G(m + 2 * n, n);
  VectorXd h(m + 2 * n);
  G << lp.A, MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
  h << lp.b, lp.upper, -lp.lower;
  const auto rows = G.rows();
  double best = -inf;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      MatrixXd M(n, n);
      VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        M.row(k) = G.row(pick[static_cast<std::size_t>(k)]);
        r(k) = h(pick[static_cast<std::size_t>(k)]);
      }
      Eigen::FullPivLU<MatrixXd> lu(M);
      if (lu.rank() < n) return;
      const VectorXd x = lu.solve(r);
      if (((G * x - h).array() <= 1e-9).all()) best = std::max(best, lp.objective.dot(x));
      return;
    }
    for (int i = start; i < rows; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  *feasible = best > -inf;
  return best;
}

LinearProgram<double> random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(-1, 1);
  LinearProgram<double> lp;
  lp.objective = VectorXd::NullaryExpr(n, [&] { return u(rng); });
  lp.A = MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
  lp.b = VectorXd::NullaryExpr(m, [&] { return u(rng) + 0.2; });
  lp.lower = VectorXd::Constant(n, -2);
  lp.upper = VectorXd::Constant(n, 2);
  return lp;
}

}  // namespace

TEST_CASE("textbook maximization") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0: optimum 36 at (2,6)
  LinearProgram<double> lp;
  lp.objective = Eigen::Vector2d(3, 5);
  lp.A = (MatrixXd(3, 2) << 1, 0, 0, 2, 3, 2).finished();
  lp.b = Eigen::Vector3d(4, 12, 18);
  lp.lower = VectorXd::Zero(2);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(36));
  CHECK(s.primal(0) == doctest::Approx(2));
  CHECK(s.primal(1) == doctest::Approx(6));
  // dual: (0, 1.5, 1)
  CHECK(s.duals(0) == doctest::Approx(0).scale(1));
  CHECK(s.duals(1) == doctest::Approx(1.5));
  CHECK(s.duals(2) == doctest::Approx(1));
  CHECK(s.active_rows == std::vector<int>{1, 2});
}

TEST_CASE("infeasible and unbounded programs are reported") {
  LinearProgram<double> lp;
  lp.objective = VectorXd::Ones(1);
  lp.A = MatrixXd::Ones(1, 1);
  lp.b = VectorXd::Constant(1, -1);
  lp.lower = VectorXd::Zero(1);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);

  lp.A(0, 0) = -1;
  lp.b(0) = 0;
  CHECK(solve_lp(lp).status == LpStatus::unbounded);

  lp.lower = VectorXd::Constant(1, 1);
  lp.upper = VectorXd::Constant(1, 0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("invalid input is rejected") {
  LinearProgram<double> lp;
  lp.objective = VectorXd::Ones(2);
  lp.A = MatrixXd::Ones(1, 3);
  lp.b = VectorXd::Ones(1);
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
  lp.A = MatrixXd::Ones(1, 2);
  lp.b(0) = std::nan("");
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}

TEST_CASE("Beale's cycling example terminates at the optimum") {
  LinearProgram<double> lp;
  lp.objective = (VectorXd(4) << 0.75, -20, 0.5, -6).finished();
  lp.A = (MatrixXd(3, 4) << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0).finished();
  lp.b = Eigen::Vector3d(0, 0, 1);
  lp.lower = VectorXd::Zero(4);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(1.25));
}

TEST_CASE("free and upper-bounded variables") {
  // max -|x - 3| style: max t, t <= x - 3, t <= 3 - x, x <= 10 free below
  LinearProgram<double> lp;
  lp.objective = Eigen::Vector2d(0, 1);
  lp.A = (MatrixXd(2, 2) << -1, 1, 1, 1).finished();
  lp.b = Eigen::Vector2d(-3, 3);
  lp.lower = Eigen::Vector2d(-inf, -inf);
  lp.upper = Eigen::Vector2d(10, inf);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(0).scale(1));
  CHECK(s.primal(0) == doctest::Approx(3));
}

TEST_CASE("random bounded programs match vertex enumeration, with dual certificates") {
  std::mt19937_64 rng(41);
  int optimal = 0;
  for (int t = 0; t < 400; ++t) {
    const int n = 2 + t % 2;
    const auto lp = random_lp(rng, n, 4 + t % 6);
    bool feasible = false;
    const double ref = vertex_enumeration(lp, &feasible);
    const auto s = solve_lp(lp);
    if (!feasible) {
      CHECK(s.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::optimal);
    ++optimal;
    CHECK(s.value == doctest::Approx(ref).epsilon(1e-9).scale(1));
    // primal feasibility
    CHECK(((lp.A * s.primal - lp.b).array() <= 1e-9).all());
    CHECK(((s.primal - lp.upper).array() <= 1e-9).all());
    CHECK(((lp.lower - s.primal).array() <= 1e-9).all());
    // stationarity c = A'lambda + mu and strong duality
    const VectorXd resid = lp.objective - lp.A.transpose() * s.duals - s.bound_duals;
    CHECK(resid.lpNorm<Eigen::Infinity>() <= 1e-9);
    double dual_value = lp.b.dot(s.duals);
    for (int j = 0; j < n; ++j)
      dual_value += s.bound_duals(j) * (s.bound_duals(j) > 0 ? lp.upper(j) : lp.lower(j));
    CHECK(dual_value == doctest::Approx(s.value).epsilon(1e-9).scale(1));
    // complementary slackness
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i)
      CHECK(s.duals(i) * (lp.b(i) - lp.A.row(i).dot(s.primal)) <= 1e-9);
  }
  CHECK(optimal > 150);
}

TEST_CASE("dropping rows with zero multiplier and slack keeps the value") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    const auto lp = random_lp(rng, 3, 10);
    const auto s = solve_lp(lp);
    if (s.status != LpStatus::optimal) continue;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i)
      if (s.duals(i) > 0 || lp.b(i) - lp.A.row(i).dot(s.primal) <= 1e-8) keep.push_back(i);
    auto reduced = lp;
    reduced.A = lp.A(keep, Eigen::all);
    reduced.b = lp.b(keep);
    const auto r = solve_lp(reduced);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(std::abs(r.value - s.value) < 1e-9);
  }
}

TEST_CASE("badly scaled rows") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> e(-4, 4);
  for (int t = 0; t < 100; ++t) {
    auto lp = random_lp(rng, 2, 6);
    bool feasible = false;
    const double ref = vertex_enumeration(lp, &feasible);
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
      const double s = std::pow(10.0, e(rng));
      lp.A.row(i) *= s;
      lp.b(i) *= s;
    }
    const auto s = solve_lp(lp);
    if (!feasible) continue;
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(ref).epsilon(1e-8).scale(1));
  }
}
