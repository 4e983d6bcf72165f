#pragma once

#include "menuprune/model/instance.hpp"
#include "menuprune/solver/discretized.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace menuprune::solver {

enum class Method { interior_point, frank_wolfe };

struct SolveOptions {
  double tol = 1e-5;
  int max_iter = 5000;
  Method method = Method::interior_point;
};

struct MenuSolution {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> u;
  std::vector<Eigen::Vector2d> q;
  std::vector<double> p;
  double objective = 0;
  int iterations = 0;
  /// Upper bound on max_s <grad F, s - y> over the feasible polytope.
  double fw_gap = 0;
  bool converged = false;
  std::string message;
  double ic_residual = 0;
  double participation_residual = 0;
  /// Row multipliers of the interior-point method (empty for Frank-Wolfe).
  Eigen::VectorXd multipliers;
};

/// Maximizes the discretized objective. The interior-point method certifies
/// its Frank-Wolfe gap through the multipliers; the Frank-Wolfe method calls
/// the simplex oracle and is meant for small grids.
MenuSolution solve_infinite_menu(const DiscretizedProblem& problem, const SolveOptions& options = {});

/// Upper bound on the Frank-Wolfe gap at a feasible y from any multipliers
/// lambda >= 0 (one per row, unnormalized rows):
/// lambda'(b - Ay) + sum_k max_{s_k in box} r_k (y_k - s_k), r = A'lambda - grad F.
double certified_gap(const DiscretizedProblem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& lambda);

Eigen::VectorXd pack(const DiscretizedProblem& problem, const MenuSolution& sol);
MenuSolution unpack(const DiscretizedProblem& problem, const Eigen::VectorXd& y);

/// Affine pieces u_i(x) = <alpha*q_i, x> - p_i, one per grid point (id = point
/// index), dropping later near-duplicates: |g_i - g_j|_inf <= tol*|alpha|_inf
/// and |p_i - p_j| <= tol*p_max.
std::vector<model::BasisFunction> extract_basis(const MenuSolution& sol, const model::Instance& instance,
                                                double dedup_tol);

}  // namespace menuprune::solver
