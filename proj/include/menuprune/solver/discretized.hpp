#pragma once

#include "menuprune/model/instance.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace menuprune::solver {

/// One linear inequality <a, y> <= rhs with at most four non-zeros.
struct SparseRow {
  std::array<int, 4> index{};
  std::array<double, 4> value{};
  int nnz = 0;
  double rhs = 0;

  double dot(const Eigen::VectorXd& y) const {
    double s = 0;
    for (int k = 0; k < nnz; ++k) s += value[k] * y(index[k]);
    return s;
  }
  double norm() const {
    double s = 0;
    for (int k = 0; k < nnz; ++k) s += value[k] * value[k];
    return std::sqrt(s);
  }
};

/// Direct discretization of the menu problem on a finite set of types.
/// Variables are stacked as y = (u_0..u_{n-1}, q_0x, q_0y, q_1x, ...).
/// Rows, in order: incentive compatibility for every ordered pair,
/// participation, quality set per point, price bounds per point.
class DiscretizedProblem {
 public:
  DiscretizedProblem(model::Instance instance, std::vector<Eigen::Vector2d> points, std::vector<double> weights);

  const model::Instance& instance() const { return instance_; }
  const std::vector<Eigen::Vector2d>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t num_points() const { return points_.size(); }
  std::size_t num_variables() const { return 3 * points_.size(); }
  int u_index(std::size_t i) const { return static_cast<int>(i); }
  int q_index(std::size_t i, int k) const { return static_cast<int>(points_.size() + 2 * i) + k; }

  const std::vector<SparseRow>& rows() const { return rows_; }
  std::size_t num_ic_rows() const { return num_ic_; }

  /// F(u,q) = sum_i w_i (<x_i, (z_ref/eta)*q_i> - u_i) - C(sum_i w_i <x_i, q_i^(1/eta)>)
  double objective(const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
  /// Aggregate consumption sum_i w_i <x_i, q_i^(1/eta)>.
  double consumption(const Eigen::VectorXd& y) const;

  /// max_k (<a_k, y> - rhs_k) over rows of the given kind range.
  double max_violation(const Eigen::VectorXd& y) const;
  double max_ic_violation(const Eigen::VectorXd& y) const;
  double max_participation_violation(const Eigen::VectorXd& y) const;

  /// u = R on the grid, q = the reservation contract's quality.
  Eigen::VectorXd reservation_start() const;
  /// Strictly feasible point: a strictly convex perturbation of an affine menu.
  Eigen::VectorXd interior_start() const;

  /// Per-variable box implied by the constraints (used to bound step ranges).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> variable_bounds() const;

  Eigen::Vector2d q_at(const Eigen::VectorXd& y, std::size_t i) const {
    return {y(q_index(i, 0)), y(q_index(i, 1))};
  }

 private:
  model::Instance instance_;
  std::vector<Eigen::Vector2d> points_;
  std::vector<double> weights_;
  std::vector<SparseRow> rows_;
  std::size_t num_ic_ = 0;
  std::size_t num_participation_ = 0;
};

/// Regular N x N grid over the bounding box of the instance domain, with
/// uniform weights 1/N^2.
DiscretizedProblem discretize(const model::Instance& instance, int n);

}  // namespace menuprune::solver
