#include "menuprune/solver/discretized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace menuprune::solver {

DiscretizedProblem::DiscretizedProblem(model::Instance instance, std::vector<Eigen::Vector2d> points,
                                       std::vector<double> weights)
    : instance_(std::move(instance)), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty() || points_.size() != weights_.size())
    throw std::invalid_argument("DiscretizedProblem: need one weight per point");
  const std::size_t n = points_.size();
  const Eigen::Vector2d& a = instance_.alpha;
  rows_.reserve(n * (n - 1) + n * (3 + instance_.quality_set.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Eigen::Vector2d d = (points_[j] - points_[i]).cwiseProduct(a);
      SparseRow r;
      r.nnz = 4;
      r.index = {u_index(i), u_index(j), q_index(i, 0), q_index(i, 1)};
      r.value = {1.0, -1.0, d.x(), d.y()};
      rows_.push_back(r);
    }
  }
  num_ic_ = rows_.size();
  for (std::size_t i = 0; i < n; ++i) {
    SparseRow r;
    r.nnz = 1;
    r.index[0] = u_index(i);
    r.value[0] = -1;
    r.rhs = -instance_.reservation(points_[i]);
    rows_.push_back(r);
  }
  num_participation_ = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& h : instance_.quality_set) {
      SparseRow r;
      r.nnz = 2;
      r.index = {q_index(i, 0), q_index(i, 1), 0, 0};
      r.value = {h.normal.x(), h.normal.y(), 0, 0};
      r.rhs = h.offset;
      rows_.push_back(r);
    }
    const Eigen::Vector2d xa = points_[i].cwiseProduct(a);
    SparseRow upper;
    upper.nnz = 3;
    upper.index = {q_index(i, 0), q_index(i, 1), u_index(i), 0};
    upper.value = {xa.x(), xa.y(), -1, 0};
    upper.rhs = instance_.p_max;
    rows_.push_back(upper);
    SparseRow lower = upper;
    lower.value = {-xa.x(), -xa.y(), 1, 0};
    lower.rhs = -instance_.p_min;
    rows_.push_back(lower);
  }
}

double DiscretizedProblem::consumption(const Eigen::VectorXd& y) const {
  const double e = 1 / instance_.eta;
  double m = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector2d q = q_at(y, i);
    m += weights_[i] * (points_[i].x() * std::pow(q.x(), e) + points_[i].y() * std::pow(q.y(), e));
  }
  return m;
}

double DiscretizedProblem::objective(const Eigen::VectorXd& y) const {
  const Eigen::Vector2d inv = instance_.invoice_weights();
  double lin = 0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    lin += weights_[i] * (points_[i].cwiseProduct(inv).dot(q_at(y, i)) - y(u_index(i)));
  return lin - instance_.cost(consumption(y));
}

Eigen::VectorXd DiscretizedProblem::gradient(const Eigen::VectorXd& y) const {
  const Eigen::Vector2d inv = instance_.invoice_weights();
  const double e = 1 / instance_.eta;
  const double dc = instance_.cost.derivative(consumption(y));
  Eigen::VectorXd g(num_variables());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double w = weights_[i];
    g(u_index(i)) = -w;
    for (int k = 0; k < 2; ++k) {
      const double qk = y(q_index(i, k));
      const double x = points_[i](k);
      g(q_index(i, k)) = w * x * inv(k) - dc * w * x * e * std::pow(qk, e - 1);
    }
  }
  return g;
}

double DiscretizedProblem::max_violation(const Eigen::VectorXd& y) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows_) v = std::max(v, r.dot(y) - r.rhs);
  return v;
}

double DiscretizedProblem::max_ic_violation(const Eigen::VectorXd& y) const {
  double v = num_ic_ ? -std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t k = 0; k < num_ic_; ++k) v = std::max(v, rows_[k].dot(y) - rows_[k].rhs);
  return v;
}

double DiscretizedProblem::max_participation_violation(const Eigen::VectorXd& y) const {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t k = num_ic_; k < num_ic_ + num_participation_; ++k)
    v = std::max(v, rows_[k].dot(y) - rows_[k].rhs);
  return v;
}

Eigen::VectorXd DiscretizedProblem::reservation_start() const {
  Eigen::VectorXd y(num_variables());
  const Eigen::Vector2d q = instance_.reservation.gradient.cwiseQuotient(instance_.alpha);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    y(u_index(i)) = instance_.reservation(points_[i]);
    y(q_index(i, 0)) = q.x();
    y(q_index(i, 1)) = q.y();
  }
  return y;
}

namespace {

double interior_depth(const model::Instance& inst, const Eigen::Vector2d& q) {
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& h : inst.quality_set) depth = std::min(depth, -h.violation(q) / h.normal.norm());
  return depth;
}

}  // namespace

Eigen::VectorXd DiscretizedProblem::interior_start() const {
  const auto& inst = instance_;
  const auto region = inst.quality_region();
  Eigen::Vector2d q0 = inst.reservation.gradient.cwiseQuotient(inst.alpha);
  if (!(interior_depth(inst, q0) > 1e-3 * region.diameter())) {
    q0.setZero();
    for (const auto& v : region.vertices()) q0 += v;
    q0 /= static_cast<double>(region.size());
  }
  const double depth = interior_depth(inst, q0);
  if (!(depth > 0)) throw std::runtime_error("interior_start: quality set has no interior");

  // u(x) = <x, alpha*q0> + beta + eps |x - c|^2, q(x) = q0 + 2 eps (x - c) / alpha
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& x : points_) c += x;
  c /= static_cast<double>(points_.size());
  double beta_min = -std::numeric_limits<double>::infinity();
  double spread = 0, radius = 0;
  for (const auto& x : points_) {
    beta_min = std::max(beta_min, inst.reservation(x) - x.dot(inst.alpha.cwiseProduct(q0)));
    spread = std::max(spread, std::abs(x.squaredNorm() - c.squaredNorm()));
    radius = std::max(radius, (x - c).norm());
  }
  // p(x) = -beta + eps (|x|^2 - |c|^2) must stay inside (p_min, p_max)
  const double beta_hi = -inst.p_min;
  const double beta_lo = std::max(beta_min, -inst.p_max);
  if (!(beta_lo < beta_hi)) throw std::runtime_error("interior_start: no strictly feasible affine menu");
  const double beta = 0.5 * (beta_lo + beta_hi);
  const double margin = 0.25 * (beta_hi - beta_lo);
  double eps = std::numeric_limits<double>::infinity();
  if (spread > 0) eps = std::min(eps, margin / spread);
  if (radius > 0) eps = std::min(eps, 0.25 * depth * inst.alpha.cwiseAbs().minCoeff() / radius);
  // keep u - R strictly positive even where beta_min is attained
  if (!std::isfinite(eps)) eps = 0;

  Eigen::VectorXd y(num_variables());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector2d& x = points_[i];
    const Eigen::Vector2d q = q0 + (2 * eps * (x - c)).cwiseQuotient(inst.alpha);
    y(u_index(i)) = x.dot(inst.alpha.cwiseProduct(q0)) + beta + eps * (x - c).squaredNorm();
    y(q_index(i, 0)) = q.x();
    y(q_index(i, 1)) = q.y();
  }
  return y;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> DiscretizedProblem::variable_bounds() const {
  const auto region = instance_.quality_region();
  const auto box = region.bounding_box();
  Eigen::VectorXd lo(num_variables()), hi(num_variables());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector2d xa = points_[i].cwiseProduct(instance_.alpha);
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    for (const auto& v : region.vertices()) {
      smin = std::min(smin, xa.dot(v));
      smax = std::max(smax, xa.dot(v));
    }
    lo(u_index(i)) = std::max(instance_.reservation(points_[i]), smin - instance_.p_max);
    hi(u_index(i)) = smax - instance_.p_min;
    for (int k = 0; k < 2; ++k) {
      lo(q_index(i, k)) = box.min()(k);
      hi(q_index(i, k)) = box.max()(k);
    }
  }
  return {lo, hi};
}

DiscretizedProblem discretize(const model::Instance& instance, int n) {
  if (n < 2) throw std::invalid_argument("discretize: grid size must be at least 2");
  const auto box = instance.domain.bounding_box();
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double s = static_cast<double>(a) / (n - 1);
      const double t = static_cast<double>(b) / (n - 1);
      pts.emplace_back(box.min().x() + s * box.sizes().x(), box.min().y() + t * box.sizes().y());
    }
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  return DiscretizedProblem(instance, std::move(pts), std::move(w));
}

}  // namespace menuprune::solver
