#include "menuprune/model/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace menuprune::model {

geometry::Affine revenue_integrand(const Instance& instance, const BasisFunction& f) {
  const Eigen::Vector2d q = f.gradient.cwiseQuotient(instance.alpha);
  const Eigen::Vector2d grad = instance.invoice_weights().cwiseProduct(q) - f.gradient;
  return {instance.density * grad, -instance.density * f.intercept, f.id};
}

geometry::Affine consumption_integrand(const Instance& instance, const BasisFunction& f) {
  const Eigen::Vector2d q = f.gradient.cwiseQuotient(instance.alpha);
  const double e = 1.0 / instance.eta;
  const Eigen::Vector2d grad(std::pow(q.x(), e), std::pow(q.y(), e));
  return {instance.density * grad, 0.0, f.id};
}

double revenue(const Instance& instance, const Menu& menu, const Complex& complex) {
  const double domain_area = instance.domain.area();
  if (!(domain_area > 0)) throw std::invalid_argument("revenue: degenerate domain");
  if (complex.cells.size() != menu.basis.size()) throw std::invalid_argument("revenue: complex does not match menu");
  if (std::abs(complex.covered_area() - domain_area) > 1e-6 * domain_area)
    throw std::invalid_argument("revenue: cells do not partition the domain");
  double invoices = 0, consumption = 0;
  for (std::size_t i = 0; i < menu.basis.size(); ++i) {
    const auto& cell = complex.cells[i].polygon;
    if (cell.empty()) continue;
    invoices += geometry::integrate_affine(cell, revenue_integrand(instance, menu.basis[i]));
    consumption += geometry::integrate_affine(cell, consumption_integrand(instance, menu.basis[i]));
  }
  return invoices - instance.cost(consumption);
}

LiftResult lift_participation(const Instance& instance, const Menu& menu, const Complex& complex) {
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < menu.basis.size(); ++i) {
    const auto& cell = complex.cells[i].polygon;
    if (cell.empty()) continue;
    const auto& f = menu.basis[i];
    const geometry::Affine diff{instance.reservation.gradient - f.gradient,
                                instance.reservation.intercept - f.intercept, f.id};
    gap = std::max(gap, geometry::max_affine_gap(cell, diff).first);
  }
  LiftResult out{menu, std::max(0.0, gap)};
  if (out.shift > 0)
    for (auto& f : out.menu.basis) f.intercept += out.shift;
  return out;
}

IcReport check_ic(std::span<const Eigen::Vector2d> points, std::span<const double> u,
                  std::span<const Eigen::Vector2d> q, const Eigen::Vector2d& alpha) {
  if (points.size() != u.size() || points.size() != q.size())
    throw std::invalid_argument("check_ic: grids are not aligned");
  IcReport rep{-std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d g = alpha.cwiseProduct(q[i]);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      const double v = (points[j] - points[i]).dot(g) - (u[j] - u[i]);
      if (v > rep.max_violation) rep = {v, i, j};
    }
  }
  if (points.size() < 2) rep.max_violation = 0;
  return rep;
}

}  // namespace menuprune::model
