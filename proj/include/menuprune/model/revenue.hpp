#pragma once

#include "menuprune/model/complex.hpp"
#include "menuprune/model/instance.hpp"

#include <span>

namespace menuprune::model {

/// x -> L(x, f(x), q_f): invoice density of the types served by f.
geometry::Affine revenue_integrand(const Instance& instance, const BasisFunction& f);

/// x -> M(x, q_f): consumption density of the types served by f.
geometry::Affine consumption_integrand(const Instance& instance, const BasisFunction& f);

/// J = sum_i ∬_{C_i} L - C(sum_i ∬_{C_i} M). Throws if the complex does not
/// cover the domain (relative area mismatch above 1e-6).
double revenue(const Instance& instance, const Menu& menu, const Complex& complex);

struct LiftResult {
  Menu menu;
  double shift = 0;
};

/// Raises every intercept by max(0, max_x R(x) - u(x)) so the envelope
/// dominates the reservation utility.
LiftResult lift_participation(const Instance& instance, const Menu& menu, const Complex& complex);

struct IcReport {
  double max_violation = 0;
  std::size_t from = 0;
  std::size_t to = 0;
};

/// max over ordered pairs (x, y) of <y - x, alpha*q(x)> - (u(y) - u(x)).
IcReport check_ic(std::span<const Eigen::Vector2d> points, std::span<const double> u,
                  std::span<const Eigen::Vector2d> q, const Eigen::Vector2d& alpha);

}  // namespace menuprune::model
