#pragma once

#include "menuprune/geometry/polygon.hpp"

#include <Eigen/Core>

#include <vector>

namespace menuprune::model {

using geometry::Polygon;
using BasisFunction = geometry::Affine;

/// Supply cost C(E) = c2 * E^2 of the aggregate consumption E.
struct QuadraticCost {
  double c2 = 0;

  double operator()(double e) const { return c2 * e * e; }
  double derivative(double e) const { return 2 * c2 * e; }
  double second_derivative(double) const { return 2 * c2; }
};

/// Market problem after the change of variables: types x live in `domain`
/// (the support rectangle of a uniform density), contracts are (p, q) with
/// utility <x, alpha*q> - p.
struct Instance {
  Polygon domain;
  double density = 1;
  Eigen::Vector2d alpha = Eigen::Vector2d::Ones();
  double eta = -0.1;
  Eigen::Vector2d z_ref = Eigen::Vector2d::Ones();
  double p_ref = 0;
  QuadraticCost cost;
  double p_min = 0;
  double p_max = 1;
  std::vector<geometry::HalfPlaned> quality_set;
  geometry::Affine reservation;

  /// Coefficient of q in the invoice: L = (<x, (z_ref/eta)*q> - u) * rho.
  Eigen::Vector2d invoice_weights() const { return z_ref / eta; }

  bool quality_feasible(const Eigen::Vector2d& q, double tol = 1e-9) const;

  /// Q as a polygon (bounded by the quality half-planes).
  Polygon quality_region() const;
};

/// Throws std::invalid_argument when the instance violates its invariants.
/// A zero cost coefficient is accepted here; strict convexity is enforced
/// when an instance is built from market data.
void validate(const Instance& instance);

struct Contract {
  double p = 0;
  Eigen::Vector2d q = Eigen::Vector2d::Ones();
};

Contract to_contract(const BasisFunction& f, const Eigen::Vector2d& alpha);
BasisFunction to_basis(const Contract& c, const Eigen::Vector2d& alpha, int id);

/// Finite menu; the utility envelope is the max of its basis functions.
/// Basis functions are kept sorted by id.
struct Menu {
  std::vector<BasisFunction> basis;

  std::size_t size() const { return basis.size(); }
  bool empty() const { return basis.empty(); }
};

struct EnvelopeValue {
  double value = 0;
  int winner = -1;
};

/// max_i f_i(x), lowest id on ties.
EnvelopeValue utility_at(const Menu& menu, const Eigen::Vector2d& x);

/// Reservation utility for the reference contract: R(x) = <x, alpha> - p_ref.
geometry::Affine reference_reservation(const Eigen::Vector2d& alpha, double p_ref);

}  // namespace menuprune::model
