#pragma once

#include "menuprune/geometry/polygon.hpp"
#include "menuprune/model/instance.hpp"

#include <Eigen/Geometry>

#include <vector>

namespace menuprune::elasticity {

/// z[lower] <= kappa * z[upper]
struct PosetEdge {
  int lower = 0;
  int upper = 1;
  double kappa = 1;
};

/// Isoelastic two-period market with reference prices (p_ref, z_ref).
/// Prices are in whatever consistent units the caller chooses.
struct MarketParams {
  double eta = -0.1;
  Eigen::Vector2d z_ref = Eigen::Vector2d::Ones();
  double p_ref = 0;
  Eigen::Vector2d z_min = Eigen::Vector2d::Constant(0.5);
  Eigen::Vector2d z_max = Eigen::Vector2d::Constant(2.0);
  std::vector<PosetEdge> poset;
};

/// Throws std::invalid_argument on eta outside (-inf,0) U (0,0.95], non-positive
/// prices, z_min > z_max, non-positive kappa or a cyclic poset.
void validate(const MarketParams& market);

/// -eta / (1 - eta): exponent of z / z_ref in the quality variable.
double quality_exponent(double eta);

/// Consumption maximizing welfare: x_ref * (z / z_ref)^(-1/(1-eta)).
Eigen::Vector2d optimal_consumption(const Eigen::Vector2d& x_ref, const Eigen::Vector2d& z,
                                    const MarketParams& market);

/// (1/eta - 1) * sum_k x_ref_k z_ref_k (z_k / z_ref_k)^(-eta/(1-eta)) - p
double welfare(const Eigen::Vector2d& x_ref, double p, const Eigen::Vector2d& z, const MarketParams& market);

Eigen::Vector2d to_quality(const Eigen::Vector2d& z, const MarketParams& market);
Eigen::Vector2d from_quality(const Eigen::Vector2d& q, const MarketParams& market);

/// Image of the price polytope Z under to_quality.
std::vector<geometry::HalfPlaned> build_quality_set(const MarketParams& market);

/// alpha = (1/eta - 1) z_ref.
Eigen::Vector2d quality_scale(const MarketParams& market);

/// Monopolist instance with uniform density on `support` and C(E) = c2 E^2.
/// The reservation utility is the reference contract (q = 1, p = p_ref).
model::Instance build_instance(const MarketParams& market, const Eigen::AlignedBox2d& support, double p_min,
                               double p_max, double c2);

}  // namespace menuprune::elasticity
