#include "menuprune/elasticity/market.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace menuprune::elasticity {
namespace {

// Guarded power for strictly positive bases.
double checked_pow(double base, double exponent, const char* what) {
  if (!(base >= 1e-12 && base <= 1e12))
    throw std::invalid_argument(std::string(what) + ": argument outside [1e-12, 1e12]");
  return std::exp(exponent * std::log(std::max(base, 1e-300)));
}

Eigen::Vector2d checked_pow(const Eigen::Vector2d& base, double exponent, const char* what) {
  return {checked_pow(base.x(), exponent, what), checked_pow(base.y(), exponent, what)};
}

}  // namespace

void validate(const MarketParams& m) {
  if (!(m.eta < 0 || (m.eta > 0 && m.eta <= 0.95)))
    throw std::invalid_argument("market: eta must lie in (-inf,0) U (0,0.95]");
  if (!(m.z_ref.array() > 0).all()) throw std::invalid_argument("market: reference prices must be positive");
  if (!(m.z_min.array() > 0).all()) throw std::invalid_argument("market: price lower bounds must be positive");
  if (!(m.z_min.array() <= m.z_max.array()).all()) throw std::invalid_argument("market: z_min exceeds z_max");
  for (const auto& e : m.poset) {
    if (e.lower < 0 || e.lower > 1 || e.upper < 0 || e.upper > 1 || e.lower == e.upper)
      throw std::invalid_argument("market: poset edge must relate two distinct periods");
    if (!(e.kappa > 0)) throw std::invalid_argument("market: kappa must be positive");
  }
  // with two periods a cycle is a pair of opposite edges
  for (const auto& a : m.poset)
    for (const auto& b : m.poset)
      if (a.lower == b.upper && a.upper == b.lower) throw std::invalid_argument("market: poset relation is cyclic");
}

double quality_exponent(double eta) { return -eta / (1 - eta); }

Eigen::Vector2d optimal_consumption(const Eigen::Vector2d& x_ref, const Eigen::Vector2d& z,
                                    const MarketParams& market) {
  if (!(z.array() > 0).all()) throw std::invalid_argument("optimal_consumption: prices must be positive");
  const Eigen::Vector2d ratio = z.cwiseQuotient(market.z_ref);
  return x_ref.cwiseProduct(checked_pow(ratio, -1 / (1 - market.eta), "optimal_consumption"));
}

double welfare(const Eigen::Vector2d& x_ref, double p, const Eigen::Vector2d& z, const MarketParams& market) {
  if (!(z.array() > 0).all()) throw std::invalid_argument("welfare: prices must be positive");
  const Eigen::Vector2d q = to_quality(z, market);
  return (1 / market.eta - 1) * x_ref.cwiseProduct(market.z_ref).dot(q) - p;
}

Eigen::Vector2d to_quality(const Eigen::Vector2d& z, const MarketParams& market) {
  if (!(z.array() > 0).all()) throw std::invalid_argument("to_quality: prices must be positive");
  return checked_pow(z.cwiseQuotient(market.z_ref), quality_exponent(market.eta), "to_quality");
}

Eigen::Vector2d from_quality(const Eigen::Vector2d& q, const MarketParams& market) {
  if (!(q.array() > 0).all()) throw std::invalid_argument("from_quality: qualities must be positive");
  return market.z_ref.cwiseProduct(checked_pow(q, 1 / quality_exponent(market.eta), "from_quality"));
}

std::vector<geometry::HalfPlaned> build_quality_set(const MarketParams& market) {
  validate(market);
  const double e = quality_exponent(market.eta);
  const Eigen::Vector2d a = checked_pow(market.z_min.cwiseQuotient(market.z_ref), e, "build_quality_set");
  const Eigen::Vector2d b = checked_pow(market.z_max.cwiseQuotient(market.z_ref), e, "build_quality_set");
  // e > 0 keeps the order of the bounds, e < 0 swaps it
  const Eigen::Vector2d lo = a.cwiseMin(b);
  const Eigen::Vector2d hi = a.cwiseMax(b);
  std::vector<geometry::HalfPlaned> out;
  int tag = -100;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d n = Eigen::Vector2d::Zero();
    n(k) = 1;
    out.push_back({n, hi(k), tag--});
    out.push_back({-n, -lo(k), tag--});
  }
  for (const auto& edge : market.poset) {
    const double ratio =
        checked_pow(edge.kappa * market.z_ref(edge.upper) / market.z_ref(edge.lower), e, "build_quality_set");
    Eigen::Vector2d n = Eigen::Vector2d::Zero();
    n(edge.lower) = 1;
    n(edge.upper) = -ratio;
    if (market.eta > 0) n = -n;  // q_lower >= ratio * q_upper
    out.push_back({n, 0.0, tag--});
  }
  geometry::Polygon region = geometry::Polygon::rectangle(lo, hi);
  for (const auto& h : out) region = geometry::clip(region, h);
  if (region.empty()) throw std::invalid_argument("build_quality_set: quality polytope is empty");
  return out;
}

Eigen::Vector2d quality_scale(const MarketParams& market) { return (1 / market.eta - 1) * market.z_ref; }

model::Instance build_instance(const MarketParams& market, const Eigen::AlignedBox2d& support, double p_min,
                               double p_max, double c2) {
  validate(market);
  if (!(c2 > 0)) throw std::invalid_argument("build_instance: cost must be strictly convex (c2 > 0)");
  if (!(p_min <= p_max)) throw std::invalid_argument("build_instance: empty price interval");
  if (!(support.min().array() > 0).all() || !(support.sizes().array() > 0).all())
    throw std::invalid_argument("build_instance: support must be a non-degenerate box in the positive orthant");
  model::Instance inst;
  inst.domain = geometry::Polygon::rectangle(support.min(), support.max());
  inst.density = 1.0 / support.volume();
  inst.eta = market.eta;
  inst.z_ref = market.z_ref;
  inst.p_ref = market.p_ref;
  inst.alpha = quality_scale(market);
  inst.cost.c2 = c2;
  inst.p_min = p_min;
  inst.p_max = p_max;
  inst.quality_set = build_quality_set(market);
  inst.reservation = model::reference_reservation(inst.alpha, market.p_ref);
  model::validate(inst);
  return inst;
}

}  // namespace menuprune::elasticity
