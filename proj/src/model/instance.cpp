#include "menuprune/model/instance.hpp"

#include <cmath>
#include <stdexcept>

namespace menuprune::model {

bool Instance::quality_feasible(const Eigen::Vector2d& q, double tol) const {
  for (const auto& h : quality_set)
    if (h.violation(q) > tol * std::max(1.0, h.normal.norm())) return false;
  return true;
}

Polygon Instance::quality_region() const {
  const double big = 1e6;
  Polygon q = Polygon::rectangle({-big, -big}, {big, big});
  const auto tol = geometry::Tolerance<double>::for_scale(1.0);
  for (const auto& h : quality_set) q = geometry::clip(q, h, tol);
  return q;
}

void validate(const Instance& instance) {
  if (instance.domain.empty() || !(instance.domain.area() > 0))
    throw std::invalid_argument("instance: domain has zero area");
  if (!(instance.density > 0) || std::abs(instance.density * instance.domain.area() - 1) > 1e-9)
    throw std::invalid_argument("instance: density must integrate to one over the domain");
  if (!(instance.eta < 0 || (instance.eta > 0 && instance.eta <= 1)))
    throw std::invalid_argument("instance: eta must lie in (-inf,0) U (0,1]");
  if (!(instance.z_ref.array() > 0).all()) throw std::invalid_argument("instance: reference prices must be positive");
  if (!(instance.cost.c2 >= 0)) throw std::invalid_argument("instance: cost coefficient must be nonnegative");
  if (!(instance.p_min <= instance.p_max)) throw std::invalid_argument("instance: empty price interval");
  if (!instance.alpha.allFinite() || (instance.alpha.array() == 0).any())
    throw std::invalid_argument("instance: alpha must be finite and nonzero");
  for (const auto& h : instance.quality_set)
    if (!h.valid()) throw std::invalid_argument("instance: degenerate quality half-plane");
  if (instance.quality_region().empty()) throw std::invalid_argument("instance: quality set is empty");
}

Contract to_contract(const BasisFunction& f, const Eigen::Vector2d& alpha) {
  return {-f.intercept, f.gradient.cwiseQuotient(alpha)};
}

BasisFunction to_basis(const Contract& c, const Eigen::Vector2d& alpha, int id) {
  return {alpha.cwiseProduct(c.q), -c.p, id};
}

EnvelopeValue utility_at(const Menu& menu, const Eigen::Vector2d& x) {
  EnvelopeValue best;
  for (const auto& f : menu.basis) {
    const double v = f(x);
    if (best.winner < 0 || v > best.value || (v == best.value && f.id < best.winner)) {
      best.value = v;
      best.winner = f.id;
    }
  }
  return best;
}

geometry::Affine reference_reservation(const Eigen::Vector2d& alpha, double p_ref) {
  return {alpha, -p_ref, -1};
}

}  // namespace menuprune::model
