#include "menuprune/cli/synthetic.hpp"

#include "menuprune/elasticity/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace menuprune::cli {

model::Instance synthetic_instance() {
  elasticity::MarketParams m;
  m.eta = -0.1;
  m.z_ref = Eigen::Vector2d::Ones();
  m.p_ref = 0;
  m.z_min = Eigen::Vector2d::Constant(0.5);
  m.z_max = Eigen::Vector2d::Constant(2.0);
  return elasticity::build_instance(m, Eigen::AlignedBox2d(Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2)), -100, 100,
                                    0.5);
}

model::Menu random_menu(std::mt19937_64& rng, const model::Instance& instance, int count, double noise) {
  if (count < 1) throw std::invalid_argument("random_menu: count must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto box = instance.domain.bounding_box();

  const double angle = 3.141592653589793 * unit(rng);
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  const Eigen::Vector2d eig(0.2 + 0.8 * unit(rng), 0.2 + 0.8 * unit(rng));
  const Eigen::Matrix2d hess = rot * eig.asDiagonal() * rot.transpose();
  // largest |H x| over the box bounds the spread of the gradients
  const double spread = hess.norm() * box.max().norm();
  const Eigen::Vector2d base = instance.alpha;
  const double scale = 0.2 * instance.alpha.cwiseAbs().minCoeff() / std::max(spread, 1e-12);

  std::vector<int> ids(static_cast<std::size_t>(count));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);

  model::Menu menu;
  for (int k = 0; k < count; ++k) {
    const Eigen::Vector2d x = box.min() + box.sizes().cwiseProduct(Eigen::Vector2d(unit(rng), unit(rng)));
    // phi(x) = <base, x> + scale/2 x'Hx
    const Eigen::Vector2d g = base + scale * hess * x;
    const double phi = base.dot(x) + 0.5 * scale * x.dot(hess * x);
    model::BasisFunction f;
    f.gradient = g;
    f.intercept = phi - g.dot(x) - noise * unit(rng);
    f.id = ids[static_cast<std::size_t>(k)];
    menu.basis.push_back(f);
  }
  std::sort(menu.basis.begin(), menu.basis.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return menu;
}

}  // namespace menuprune::cli
