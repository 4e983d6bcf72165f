#pragma once

#include "menuprune/elasticity/market.hpp"
#include "menuprune/model/instance.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <vector>

namespace menuprune::io {

/// Market instance as stored on disk. Prices z (EUR/kWh) and c2 are
/// multiplied by price_scale when the model is built; p is in currency.
struct InstanceSpec {
  double eta = -0.1;
  double p_check = 140;
  Eigen::Vector2d z_check{0.174, 0.19};
  double c2 = 0.01;
  Eigen::Vector2d p_bounds{0, 500};
  Eigen::Vector2d z_lower{0.05, 0.05};
  Eigen::Vector2d z_upper{0.5, 0.5};
  std::vector<elasticity::PosetEdge> poset;
  Eigen::AlignedBox2d rho_rect{Eigen::Vector2d(0.6, 1.4), Eigen::Vector2d(1.8, 4.2)};
  /// Explicit R(x) in model units; empty means the reference contract.
  std::optional<geometry::Affine> reservation;
  double price_scale = 1000;

  elasticity::MarketParams market() const;
  model::Instance build() const;
};

/// The two-period residential instance used throughout the experiments.
InstanceSpec table1();

nlohmann::json to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const nlohmann::json& j);

InstanceSpec load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const InstanceSpec& spec);

/// Reads a whole file; throws std::runtime_error naming the path on failure.
std::string read_file(const std::filesystem::path& path);

}  // namespace menuprune::io
