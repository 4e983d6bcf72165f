#pragma once

#include "menuprune/io/instance_json.hpp"
#include "menuprune/solver/menu_solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace menuprune::io {

struct RunConfig {
  InstanceSpec instance = table1();
  int grid = 20;
  std::vector<int> n{25, 10};
  std::vector<std::string> metrics{"linf", "l1", "jbased", "onestep"};
  unsigned seed = 1;
  std::filesystem::path output = "out";
  bool protect_reservation = false;
  double dedup_tol = 1e-6;
  solver::SolveOptions solver;
  /// Write measured times; when false every time column is zero so reruns
  /// are byte-identical.
  bool timing = true;
};

/// Throws std::invalid_argument on n < 1, grid < 2 or an unknown metric.
void validate(const RunConfig& config);

/// `instance` may be an object or a path relative to the config file.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

}  // namespace menuprune::io
