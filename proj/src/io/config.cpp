#include "menuprune/io/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace menuprune::io {

using nlohmann::json;

void validate(const RunConfig& c) {
  if (c.grid < 2) throw std::invalid_argument("config: grid must be at least 2");
  for (int n : c.n)
    if (n < 1) throw std::invalid_argument("config: every n must be at least 1");
  static const std::vector<std::string> known{"linf", "l1", "jbased", "onestep"};
  for (const auto& m : c.metrics)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw std::invalid_argument("config: unknown metric '" + m + "'");
  if (!(c.dedup_tol >= 0)) throw std::invalid_argument("config: dedup_tol must be non-negative");
  if (!(c.solver.tol > 0) || c.solver.max_iter < 1) throw std::invalid_argument("config: bad solver settings");
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  if (j.contains("instance")) {
    const auto& inst = j.at("instance");
    if (inst.is_string()) {
      std::filesystem::path p = inst.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.instance = load_instance(p);
    } else {
      c.instance = instance_from_json(inst);
    }
  }
  c.grid = j.value("grid", c.grid);
  if (j.contains("n")) {
    const auto& n = j.at("n");
    c.n = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
  }
  if (j.contains("metrics")) c.metrics = j.at("metrics").get<std::vector<std::string>>();
  c.seed = j.value("seed", c.seed);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  c.protect_reservation = j.value("protect_reservation", c.protect_reservation);
  c.dedup_tol = j.value("dedup_tol", c.dedup_tol);
  c.timing = j.value("timing", c.timing);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
    const auto method = s.value("method", std::string("interior_point"));
    if (method == "interior_point")
      c.solver.method = solver::Method::interior_point;
    else if (method == "frank_wolfe")
      c.solver.method = solver::Method::frank_wolfe;
    else
      throw std::invalid_argument("config: unknown solver method '" + method + "'");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(json::parse(read_file(path)), path.parent_path());
}

json to_json(const RunConfig& c) {
  return {
      {"instance", to_json(c.instance)},
      {"grid", c.grid},
      {"n", c.n},
      {"metrics", c.metrics},
      {"seed", c.seed},
      {"output", c.output.string()},
      {"protect_reservation", c.protect_reservation},
      {"dedup_tol", c.dedup_tol},
      {"timing", c.timing},
      {"solver",
       {{"tol", c.solver.tol},
        {"max_iter", c.solver.max_iter},
        {"method", c.solver.method == solver::Method::interior_point ? "interior_point" : "frank_wolfe"}}},
  };
}

}  // namespace menuprune::io
