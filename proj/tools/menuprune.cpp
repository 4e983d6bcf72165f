// menuprune: solve the infinite-size menu, prune it, validate the pruners.
#include "menuprune/cli/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using menuprune::io::RunConfig;

enum class Exit { ok = 0, failure = 1, usage = 2 };

struct Overrides {
  std::string config;
  std::string output;
  std::vector<int> n;
  std::string metrics;
  bool protect = false;
  bool no_timing = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

RunConfig make_config(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) c = menuprune::io::load_config(o.config);
  if (!o.output.empty()) c.output = o.output;
  if (!o.n.empty()) c.n = o.n;
  if (!o.metrics.empty()) c.metrics = split_list(o.metrics);
  if (o.protect) c.protect_reservation = true;
  if (o.no_timing) c.timing = false;
  menuprune::io::validate(c);
  return c;
}

void common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("-o,--output", o.output, "output directory (overrides the config)");
  cmd->add_flag("--protect-reservation", o.protect, "keep the reservation contract as an unremovable basis function");
  cmd->add_flag("--no-timing", o.no_timing, "write zeros in every time column");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal menus of price contracts and their pruning to n contracts"};
  app.require_subcommand(1);

  Overrides o;
  bool compare_global = false;
  std::string metric;
  unsigned seed = 1;
  int menus = 10;
  std::string fault;

  auto* solve = app.add_subcommand("solve", "solve the discretized menu problem");
  common_options(solve, o);

  auto* prune = app.add_subcommand("prune", "prune a stored solution");
  common_options(prune, o);
  prune->add_option("--metric", metric, "linf, l1, jbased or onestep");
  prune->add_option("-n", o.n, "target menu sizes")->delimiter(',');
  prune->add_flag("--compare-global", compare_global, "also run the global-recompute descent");

  auto* sweep = app.add_subcommand("sweep", "solve, then prune with every metric");
  common_options(sweep, o);
  sweep->add_option("--metrics", o.metrics, "comma separated metrics");
  sweep->add_option("-n", o.n, "target menu sizes")->delimiter(',');
  sweep->add_flag("--compare-global", compare_global, "also run the global-recompute descent");

  auto* validate = app.add_subcommand("validate", "property checks on synthetic menus");
  validate->add_option("--seed", seed, "seed of the synthetic menus");
  validate->add_option("--menus", menus, "number of synthetic menus")->check(CLI::PositiveNumber);
  validate->add_option("--inject-fault", fault, "negative control")->check(CLI::IsMember({"skip-local-refresh"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      menuprune::cli::ValidateOptions vo;
      vo.seed = seed;
      vo.menus = menus;
      vo.skip_local_refresh = fault == "skip-local-refresh";
      const auto report = menuprune::cli::run_validate(vo);
      std::cout << report.dump(2) << '\n';
      return static_cast<int>(report.at("pass").get<bool>() ? Exit::ok : Exit::failure);
    }
    if (!metric.empty()) o.metrics = metric;
    const auto config = make_config(o);
    if (*solve || *sweep) menuprune::cli::run_solve(config, std::cerr);
    if (*prune || *sweep) menuprune::cli::run_prune(config, compare_global, std::cerr);
    return static_cast<int>(Exit::ok);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "menuprune: " << e.what() << '\n';
    return static_cast<int>(Exit::usage);
  } catch (const std::exception& e) {
    std::cerr << "menuprune: " << e.what() << '\n';
    return static_cast<int>(Exit::failure);
  }
}
