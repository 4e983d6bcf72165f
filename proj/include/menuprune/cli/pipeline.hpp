#pragma once

#include "menuprune/io/config.hpp"
#include "menuprune/pruning/prune.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace menuprune::cli {

/// Reported failure of a pipeline stage (the CLI maps it to exit code 1).
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveSummary {
  solver::MenuSolution solution;
  model::Menu menu;
  double j_ref = 0;
  double seconds = 0;
};

/// Solves on the grid and writes solution.csv, jref.txt and solve_info.json
/// into config.output. Throws PipelineError when the solver does not converge
/// (the files are written first).
SolveSummary run_solve(const io::RunConfig& config, std::ostream& log);

/// Extracted menu of a stored solution, plus the reservation contract (id one
/// above the largest) when protection is on.
model::Menu load_menu(const io::RunConfig& config, const model::Instance& instance);
double load_jref(const std::filesystem::path& dir);

struct MetricRun {
  std::string metric;
  std::vector<int> order;
  pruning::PruneTrace trace;
  std::vector<pruning::LossRow> losses;
  double seconds = 0;
  /// Set with compare_global.
  bool global_checked = false;
  bool global_same_order = false;
  std::vector<double> global_ms;
  double global_seconds = 0;
};

/// Full greedy (or one-step) descent of `menu`, then lifted losses at every size.
MetricRun descend(const model::Menu& menu, const std::string& metric, const model::Instance& instance,
                  double j_ref, bool compare_global, const std::vector<int>& protected_ids = {});

/// For every metric writes <output>/<metric>/{menu_n,cells_n,trace,losses}.csv
/// and a prune_info.json summary. Needs solution.csv and jref.txt in output.
std::vector<MetricRun> run_prune(const io::RunConfig& config, bool compare_global, std::ostream& log);

struct ValidateOptions {
  unsigned seed = 1;
  int menus = 10;
  bool skip_local_refresh = false;
};

/// Property suites on synthetic menus. The report has one entry per property
/// with a boolean "pass" and a top-level "pass".
nlohmann::json run_validate(const ValidateOptions& options);

}  // namespace menuprune::cli
