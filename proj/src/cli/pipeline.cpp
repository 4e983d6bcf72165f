#include "menuprune/cli/pipeline.hpp"

#include "menuprune/io/csv.hpp"
#include "menuprune/solver/discretized.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

namespace menuprune::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

SolveSummary run_solve(const io::RunConfig& config, std::ostream& log) {
  const auto instance = config.instance.build();
  const auto t0 = std::chrono::steady_clock::now();
  const auto problem = solver::discretize(instance, config.grid);
  SolveSummary s;
  s.solution = solver::solve_infinite_menu(problem, config.solver);
  s.seconds = seconds_since(t0);
  const auto& sol = s.solution;
  log << "solve: grid " << config.grid << ", objective " << io::format_double(sol.objective) << ", gap "
      << io::format_double(sol.fw_gap) << ", " << sol.iterations << " iterations\n";

  fs::create_directories(config.output);
  io::write_solution(config.output / "solution.csv", sol);
  s.menu.basis = solver::extract_basis(sol, instance, config.dedup_tol);
  s.j_ref = pruning::lifted_revenue(instance, s.menu);
  {
    std::ofstream out(config.output / "jref.txt", std::ios::binary);
    out << io::format_double(s.j_ref) << '\n';
  }
  write_json(config.output / "solve_info.json",
             {{"grid", config.grid},
              {"objective", sol.objective},
              {"fw_gap", sol.fw_gap},
              {"iterations", sol.iterations},
              {"converged", sol.converged},
              {"message", sol.message},
              {"ic_residual", sol.ic_residual},
              {"participation_residual", sol.participation_residual},
              {"menu_size", s.menu.size()},
              {"j_ref", s.j_ref},
              {"seconds", config.timing ? s.seconds : 0.0}});
  if (!sol.converged) throw PipelineError("solver did not converge: " + sol.message);
  return s;
}

model::Menu load_menu(const io::RunConfig& config, const model::Instance& instance) {
  const auto path = config.output / "solution.csv";
  const auto sol = io::read_solution(path);
  model::Menu menu;
  menu.basis = solver::extract_basis(sol, instance, config.dedup_tol);
  if (config.protect_reservation) {
    auto r = instance.reservation;
    r.id = menu.basis.empty() ? 0 : menu.basis.back().id + 1;
    menu.basis.push_back(r);
  }
  return menu;
}

double load_jref(const fs::path& dir) {
  return std::stod(io::read_file(dir / "jref.txt"));
}

MetricRun descend(const model::Menu& menu, const std::string& metric, const model::Instance& instance,
                  double j_ref, bool compare_global, const std::vector<int>& protected_ids) {
  MetricRun run;
  run.metric = metric;
  pruning::PruneOptions opt;
  opt.protected_ids = protected_ids;
  const bool onestep = metric == "onestep";
  const auto kind = onestep ? pruning::Metric::jbased : pruning::parse_metric(metric);
  auto t0 = std::chrono::steady_clock::now();
  auto res = onestep ? pruning::prune_onestep(menu, 1, kind, instance, opt) : pruning::prune(menu, 1, kind, instance, opt);
  run.seconds = seconds_since(t0);
  run.trace = std::move(res.trace);
  run.order = run.trace.removal_order();
  run.losses = pruning::evaluate_losses(instance, menu, run.order, j_ref, &run.trace);

  if (compare_global && !onestep) {
    opt.global_recompute = true;
    t0 = std::chrono::steady_clock::now();
    const auto global = pruning::prune(menu, 1, kind, instance, opt);
    run.global_seconds = seconds_since(t0);
    run.global_checked = true;
    run.global_same_order = global.trace.removal_order() == run.order;
    run.global_ms.push_back(0);
    for (const auto& r : global.trace.records) run.global_ms.push_back(r.ms_cum);
  }
  return run;
}

std::vector<MetricRun> run_prune(const io::RunConfig& config, bool compare_global, std::ostream& log) {
  const auto instance = config.instance.build();
  const auto menu = load_menu(config, instance);
  const double j_ref = load_jref(config.output);
  std::vector<int> protected_ids;
  if (config.protect_reservation) protected_ids.push_back(menu.basis.back().id);
  log << "prune: " << menu.size() << " contracts, J_ref " << io::format_double(j_ref) << '\n';

  std::vector<MetricRun> runs;
  json info = {{"menu_size", menu.size()}, {"j_ref", j_ref}, {"protect_reservation", config.protect_reservation}};
  for (const auto& metric : config.metrics) {
    auto run = descend(menu, metric, instance, j_ref, compare_global, protected_ids);
    const auto dir = config.output / metric;
    fs::create_directories(dir);

    json sizes = json::object();
    for (int n : config.n) {
      const auto full = static_cast<int>(menu.size());
      const auto k = static_cast<std::size_t>(std::max(0, std::min(full - n, static_cast<int>(run.order.size()))));
      const auto m = pruning::menu_after(menu, run.order, k);
      const auto cx = model::build_complex(m, instance.domain);
      io::write_menu(dir / ("menu_" + std::to_string(n) + ".csv"), m, instance.alpha);
      io::write_cells(dir / ("cells_" + std::to_string(n) + ".csv"), cx);
      const auto& row = run.losses[k];
      sizes[std::to_string(n)] = {{"size", row.size}, {"cells", cx.cells.size()}, {"loss", row.loss}};
      log << "  " << metric << " n=" << row.size << " loss " << io::format_double(row.loss) << '\n';
    }
    io::write_trace(dir / "trace.csv", run.trace, config.timing);

    std::vector<io::LossCurveRow> rows;
    for (std::size_t k = 0; k < run.losses.size(); ++k) {
      const auto& l = run.losses[k];
      io::LossCurveRow r{l.size, l.loss, l.shift, config.timing ? l.ms_cum : 0.0, 0.0};
      if (run.global_checked && config.timing && k < run.global_ms.size()) r.global_ms = run.global_ms[k];
      rows.push_back(r);
    }
    io::write_losses(dir / "losses.csv", rows, run.global_checked);

    json entry = {{"sizes", sizes},
                  {"lp_solves", run.trace.lp_solves},
                  {"vrep_calls", run.trace.vrep_calls},
                  {"max_neighbors", run.trace.max_neighbors},
                  {"seconds", config.timing ? run.seconds : 0.0}};
    if (run.global_checked) {
      entry["global_same_order"] = run.global_same_order;
      entry["global_seconds"] = config.timing ? run.global_seconds : 0.0;
      if (!run.global_same_order) log << "  warning: " << metric << " local and global removal orders differ\n";
    }
    info[metric] = entry;
    runs.push_back(std::move(run));
  }
  write_json(config.output / "prune_info.json", info);
  return runs;
}

}  // namespace menuprune::cli
