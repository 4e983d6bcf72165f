#include "menuprune/cli/pipeline.hpp"
#include "menuprune/cli/synthetic.hpp"
#include "menuprune/model/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace menuprune::cli {

using nlohmann::json;

namespace {

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

double envelope_integral(const model::Menu& menu, const model::Complex& cx) {
  double s = 0;
  for (const auto& cell : cx.cells) {
    const auto* f = &menu.basis.front();
    for (const auto& g : menu.basis)
      if (g.id == cell.id) f = &g;
    s += geometry::integrate_affine(cell.polygon, *f);
  }
  return s;
}

model::Menu without(const model::Menu& menu, int id) {
  model::Menu out;
  for (const auto& f : menu.basis)
    if (f.id != id) out.basis.push_back(f);
  return out;
}

std::vector<model::Menu> menus_for(const ValidateOptions& options, const model::Instance& instance, double noise,
                                   unsigned salt) {
  std::mt19937_64 rng(options.seed + salt);
  std::uniform_int_distribution<int> size(10, 30);
  std::vector<model::Menu> out;
  for (int k = 0; k < options.menus; ++k) out.push_back(random_menu(rng, instance, size(rng), noise));
  return out;
}

json check_equivalence(const std::vector<model::Menu>& menus, const model::Instance& instance, bool fault) {
  json per_metric = json::object();
  bool pass = true;
  for (const auto metric : {pruning::Metric::l1, pruning::Metric::jbased, pruning::Metric::linf}) {
    int mismatches = 0;
    double worst = 0;
    for (const auto& menu : menus) {
      pruning::PruneOptions local, global;
      local.skip_local_refresh = fault;
      global.global_recompute = true;
      const auto a = pruning::prune(menu, 1, metric, instance, local).trace;
      const auto b = pruning::prune(menu, 1, metric, instance, global).trace;
      bool same = a.removal_order() == b.removal_order();
      for (std::size_t t = 0; same && t < a.records.size(); ++t) {
        const double d = std::abs(a.records[t].nu - b.records[t].nu) / std::max(1.0, std::abs(b.records[t].nu));
        worst = std::max(worst, d);
        same = d <= 1e-9;
      }
      if (!same) ++mismatches;
    }
    per_metric[pruning::to_string(metric)] = {{"menus", menus.size()}, {"mismatches", mismatches}, {"max_rel_nu_diff", worst}};
    pass = pass && mismatches == 0;
  }
  return {{"name", "local_global_equivalence"}, {"pass", pass}, {"metrics", per_metric}};
}

json check_locality(const std::vector<model::Menu>& menus, const model::Instance& instance) {
  // removing r leaves nu_i unchanged for every i outside r's neighbourhood
  // (menus without dominated contracts)
  long checked = 0, failures = 0;
  for (const auto& menu : menus) {
    const auto cx = model::build_complex(menu, instance.domain);
    if (!cx.empty_ids.empty()) continue;
    const auto nu = pruning::importances(menu, pruning::Metric::l1, instance);
    for (const auto& cell : cx.cells) {
      const auto reduced = without(menu, cell.id);
      const auto nu_r = pruning::importances(reduced, pruning::Metric::l1, instance);
      std::size_t k = 0;
      for (std::size_t p = 0; p < menu.size(); ++p) {
        const int id = menu.basis[p].id;
        if (id == cell.id) continue;
        const double after = nu_r[k++];
        if (std::binary_search(cell.neighbors.begin(), cell.neighbors.end(), id)) continue;
        if (std::isinf(nu[p]) || std::isinf(after)) continue;
        ++checked;
        if (!close(nu[p], after, 1e-9)) ++failures;
      }
    }
  }
  return {{"name", "neighbourhood_locality"}, {"pass", failures == 0 && checked > 0}, {"checked", checked}, {"failures", failures}};
}

json check_lp_support(const std::vector<model::Menu>& menus, const model::Instance& instance) {
  // dropping rows with zero multiplier and positive slack keeps the optimum
  long solved = 0, failures = 0;
  const auto domain = pruning::Polytope::from_polygon(instance.domain);
  for (const auto& menu : menus) {
    const auto planes = pruning::PlaneFamily::from_basis(menu.basis);
    std::vector<int> live(planes.size());
    for (std::size_t k = 0; k < live.size(); ++k) live[k] = static_cast<int>(k);
    for (int i : live) {
      const auto lp = pruning::linf_program(planes, live, i, domain);
      const auto sol = lp::solve_lp(lp);
      ++solved;
      if (sol.status != lp::LpStatus::optimal) {
        ++failures;
        continue;
      }
      std::vector<Eigen::Index> keep;
      for (Eigen::Index r = 0; r < lp.A.rows(); ++r) {
        const double slack = lp.b(r) - lp.A.row(r).dot(sol.primal);
        if (sol.duals(r) > 0 || slack <= 1e-8) keep.push_back(r);
      }
      auto reduced = lp;
      reduced.A = lp.A(keep, Eigen::all);
      reduced.b = lp.b(keep);
      const auto again = lp::solve_lp(reduced);
      ++solved;
      if (again.status != lp::LpStatus::optimal || std::abs(again.value - sol.value) > 1e-9) ++failures;
    }
  }
  return {{"name", "lp_dual_support"}, {"pass", failures == 0}, {"lps", solved}, {"failures", failures}};
}

json check_metric_consistency(const std::vector<model::Menu>& menus, const model::Instance& instance) {
  long checked = 0, failures = 0;
  double worst_l1 = 0, worst_j = 0;
  for (const auto& menu : menus) {
    const auto cx = model::build_complex(menu, instance.domain);
    const double area_full = envelope_integral(menu, cx);
    const double j_full = model::revenue(instance, menu, cx);
    const auto nu_l1 = pruning::importances(menu, pruning::Metric::l1, instance);
    const auto nu_j = pruning::importances(menu, pruning::Metric::jbased, instance);
    for (std::size_t p = 0; p < menu.size(); ++p) {
      if (std::isinf(nu_l1[p])) continue;
      const auto reduced = without(menu, menu.basis[p].id);
      const auto cr = model::build_complex(reduced, instance.domain);
      const double d_l1 = area_full - envelope_integral(reduced, cr);
      const double d_j = j_full - model::revenue(instance, reduced, cr);
      const double e1 = std::abs(nu_l1[p] - d_l1) / std::max(std::abs(d_l1), 1e-6 * std::abs(area_full));
      const double ej = std::abs(nu_j[p] - d_j) / std::max(std::abs(d_j), 1e-6 * std::abs(j_full));
      worst_l1 = std::max(worst_l1, e1);
      worst_j = std::max(worst_j, ej);
      ++checked;
      if (e1 > 1e-8 || ej > 1e-8) ++failures;
    }
  }
  return {{"name", "metric_consistency"}, {"pass", failures == 0}, {"checked", checked},
          {"max_rel_err_l1", worst_l1}, {"max_rel_err_j", worst_j}};
}

json check_monotone(const std::vector<model::Menu>& menus, const model::Instance& instance, unsigned seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto box = instance.domain.bounding_box();
  long violations = 0;
  for (const auto& menu : menus) {
    const auto order = pruning::prune(menu, 1, pruning::Metric::l1, instance).trace.removal_order();
    for (int s = 0; s < 200; ++s) {
      const Eigen::Vector2d x = box.min() + box.sizes().cwiseProduct(Eigen::Vector2d(unit(rng), unit(rng)));
      double prev = model::utility_at(menu, x).value;
      for (std::size_t k = 1; k <= order.size(); ++k) {
        const double u = model::utility_at(pruning::menu_after(menu, order, k), x).value;
        if (u > prev + 1e-12) ++violations;
        prev = u;
      }
    }
  }
  return {{"name", "envelope_monotone"}, {"pass", violations == 0}, {"violations", violations}};
}

json check_counters(const std::vector<model::Menu>& menus, const model::Instance& instance) {
  json rows = json::array();
  bool pass = true;
  for (const auto metric : {pruning::Metric::linf, pruning::Metric::l1, pruning::Metric::jbased}) {
    long worst_slack = 0;
    int worst_m = 0;
    bool ok = true;
    for (const auto& menu : menus) {
      const auto t = pruning::prune(menu, 1, metric, instance).trace;
      const long m = std::max(1, t.max_neighbors);
      const long sigma = t.initial_size;
      const long used = metric == pruning::Metric::linf ? t.lp_solves : t.vrep_calls;
      const long bound = metric == pruning::Metric::linf ? 3 * m * sigma : 3 * m * m * sigma;
      ok = ok && used <= bound;
      worst_m = std::max<int>(worst_m, static_cast<int>(m));
      worst_slack = std::max(worst_slack, used - bound);
    }
    rows.push_back({{"metric", pruning::to_string(metric)},
                    {"counter", metric == pruning::Metric::linf ? "lp_solves" : "vrep_calls"},
                    {"max_m", worst_m},
                    {"pass", ok}});
    pass = pass && ok;
  }
  return {{"name", "counter_bounds"}, {"pass", pass}, {"metrics", rows}};
}

}  // namespace

json run_validate(const ValidateOptions& options) {
  const auto instance = synthetic_instance();
  const auto menus = menus_for(options, instance, 0.05, 0);
  const auto tangent = menus_for(options, instance, 0.0, 1);
  json props = json::array();
  props.push_back(check_equivalence(menus, instance, options.skip_local_refresh));
  props.push_back(check_locality(tangent, instance));
  props.push_back(check_lp_support(menus, instance));
  props.push_back(check_metric_consistency(menus, instance));
  props.push_back(check_monotone(menus, instance, options.seed));
  props.push_back(check_counters(menus, instance));
  bool pass = true;
  for (const auto& p : props) pass = pass && p.at("pass").get<bool>();
  return {{"seed", options.seed},
          {"menus", options.menus},
          {"fault", options.skip_local_refresh ? "skip-local-refresh" : "none"},
          {"properties", props},
          {"pass", pass}};
}

}  // namespace menuprune::cli
