#include "menuprune/pruning/prune.hpp"

#include "menuprune/model/revenue.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

namespace menuprune::pruning {

using model::BasisFunction;
using model::Polygon;

double importance_l1(const BasisFunction& fi, const Polygon& cell, std::span<const Future> futures,
                     std::span<const BasisFunction> basis_by_future) {
  if (futures.size() != basis_by_future.size()) throw std::invalid_argument("importance_l1: misaligned futures");
  double nu = 0;
  if (cell.empty()) return nu;
  for (std::size_t k = 0; k < futures.size(); ++k) {
    const auto region = geometry::intersect(futures[k].polygon, cell);
    if (region.empty()) continue;
    const auto& fj = basis_by_future[k];
    nu += geometry::integrate_affine(region, geometry::Affine{fi.gradient - fj.gradient, fi.intercept - fj.intercept, fi.id});
  }
  return nu;
}

RevenueDelta revenue_delta(const model::Instance& instance, const BasisFunction& fi, const Polygon& cell,
                           std::span<const Future> futures, std::span<const BasisFunction> basis_by_future) {
  if (futures.size() != basis_by_future.size()) throw std::invalid_argument("revenue_delta: misaligned futures");
  RevenueDelta d;
  if (cell.empty()) return d;
  const auto li = model::revenue_integrand(instance, fi);
  const auto mi = model::consumption_integrand(instance, fi);
  for (std::size_t k = 0; k < futures.size(); ++k) {
    const auto region = geometry::intersect(futures[k].polygon, cell);
    if (region.empty()) continue;
    const auto lj = model::revenue_integrand(instance, basis_by_future[k]);
    const auto mj = model::consumption_integrand(instance, basis_by_future[k]);
    d.d_invoice += geometry::integrate_affine(region, geometry::Affine{li.gradient - lj.gradient, li.intercept - lj.intercept, fi.id});
    d.d_consumption += geometry::integrate_affine(region, geometry::Affine{mj.gradient - mi.gradient, mj.intercept - mi.intercept, fi.id});
  }
  return d;
}

double importance_j(const model::Instance& instance, const RevenueDelta& delta, double m0) {
  return delta.d_invoice - instance.cost(m0) + instance.cost(m0 + delta.d_consumption);
}

namespace {

void insert_sorted(std::vector<int>& v, int x) {
  const auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

void erase_sorted(std::vector<int>& v, int x) {
  const auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

// Positions index the menu sorted by id, so position order is id order.
class LocalPruner {
 public:
  LocalPruner(const model::Menu& menu, Metric metric, const model::Instance& instance, const PruneOptions& options)
      : metric_(metric), instance_(instance), options_(options), basis_(menu.basis) {
    if (metric == Metric::linf) throw std::invalid_argument("local pruning handles the L1 and revenue metrics");
    if (basis_.empty()) throw std::invalid_argument("pruning: empty menu");
    std::sort(basis_.begin(), basis_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t k = 1; k < basis_.size(); ++k)
      if (basis_[k].id == basis_[k - 1].id) throw std::invalid_argument("pruning: duplicate basis ids");
    const std::size_t n = basis_.size();
    alive_.assign(n, 1);
    protected_.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p)
      protected_[p] = std::find(options.protected_ids.begin(), options.protected_ids.end(), basis_[p].id) !=
                      options.protected_ids.end();
    cell_.resize(n);
    own_.resize(n);
    rev_.resize(n);
    nu_.assign(n, 0.0);
    delta_.resize(n);
    empty_dependent_.assign(n, 0);
    threads_ = worker_count(options.threads);
    rebuild_live();
  }

  PruneResult run(int n) {
    if (n < 1) throw std::invalid_argument("pruning: n must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();
    PruneResult out;
    out.trace.initial_size = static_cast<int>(basis_.size());
    full_rebuild();
    refresh(live_nonempty());
    int iteration = 0;
    while (static_cast<int>(live_.size()) > n && live_.size() > 1) {
      const int r = pick();
      if (r < 0) break;
      IterationRecord rec;
      rec.iteration = ++iteration;
      rec.removed_id = basis_[static_cast<std::size_t>(r)].id;
      rec.nu = cell_[static_cast<std::size_t>(r)].empty() ? 0.0 : nu_[static_cast<std::size_t>(r)];
      remove(r);
      rec.vrep_calls_cum = vrep_;
      rec.ms_cum = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      out.trace.records.push_back(rec);
    }
    out.trace.vrep_calls = vrep_;
    out.trace.max_neighbors = max_neighbors_;
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p]) out.menu.basis.push_back(basis_[p]);
    return out;
  }

  /// Importance of every contract on the full complex.
  std::vector<double> initial_importance(long* vrep_calls) {
    full_rebuild();
    refresh(live_nonempty());
    if (vrep_calls) *vrep_calls = vrep_;
    std::vector<double> out(basis_.size(), 0.0);
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (!cell_[p].empty()) out[p] = nu_[p];
    return out;
  }

 private:
  void rebuild_live() {
    live_.clear();
    live_index_.assign(basis_.size(), -1);
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      if (!alive_[p]) continue;
      live_index_[p] = static_cast<int>(live_.size());
      live_.push_back(basis_[p]);
    }
  }

  std::vector<int> live_nonempty() const {
    std::vector<int> out;
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p] && !cell_[p].empty()) out.push_back(static_cast<int>(p));
    return out;
  }

  Polygon compute_cell(int p) const {
    return geometry::cell_vrep(std::span<const BasisFunction>(live_), static_cast<std::size_t>(live_index_[p]),
                               instance_.domain)
        .polygon;
  }

  Polygon compute_future(int j, int i) const {
    return geometry::cell_vrep(std::span<const BasisFunction>(live_), static_cast<std::size_t>(live_index_[j]),
                               instance_.domain, static_cast<std::size_t>(live_index_[i]))
        .polygon;
  }

  std::vector<int> touching(int p) const {
    std::vector<int> out;
    const auto& cell = cell_[static_cast<std::size_t>(p)];
    if (cell.empty()) return out;
    for (int id : model::touching_ids(live_, static_cast<std::size_t>(live_index_[p]), cell)) {
      const int q = pos_of(id);
      if (!cell_[static_cast<std::size_t>(q)].empty()) out.push_back(q);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  int pos_of(int id) const {
    const auto it = std::lower_bound(basis_.begin(), basis_.end(), id, [](const auto& f, int v) { return f.id < v; });
    return static_cast<int>(it - basis_.begin());
  }

  std::vector<int> neighbors(int p) const {
    std::vector<int> out;
    const auto& a = own_[static_cast<std::size_t>(p)];
    const auto& b = rev_[static_cast<std::size_t>(p)];
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  void set_own(int p, std::vector<int> fresh) {
    for (int k : own_[static_cast<std::size_t>(p)]) erase_sorted(rev_[static_cast<std::size_t>(k)], p);
    for (int k : fresh) insert_sorted(rev_[static_cast<std::size_t>(k)], p);
    own_[static_cast<std::size_t>(p)] = std::move(fresh);
  }

  double consumption_total() const {
    double m = 0;
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p] && !cell_[p].empty())
        m += geometry::integrate_affine(cell_[p], model::consumption_integrand(instance_, basis_[p]));
    return m;
  }

  void full_rebuild() {
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      own_[p].clear();
      rev_[p].clear();
      if (!alive_[p]) continue;
      cell_[p] = compute_cell(static_cast<int>(p));
      ++vrep_;
    }
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p]) set_own(static_cast<int>(p), touching(static_cast<int>(p)));
    if (metric_ == Metric::jbased) m0_ = consumption_total();
  }

  void refresh(const std::vector<int>& todo) {
    std::vector<long> calls(todo.size(), 0);
    std::vector<int> sizes(todo.size(), 0);
    std::vector<int> empties;
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p] && cell_[p].empty()) empties.push_back(static_cast<int>(p));
    detail::parallel_for(todo.size(), threads_, [&](std::size_t t) {
      const int i = todo[t];
      const auto nb = neighbors(i);
      sizes[t] = static_cast<int>(nb.size());
      std::vector<Future> futures;
      std::vector<BasisFunction> fb;
      for (int j : nb) {
        futures.push_back({basis_[static_cast<std::size_t>(j)].id, compute_future(j, i)});
        fb.push_back(basis_[static_cast<std::size_t>(j)]);
        ++calls[t];
      }
      // a dominated contract can only resurface strictly inside V_i
      bool hit = false;
      for (int j : empties) {
        auto f = compute_future(j, i);
        ++calls[t];
        if (f.empty()) continue;
        futures.push_back({basis_[static_cast<std::size_t>(j)].id, std::move(f)});
        fb.push_back(basis_[static_cast<std::size_t>(j)]);
        hit = true;
      }
      empty_dependent_[static_cast<std::size_t>(i)] = hit;
      const auto& fi = basis_[static_cast<std::size_t>(i)];
      const auto& cell = cell_[static_cast<std::size_t>(i)];
      if (metric_ == Metric::l1)
        nu_[static_cast<std::size_t>(i)] = importance_l1(fi, cell, futures, fb);
      else
        delta_[static_cast<std::size_t>(i)] = revenue_delta(instance_, fi, cell, futures, fb);
    });
    for (std::size_t t = 0; t < todo.size(); ++t) {
      vrep_ += calls[t];
      max_neighbors_ = std::max(max_neighbors_, sizes[t]);
    }
    if (metric_ == Metric::jbased)
      for (std::size_t p = 0; p < basis_.size(); ++p)
        if (alive_[p] && !cell_[p].empty()) nu_[p] = importance_j(instance_, delta_[p], m0_);
  }

  // Empty cells first (lowest id), then argmin nu with lowest-id ties.
  int pick() const {
    for (std::size_t p = 0; p < basis_.size(); ++p)
      if (alive_[p] && !protected_[p] && cell_[p].empty()) return static_cast<int>(p);
    int r = -1;
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      if (!alive_[p] || protected_[p]) continue;
      if (r < 0 || nu_[p] < nu_[static_cast<std::size_t>(r)]) r = static_cast<int>(p);
    }
    return r;
  }

  void remove(int r) {
    const auto ru = static_cast<std::size_t>(r);
    const bool was_empty = cell_[ru].empty();
    const auto nb = neighbors(r);
    if (metric_ == Metric::jbased && !was_empty) m0_ += delta_[ru].d_consumption;
    alive_[ru] = 0;
    set_own(r, {});
    for (int k : std::vector<int>(rev_[ru])) erase_sorted(own_[static_cast<std::size_t>(k)], r);
    rev_[ru].clear();
    cell_[ru] = Polygon();
    rebuild_live();
    if (was_empty) {
      // the envelope is unchanged; only futures that used r need a refresh
      std::vector<int> todo;
      for (std::size_t p = 0; p < basis_.size(); ++p)
        if (alive_[p] && empty_dependent_[p]) todo.push_back(static_cast<int>(p));
      if (options_.global_recompute) {
        full_rebuild();
        refresh(live_nonempty());
        return;
      }
      if (options_.skip_local_refresh) todo.clear();
      refresh(todo);
      return;
    }

    if (options_.global_recompute) {
      full_rebuild();
      refresh(live_nonempty());
      return;
    }
    std::vector<int> grown = nb;
    for (int j : nb) {
      cell_[static_cast<std::size_t>(j)] = compute_cell(j);
      ++vrep_;
    }
    // a dominated contract may surface where r used to win
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      if (!alive_[p] || !cell_[p].empty()) continue;
      cell_[p] = compute_cell(static_cast<int>(p));
      ++vrep_;
      if (!cell_[p].empty()) insert_sorted(grown, static_cast<int>(p));
    }
    std::vector<int> affected = grown;
    for (int j : grown) {
      const auto before = neighbors(j);
      set_own(j, touching(j));
      for (int k : neighbors(j))
        if (!std::binary_search(before.begin(), before.end(), k)) insert_sorted(affected, k);
    }
    if (options_.skip_local_refresh) affected.clear();
    refresh(affected);
  }

  Metric metric_;
  const model::Instance& instance_;
  PruneOptions options_;
  std::vector<BasisFunction> basis_;
  std::vector<char> alive_, protected_;
  std::vector<Polygon> cell_;
  // own_[p]: cells p touches from its own vertices; rev_[p]: cells touching p.
  std::vector<std::vector<int>> own_, rev_;
  std::vector<double> nu_;
  std::vector<RevenueDelta> delta_;
  // nu_[p] was computed with a dominated contract resurfacing inside V_p
  std::vector<char> empty_dependent_;
  double m0_ = 0;
  std::vector<BasisFunction> live_;
  std::vector<int> live_index_;
  long vrep_ = 0;
  int max_neighbors_ = 0;
  int threads_ = 1;
};

}  // namespace

PruneResult prune_local(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                        const PruneOptions& options) {
  LocalPruner pruner(menu, metric, instance, options);
  return pruner.run(n);
}

std::vector<double> importances(const model::Menu& menu, Metric metric, const model::Instance& instance,
                                long* lp_solves, long* vrep_calls) {
  std::vector<BasisFunction> basis = menu.basis;
  std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  if (metric != Metric::linf) return LocalPruner(model::Menu{basis}, metric, instance, {}).initial_importance(vrep_calls);
  std::vector<double> nu(basis.size(), kNotRemovable);
  const auto planes = PlaneFamily::from_basis(basis);
  const auto domain = Polytope::from_polygon(instance.domain);
  std::vector<int> live(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) live[k] = static_cast<int>(k);
  for (std::size_t k = 0; k < basis.size(); ++k)
    nu[k] = importance_linf(planes, live, static_cast<int>(k), domain, lp_solves).nu;
  return nu;
}

std::vector<int> onestep_removal_order(const model::Menu& menu, Metric metric, const model::Instance& instance,
                                       PruneTrace* trace) {
  std::vector<BasisFunction> basis = menu.basis;
  std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  long lp_solves = 0, vrep_calls = 0;
  const auto nu = importances(menu, metric, instance, &lp_solves, &vrep_calls);
  // ranking by (-nu, id); removal goes from the bottom of the ranking
  std::vector<std::size_t> rank(basis.size());
  for (std::size_t k = 0; k < rank.size(); ++k) rank[k] = k;
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (nu[a] != nu[b]) return nu[a] > nu[b];
    return basis[a].id < basis[b].id;
  });
  std::vector<int> order;
  for (std::size_t k = rank.size(); k-- > 1;) order.push_back(basis[rank[k]].id);
  if (trace) {
    trace->initial_size = static_cast<int>(basis.size());
    trace->lp_solves = lp_solves;
    trace->vrep_calls = vrep_calls;
    trace->records.clear();
    for (std::size_t k = 0; k < order.size(); ++k) {
      IterationRecord rec;
      rec.iteration = static_cast<int>(k) + 1;
      rec.removed_id = order[k];
      rec.nu = nu[rank[rank.size() - 1 - k]];
      rec.lp_solves_cum = lp_solves;
      rec.vrep_calls_cum = vrep_calls;
      trace->records.push_back(rec);
    }
  }
  return order;
}

PruneResult prune_onestep(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                          const PruneOptions& options) {
  if (n < 1) throw std::invalid_argument("prune_onestep: n must be at least 1");
  PruneResult out;
  auto order = onestep_removal_order(menu, metric, instance, &out.trace);
  std::map<int, double> nu_of;
  for (const auto& rec : out.trace.records) nu_of[rec.removed_id] = rec.nu;
  std::erase_if(order, [&](int id) {
    return std::find(options.protected_ids.begin(), options.protected_ids.end(), id) != options.protected_ids.end();
  });
  const std::size_t excess = menu.size() > static_cast<std::size_t>(n) ? menu.size() - static_cast<std::size_t>(n) : 0;
  const std::size_t k = std::min(excess, order.size());
  out.menu = menu_after(menu, order, k);
  out.trace.records.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    out.trace.records[t].removed_id = order[t];
    out.trace.records[t].nu = nu_of.count(order[t]) ? nu_of[order[t]] : kNotRemovable;
  }
  return out;
}

}  // namespace menuprune::pruning
