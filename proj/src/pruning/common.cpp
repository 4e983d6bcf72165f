#include "menuprune/pruning/prune.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace menuprune::pruning {

Metric parse_metric(const std::string& name) {
  if (name == "linf") return Metric::linf;
  if (name == "l1") return Metric::l1;
  if (name == "jbased" || name == "j") return Metric::jbased;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::linf: return "linf";
    case Metric::l1: return "l1";
    case Metric::jbased: return "jbased";
  }
  return "?";
}

std::vector<int> PruneTrace::removal_order() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.removed_id);
  return out;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MENUPRUNE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

model::Menu menu_after(const model::Menu& menu, std::span<const int> order, std::size_t k) {
  if (k > order.size()) throw std::out_of_range("menu_after: more removals than recorded");
  std::vector<int> gone(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(gone.begin(), gone.end());
  model::Menu out;
  for (const auto& f : menu.basis)
    if (!std::binary_search(gone.begin(), gone.end(), f.id)) out.basis.push_back(f);
  return out;
}

PruneResult prune(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                  const PruneOptions& options) {
  if (metric == Metric::linf) return prune_linf(menu, n, instance.domain, options);
  return prune_local(menu, n, metric, instance, options);
}

}  // namespace menuprune::pruning
