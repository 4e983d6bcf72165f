#include "menuprune/pruning/prune.hpp"

#include "menuprune/model/revenue.hpp"

#include <stdexcept>

namespace menuprune::pruning {

double lifted_revenue(const model::Instance& instance, const model::Menu& menu, double* shift) {
  const auto cx = model::build_complex(menu, instance.domain);
  const auto lifted = model::lift_participation(instance, menu, cx);
  if (shift) *shift = lifted.shift;
  // a uniform shift leaves the cells unchanged
  return model::revenue(instance, lifted.menu, cx);
}

std::vector<LossRow> evaluate_losses(const model::Instance& instance, const model::Menu& menu,
                                     std::span<const int> order, double j_ref, PruneTrace* trace) {
  if (!(j_ref != 0)) throw std::invalid_argument("evaluate_losses: reference revenue must be non-zero");
  std::vector<LossRow> rows;
  rows.reserve(order.size() + 1);
  for (std::size_t k = 0; k <= order.size(); ++k) {
    const auto m = menu_after(menu, order, k);
    LossRow row;
    row.size = static_cast<int>(m.size());
    row.j_lifted = lifted_revenue(instance, m, &row.shift);
    row.loss = 1 - row.j_lifted / j_ref;
    if (trace && k > 0 && k <= trace->records.size()) {
      auto& rec = trace->records[k - 1];
      rec.j_lifted = row.j_lifted;
      rec.shift = row.shift;
      rec.loss = row.loss;
      row.ms_cum = rec.ms_cum;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace menuprune::pruning
