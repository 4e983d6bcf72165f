#include "menuprune/pruning/prune.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace menuprune::pruning {

Polytope Polytope::from_polygon(const model::Polygon& poly) {
  if (poly.empty()) throw std::invalid_argument("Polytope: empty domain");
  const auto box = poly.bounding_box();
  Polytope out;
  out.lower = box.min();
  out.upper = box.max();
  std::vector<geometry::HalfPlaned> rows;
  const double tol = 1e-12 * std::max(1.0, poly.diameter());
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto h = poly.edge_half_plane(k);
    const Eigen::Vector2d nrm = h.normal.normalized();
    const double off = h.offset / h.normal.norm();
    bool on_box = false;
    for (int d = 0; d < 2; ++d) {
      if (std::abs(std::abs(nrm(d)) - 1) > 1e-14) continue;
      const double bound = nrm(d) > 0 ? box.max()(d) : -box.min()(d);
      on_box = std::abs(off - bound) <= tol;
    }
    if (!on_box) rows.push_back(h);
  }
  out.A.resize(static_cast<Eigen::Index>(rows.size()), 2);
  out.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.A.row(static_cast<Eigen::Index>(k)) = rows[k].normal.transpose();
    out.b(static_cast<Eigen::Index>(k)) = rows[k].offset;
  }
  return out;
}

PlaneFamily PlaneFamily::from_basis(std::span<const model::BasisFunction> basis) {
  PlaneFamily out;
  out.gradients.resize(static_cast<Eigen::Index>(basis.size()), 2);
  out.intercepts.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.gradients.row(static_cast<Eigen::Index>(k)) = basis[k].gradient.transpose();
    out.intercepts(static_cast<Eigen::Index>(k)) = basis[k].intercept;
    out.ids.push_back(basis[k].id);
  }
  return out;
}

lp::LinearProgram<double> linf_program(const PlaneFamily& planes, std::span<const int> live, int i,
                                       const Polytope& domain) {
  const auto d = planes.gradients.cols();
  const auto others = static_cast<Eigen::Index>(live.size()) - 1;
  const auto nd = domain.A.rows();
  lp::LinearProgram<double> lp;
  lp.objective = Eigen::VectorXd::Zero(d + 1);
  lp.objective(d) = 1;
  lp.A = Eigen::MatrixXd::Zero(others + nd, d + 1);
  lp.b.resize(others + nd);
  Eigen::Index r = 0;
  for (int j : live) {
    if (j == i) continue;
    // nu - <g_i - g_j, x> <= c_i - c_j
    lp.A.block(r, 0, 1, d) = planes.gradients.row(j) - planes.gradients.row(i);
    lp.A(r, d) = 1;
    lp.b(r) = planes.intercepts(i) - planes.intercepts(j);
    const double nrm = lp.A.row(r).norm();
    lp.A.row(r) /= nrm;
    lp.b(r) /= nrm;
    ++r;
  }
  if (r != others) throw std::invalid_argument("linf_program: i is not live");
  for (Eigen::Index k = 0; k < nd; ++k, ++r) {
    const double nrm = domain.A.row(k).norm();
    lp.A.block(r, 0, 1, d) = domain.A.row(k) / nrm;
    lp.b(r) = domain.b(k) / nrm;
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  lp.lower = Eigen::VectorXd::Constant(d + 1, -inf);
  lp.upper = Eigen::VectorXd::Constant(d + 1, inf);
  if (domain.lower.size() == d) lp.lower.head(d) = domain.lower;
  if (domain.upper.size() == d) lp.upper.head(d) = domain.upper;
  return lp;
}

LinfImportance importance_linf(const PlaneFamily& planes, std::span<const int> live, int i, const Polytope& domain,
                               long* lp_solves) {
  LinfImportance out;
  if (live.size() <= 1) return out;
  const auto lp = linf_program(planes, live, i, domain);
  const auto sol = lp::solve_lp(lp);
  if (lp_solves) ++*lp_solves;
  if (sol.status != lp::LpStatus::optimal)
    throw std::runtime_error(std::string("importance_linf: LP ") + lp::to_string(sol.status));
  out.nu = std::max(0.0, sol.value);
  std::vector<char> hit(live.size(), 0);
  const auto others = static_cast<int>(live.size()) - 1;
  for (int k = 0; k < others; ++k)
    if (sol.duals(k) > 1e-9) hit[static_cast<std::size_t>(k)] = 1;
  for (int k : sol.active_rows)
    if (k < others) hit[static_cast<std::size_t>(k)] = 1;
  int k = 0;
  for (int j : live) {
    if (j == i) continue;
    if (hit[static_cast<std::size_t>(k++)]) out.support.push_back(planes.ids[static_cast<std::size_t>(j)]);
  }
  std::sort(out.support.begin(), out.support.end());
  return out;
}

LinfPruneResult prune_linf(const PlaneFamily& planes, int n, const Polytope& domain, const PruneOptions& options) {
  if (n < 1) throw std::invalid_argument("prune_linf: n must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int count = static_cast<int>(planes.size());
  const int threads = worker_count(options.threads);
  std::vector<char> is_protected(static_cast<std::size_t>(count), 0);
  for (int k = 0; k < count; ++k)
    is_protected[static_cast<std::size_t>(k)] =
        std::find(options.protected_ids.begin(), options.protected_ids.end(), planes.ids[static_cast<std::size_t>(k)]) !=
        options.protected_ids.end();
  std::vector<LinfImportance> imp(static_cast<std::size_t>(count));
  std::vector<int> live(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) live[static_cast<std::size_t>(k)] = k;

  LinfPruneResult out;
  out.trace.initial_size = count;
  auto refresh = [&](const std::vector<int>& todo) {
    std::vector<long> solves(todo.size(), 0);
    detail::parallel_for(todo.size(), threads, [&](std::size_t t) {
      imp[static_cast<std::size_t>(todo[t])] = importance_linf(planes, live, todo[t], domain, &solves[t]);
    });
    for (long s : solves) out.trace.lp_solves += s;
    for (int p : todo)
      out.trace.max_neighbors =
          std::max(out.trace.max_neighbors, static_cast<int>(imp[static_cast<std::size_t>(p)].support.size()));
  };
  refresh(live);

  int iteration = 0;
  while (static_cast<int>(live.size()) > n && live.size() > 1) {
    int r = -1;
    for (int p : live) {
      if (is_protected[static_cast<std::size_t>(p)]) continue;
      const double np = imp[static_cast<std::size_t>(p)].nu;
      if (r == -1 || np < imp[static_cast<std::size_t>(r)].nu ||
          (np == imp[static_cast<std::size_t>(r)].nu && planes.ids[static_cast<std::size_t>(p)] < planes.ids[static_cast<std::size_t>(r)]))
        r = p;
    }
    if (r == -1) break;
    const int rid = planes.ids[static_cast<std::size_t>(r)];
    IterationRecord rec;
    rec.iteration = ++iteration;
    rec.removed_id = rid;
    rec.nu = imp[static_cast<std::size_t>(r)].nu;
    live.erase(std::find(live.begin(), live.end(), r));

    std::vector<int> todo;
    for (int p : live) {
      if (options.global_recompute) {
        todo.push_back(p);
      } else if (!options.skip_local_refresh) {
        const auto& sup = imp[static_cast<std::size_t>(p)].support;
        if (std::binary_search(sup.begin(), sup.end(), rid)) todo.push_back(p);
      }
    }
    refresh(todo);
    rec.lp_solves_cum = out.trace.lp_solves;
    rec.ms_cum = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.trace.records.push_back(rec);
  }
  for (int p : live) out.kept_ids.push_back(planes.ids[static_cast<std::size_t>(p)]);
  std::sort(out.kept_ids.begin(), out.kept_ids.end());
  return out;
}

PruneResult prune_linf(const model::Menu& menu, int n, const model::Polygon& domain, const PruneOptions& options) {
  const auto planes = PlaneFamily::from_basis(menu.basis);
  auto res = prune_linf(planes, n, Polytope::from_polygon(domain), options);
  PruneResult out;
  out.trace = std::move(res.trace);
  for (const auto& f : menu.basis)
    if (std::binary_search(res.kept_ids.begin(), res.kept_ids.end(), f.id)) out.menu.basis.push_back(f);
  return out;
}

}  // namespace menuprune::pruning
