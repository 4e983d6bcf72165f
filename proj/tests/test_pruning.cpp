#include "menuprune/cli/synthetic.hpp"
#include "menuprune/model/revenue.hpp"
#include "menuprune/pruning/prune.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <random>

using namespace menuprune;
using Eigen::Vector2d;

namespace {

std::vector<oracle::Plane> planes_of(const model::Menu& menu) {
  std::vector<oracle::Plane> out;
  for (const auto& f : menu.basis) out.push_back({f.gradient, f.intercept, f.id});
  return out;
}

const oracle::Poly kSquare = oracle::box(1, 1, 2, 2);

model::Menu without(const model::Menu& menu, int id) {
  model::Menu out;
  for (const auto& f : menu.basis)
    if (f.id != id) out.basis.push_back(f);
  return out;
}

double revenue_oracle(const model::Instance& inst, const model::Menu& menu) {
  const auto planes = planes_of(menu);
  double inv = 0, cons = 0;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto cell = oracle::cell(planes, i, kSquare);
    const Vector2d q = planes[i].g.cwiseQuotient(inst.alpha);
    inv += inst.density * oracle::integrate(cell, (inst.z_ref / inst.eta).cwiseProduct(q) - planes[i].g, -planes[i].c);
    cons += inst.density * oracle::integrate(cell, Vector2d(std::pow(q.x(), 1 / inst.eta), std::pow(q.y(), 1 / inst.eta)), 0);
  }
  return inv - inst.cost.c2 * cons * cons;
}

// Greedy L1 descent recomputing every importance from scratch.
std::vector<int> oracle_l1_greedy(model::Menu menu) {
  std::vector<int> order;
  while (menu.size() > 1) {
    const auto planes = planes_of(menu);
    const double full = oracle::envelope_integral(planes, kSquare);
    int pick = -1;
    double best = 0;
    for (const auto& f : menu.basis) {
      const double nu = full - oracle::envelope_integral(planes_of(without(menu, f.id)), kSquare);
      if (pick < 0 || nu < best) {
        pick = f.id;
        best = nu;
      }
    }
    order.push_back(pick);
    menu = without(menu, pick);
  }
  return order;
}

std::vector<model::Menu> menus(unsigned seed, int count, double noise) {
  const auto inst = cli::synthetic_instance();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(10, 20);
  std::vector<model::Menu> out;
  for (int k = 0; k < count; ++k) out.push_back(cli::random_menu(rng, inst, size(rng), noise));
  return out;
}

}  // namespace

TEST_CASE("metric names") {
  CHECK(pruning::parse_metric("linf") == pruning::Metric::linf);
  CHECK(pruning::parse_metric("l1") == pruning::Metric::l1);
  CHECK(pruning::parse_metric("jbased") == pruning::Metric::jbased);
  CHECK(pruning::to_string(pruning::Metric::jbased) == "jbased");
  CHECK_THROWS_AS(pruning::parse_metric("l2"), std::invalid_argument);
}

TEST_CASE("L-infinity importance equals the largest gap to the other planes") {
  const auto inst = cli::synthetic_instance();
  const oracle::Poly tri{{1, 1}, {2, 1}, {1.2, 2}};
  const model::Polygon tri_poly(tri);
  for (const auto& menu : menus(3, 10, 0.05)) {
    const auto planes = pruning::PlaneFamily::from_basis(menu.basis);
    std::vector<int> live(planes.size());
    for (std::size_t k = 0; k < live.size(); ++k) live[k] = static_cast<int>(k);
    for (const auto* dom : {&inst.domain, &tri_poly}) {
      const auto poly = pruning::Polytope::from_polygon(*dom);
      for (int i : live) {
        const auto imp = pruning::importance_linf(planes, live, i, poly);
        // brute force: max over a fine grid of min_j (f_i - f_j)
        const auto box = dom->bounding_box();
        double grid = -1e300;
        const int n = 300;
        for (int a = 0; a <= n; ++a)
          for (int b = 0; b <= n; ++b) {
            const Vector2d x = box.min() + box.sizes().cwiseProduct(Vector2d(a, b) / n);
            if (!dom->contains(x, 1e-12)) continue;
            double m = 1e300;
            for (int j : live)
              if (j != i) m = std::min(m, menu.basis[static_cast<std::size_t>(i)](x) - menu.basis[static_cast<std::size_t>(j)](x));
            grid = std::max(grid, m);
          }
        const double lip = 2 * planes.gradients.cwiseAbs().maxCoeff() * box.sizes().maxCoeff() / n;
        CHECK(imp.nu >= std::max(0.0, grid) - 1e-9);
        CHECK(imp.nu <= std::max(0.0, grid) + lip);
        CHECK(std::is_sorted(imp.support.begin(), imp.support.end()));
      }
    }
  }
}

TEST_CASE("L1 and revenue importances match envelope and revenue differences") {
  const auto inst = cli::synthetic_instance();
  for (const auto& menu : menus(5, 10, 0.05)) {
    const auto nu_l1 = pruning::importances(menu, pruning::Metric::l1, inst);
    const auto nu_j = pruning::importances(menu, pruning::Metric::jbased, inst);
    const double full = oracle::envelope_integral(planes_of(menu), kSquare);
    const double j_full = revenue_oracle(inst, menu);
    for (std::size_t p = 0; p < menu.size(); ++p) {
      const auto reduced = without(menu, menu.basis[p].id);
      const double d = full - oracle::envelope_integral(planes_of(reduced), kSquare);
      CHECK(std::abs(nu_l1[p] - d) <= 1e-9 * std::abs(d) + 1e-12 * std::abs(full));
      const double dj = j_full - revenue_oracle(inst, reduced);
      // relative to the difference, with a floor at rounding level of J itself
      CHECK(std::abs(nu_j[p] - dj) <= 1e-9 * std::abs(dj) + 1e-12 * std::abs(j_full));
    }
  }
}

TEST_CASE("greedy L1 descent matches the from-scratch oracle") {
  const auto inst = cli::synthetic_instance();
  for (const auto& menu : menus(7, 6, 0.0)) {
    const auto res = pruning::prune(menu, 1, pruning::Metric::l1, inst);
    CHECK(res.trace.removal_order() == oracle_l1_greedy(menu));
    CHECK(res.menu.size() == 1);
  }
}

TEST_CASE("local and global updates give identical descents") {
  const auto inst = cli::synthetic_instance();
  for (double noise : {0.0, 0.05})
    for (const auto& menu : menus(11, 8, noise))
      for (auto metric : {pruning::Metric::l1, pruning::Metric::jbased, pruning::Metric::linf}) {
        pruning::PruneOptions global;
        global.global_recompute = true;
        const auto a = pruning::prune(menu, 1, metric, inst).trace;
        const auto b = pruning::prune(menu, 1, metric, inst, global).trace;
        REQUIRE(a.removal_order() == b.removal_order());
        for (std::size_t t = 0; t < a.records.size(); ++t)
          CHECK(a.records[t].nu == doctest::Approx(b.records[t].nu).epsilon(1e-9).scale(1));
        // local work stays within the neighbourhood bounds
        const long m = std::max(1, a.max_neighbors);
        if (metric == pruning::Metric::linf)
          CHECK(a.lp_solves <= 3 * m * a.initial_size);
        else
          CHECK(a.vrep_calls <= 3 * m * m * a.initial_size);
        CHECK(a.lp_solves + a.vrep_calls <= b.lp_solves + b.vrep_calls);
      }
}

TEST_CASE("skipping the local refresh breaks the equivalence") {
  const auto inst = cli::synthetic_instance();
  int differ = 0;
  for (const auto& menu : menus(13, 8, 0.0)) {
    pruning::PruneOptions fault;
    fault.skip_local_refresh = true;
    differ += pruning::prune(menu, 1, pruning::Metric::l1, inst, fault).trace.removal_order() !=
              pruning::prune(menu, 1, pruning::Metric::l1, inst).trace.removal_order();
  }
  CHECK(differ > 0);
}

TEST_CASE("descents are nested and respect protected contracts") {
  const auto inst = cli::synthetic_instance();
  const auto menu = menus(17, 1, 0.05).front();
  for (auto metric : {pruning::Metric::l1, pruning::Metric::jbased, pruning::Metric::linf}) {
    const auto order = pruning::prune(menu, 1, metric, inst).trace.removal_order();
    CHECK(order.size() == menu.size() - 1);
    for (int n : {1, 3, 7}) {
      const auto res = pruning::prune(menu, n, metric, inst);
      CHECK(res.menu.size() == static_cast<std::size_t>(n));
      const auto expect = pruning::menu_after(menu, order, menu.size() - static_cast<std::size_t>(n));
      REQUIRE(res.menu.size() == expect.size());
      for (std::size_t k = 0; k < expect.size(); ++k) CHECK(res.menu.basis[k].id == expect.basis[k].id);
    }
    pruning::PruneOptions opt;
    opt.protected_ids = {order.front(), order[1]};
    const auto kept = pruning::prune(menu, 1, metric, inst, opt);
    CHECK(kept.menu.size() == 2);
    for (const auto& f : kept.menu.basis)
      CHECK(std::find(opt.protected_ids.begin(), opt.protected_ids.end(), f.id) != opt.protected_ids.end());
  }
}

TEST_CASE("thread count does not change the result") {
  const auto inst = cli::synthetic_instance();
  const auto menu = menus(19, 1, 0.05).front();
  pruning::PruneOptions one, four;
  one.threads = 1;
  four.threads = 4;
  for (auto metric : {pruning::Metric::l1, pruning::Metric::jbased, pruning::Metric::linf}) {
    const auto a = pruning::prune(menu, 1, metric, inst, one).trace;
    const auto b = pruning::prune(menu, 1, metric, inst, four).trace;
    CHECK(a.removal_order() == b.removal_order());
    for (std::size_t t = 0; t < a.records.size(); ++t) CHECK(a.records[t].nu == b.records[t].nu);
  }
  setenv("MENUPRUNE_THREADS", "1", 1);
  CHECK(pruning::worker_count(0) == 1);
  CHECK(pruning::worker_count(3) == 3);
  unsetenv("MENUPRUNE_THREADS");
}

TEST_CASE("one-step ranking removes in increasing importance") {
  const auto inst = cli::synthetic_instance();
  const auto menu = menus(23, 1, 0.0).front();
  const auto nu = pruning::importances(menu, pruning::Metric::jbased, inst);
  const auto order = pruning::onestep_removal_order(menu, pruning::Metric::jbased, inst);
  REQUIRE(order.size() == menu.size() - 1);
  auto nu_of = [&](int id) {
    for (std::size_t p = 0; p < menu.size(); ++p)
      if (menu.basis[p].id == id) return nu[p];
    return 0.0;
  };
  for (std::size_t k = 1; k < order.size(); ++k) CHECK(nu_of(order[k - 1]) <= nu_of(order[k]));
  const auto res = pruning::prune_onestep(menu, 4, pruning::Metric::jbased, inst);
  CHECK(res.menu.size() == 4);
  const auto top = *std::max_element(nu.begin(), nu.end());
  CHECK(std::any_of(res.menu.basis.begin(), res.menu.basis.end(), [&](const auto& f) { return nu_of(f.id) == top; }));
}

TEST_CASE("losses: lifted revenue against the oracle") {
  const auto inst = cli::synthetic_instance();
  for (const auto& menu : menus(29, 4, 0.05)) {
    auto low = menu;
    for (auto& f : low.basis) f.intercept -= 0.5;  // some types now prefer R
    double shift = 0;
    const double j = pruning::lifted_revenue(inst, low, &shift);
    // oracle shift: largest R - u over a fine grid and the cell vertices
    double gap = 0;
    const auto planes = planes_of(low);
    for (std::size_t i = 0; i < planes.size(); ++i)
      for (const auto& v : oracle::cell(planes, i, kSquare))
        gap = std::max(gap, inst.reservation(v) - oracle::envelope(planes, v));
    CHECK(shift == doctest::Approx(gap).epsilon(1e-12).scale(1));
    auto lifted = low;
    for (auto& f : lifted.basis) f.intercept += gap;
    CHECK(j == doctest::Approx(revenue_oracle(inst, lifted)).epsilon(1e-10));

    const auto order = pruning::prune(low, 1, pruning::Metric::l1, inst).trace.removal_order();
    const auto rows = pruning::evaluate_losses(inst, low, order, j);
    REQUIRE(rows.size() == low.size());
    CHECK(rows.front().size == static_cast<int>(low.size()));
    CHECK(rows.front().loss == doctest::Approx(0).scale(1));
    CHECK(rows.back().size == 1);
    for (const auto& r : rows) CHECK(r.shift >= 0);
  }
}
