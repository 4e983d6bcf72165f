#pragma once

#include "menuprune/lp/simplex.hpp"
#include "menuprune/model/complex.hpp"
#include "menuprune/model/instance.hpp"

#include <Eigen/Core>

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace menuprune::pruning {

using model::build_complex;
using model::Cell;
using model::Complex;

enum class Metric { linf, l1, jbased };

Metric parse_metric(const std::string& name);
std::string to_string(Metric m);

inline constexpr double kNotRemovable = std::numeric_limits<double>::infinity();

struct IterationRecord {
  int iteration = 0;
  int removed_id = -1;
  double nu = 0;
  // filled by evaluate_losses
  double j_lifted = std::numeric_limits<double>::quiet_NaN();
  double shift = std::numeric_limits<double>::quiet_NaN();
  double loss = std::numeric_limits<double>::quiet_NaN();
  long lp_solves_cum = 0;
  long vrep_calls_cum = 0;
  double ms_cum = 0;
};

struct PruneTrace {
  std::vector<IterationRecord> records;
  long lp_solves = 0;
  long vrep_calls = 0;
  /// Largest neighbourhood (L1, J) or dual support (L-infinity) seen.
  int max_neighbors = 0;
  /// Number of contracts before pruning.
  int initial_size = 0;

  std::vector<int> removal_order() const;
};

struct PruneOptions {
  /// Ids that are never removed.
  std::vector<int> protected_ids;
  /// Rebuild the whole complex and every metric at each step (reference mode).
  bool global_recompute = false;
  /// Fault injection: skip the metric refresh of the affected neighbourhood.
  bool skip_local_refresh = false;
  /// Worker threads for per-contract metric work; 0 reads MENUPRUNE_THREADS.
  int threads = 0;
};

struct PruneResult {
  model::Menu menu;
  PruneTrace trace;
};

// ---------------------------------------------------------------------------
// L-infinity metric (any dimension)

/// Domain {x : A x <= b, lower <= x <= upper}.
struct Polytope {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Polytope from_polygon(const model::Polygon& poly);
};

/// Affine functions x -> <gradients.row(k), x> + intercepts(k), labelled by ids.
struct PlaneFamily {
  Eigen::MatrixXd gradients;
  Eigen::VectorXd intercepts;
  std::vector<int> ids;

  static PlaneFamily from_basis(std::span<const model::BasisFunction> basis);
  std::size_t size() const { return ids.size(); }
};

/// max nu s.t. f_i(x) - f_j(x) >= nu for j in live, j != i, x in domain.
/// Variables (x, nu); one row per other live plane (in `live` order, i
/// skipped), then the domain rows. Rows are scaled to unit 2-norm.
lp::LinearProgram<double> linf_program(const PlaneFamily& planes, std::span<const int> live, int i,
                                       const Polytope& domain);

struct LinfImportance {
  double nu = kNotRemovable;
  /// Ids with positive multiplier or an active row.
  std::vector<int> support;
};

/// `live` and `i` are positions in `planes`. A single live plane gives +inf.
LinfImportance importance_linf(const PlaneFamily& planes, std::span<const int> live, int i, const Polytope& domain,
                               long* lp_solves = nullptr);

struct LinfPruneResult {
  std::vector<int> kept_ids;
  PruneTrace trace;
};

LinfPruneResult prune_linf(const PlaneFamily& planes, int n, const Polytope& domain, const PruneOptions& options = {});
PruneResult prune_linf(const model::Menu& menu, int n, const model::Polygon& domain, const PruneOptions& options = {});

// ---------------------------------------------------------------------------
// L1 and revenue metrics (planar)

/// Future cell of a neighbour j once contract i is gone: F_{j,-i}.
struct Future {
  int id = -1;
  model::Polygon polygon;
};

/// sum_j integral over F_{j,-i} ∩ V_i of (f_i - f_j).
double importance_l1(const model::BasisFunction& fi, const model::Polygon& cell, std::span<const Future> futures,
                     std::span<const model::BasisFunction> basis_by_future);

struct RevenueDelta {
  double d_invoice = 0;      // sum over transferred regions of L_i - L_j
  double d_consumption = 0;  // sum over transferred regions of M_j - M_i
};

RevenueDelta revenue_delta(const model::Instance& instance, const model::BasisFunction& fi, const model::Polygon& cell,
                           std::span<const Future> futures, std::span<const model::BasisFunction> basis_by_future);

/// J(S) - J(S without i) = dL - C(M0) + C(M0 + dM).
double importance_j(const model::Instance& instance, const RevenueDelta& delta, double m0);

/// Greedy descent with local updates for the L1 or revenue metric. `instance`
/// supplies the domain and, for the revenue metric, the integrands.
PruneResult prune_local(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                        const PruneOptions& options = {});

/// nu of every contract on the full complex, in id order (+inf for the last
/// non-empty cell).
std::vector<double> importances(const model::Menu& menu, Metric metric, const model::Instance& instance,
                                long* lp_solves = nullptr, long* vrep_calls = nullptr);

/// One-shot ranking: nu on the full complex, keep the n largest (lowest id on
/// ties). Returns the contracts ordered from least to most important.
std::vector<int> onestep_removal_order(const model::Menu& menu, Metric metric, const model::Instance& instance,
                                       PruneTrace* trace = nullptr);
PruneResult prune_onestep(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                          const PruneOptions& options = {});

/// Convenience dispatcher over the greedy descents.
PruneResult prune(const model::Menu& menu, int n, Metric metric, const model::Instance& instance,
                  const PruneOptions& options = {});

/// Menu left after the first k removals of `order`.
model::Menu menu_after(const model::Menu& menu, std::span<const int> order, std::size_t k);

struct LossRow {
  int size = 0;
  double j_lifted = 0;
  double loss = 0;
  double shift = 0;
  double ms_cum = 0;
};

/// For every size along the removal order (full menu first): lift, evaluate J
/// and the relative loss 1 - J / j_ref. Fills the J columns of `trace` when
/// given (records are matched by iteration).
std::vector<LossRow> evaluate_losses(const model::Instance& instance, const model::Menu& menu,
                                     std::span<const int> order, double j_ref, PruneTrace* trace = nullptr);

/// Revenue of the lifted menu (the reference value for losses).
double lifted_revenue(const model::Instance& instance, const model::Menu& menu, double* shift = nullptr);

/// Worker count: `requested` if positive, else MENUPRUNE_THREADS, else 1.
int worker_count(int requested);

}  // namespace menuprune::pruning
