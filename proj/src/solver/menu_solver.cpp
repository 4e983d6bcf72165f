#include "menuprune/solver/menu_solver.hpp"

#include "menuprune/lp/simplex.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace menuprune::solver {

Eigen::VectorXd pack(const DiscretizedProblem& problem, const MenuSolution& sol) {
  Eigen::VectorXd y(problem.num_variables());
  for (std::size_t i = 0; i < problem.num_points(); ++i) {
    y(problem.u_index(i)) = sol.u[i];
    y(problem.q_index(i, 0)) = sol.q[i].x();
    y(problem.q_index(i, 1)) = sol.q[i].y();
  }
  return y;
}

MenuSolution unpack(const DiscretizedProblem& problem, const Eigen::VectorXd& y) {
  MenuSolution sol;
  sol.points = problem.points();
  const Eigen::Vector2d& alpha = problem.instance().alpha;
  for (std::size_t i = 0; i < problem.num_points(); ++i) {
    const Eigen::Vector2d q = problem.q_at(y, i);
    const double u = y(problem.u_index(i));
    sol.u.push_back(u);
    sol.q.push_back(q);
    sol.p.push_back(problem.points()[i].dot(alpha.cwiseProduct(q)) - u);
  }
  sol.objective = problem.objective(y);
  sol.ic_residual = std::max(0.0, problem.max_ic_violation(y));
  sol.participation_residual = std::max(0.0, problem.max_participation_violation(y));
  return sol;
}

double certified_gap(const DiscretizedProblem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& lambda) {
  const auto& rows = problem.rows();
  if (static_cast<std::size_t>(lambda.size()) != rows.size())
    throw std::invalid_argument("certified_gap: one multiplier per row expected");
  Eigen::VectorXd r = -problem.gradient(y);
  double comp = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double l = std::max(0.0, lambda(static_cast<Eigen::Index>(k)));
    comp += l * std::max(0.0, rows[k].rhs - rows[k].dot(y));
    for (int t = 0; t < rows[k].nnz; ++t) r(rows[k].index[t]) += l * rows[k].value[t];
  }
  const auto [lo, hi] = problem.variable_bounds();
  double box = 0;
  for (Eigen::Index k = 0; k < r.size(); ++k)
    box += r(k) > 0 ? r(k) * std::max(0.0, y(k) - lo(k)) : -r(k) * std::max(0.0, hi(k) - y(k));
  return comp + box;
}

namespace {

struct NormalizedRows {
  std::vector<SparseRow> rows;
  Eigen::VectorXd scale;  // original row norms
};

NormalizedRows normalize(const std::vector<SparseRow>& rows) {
  NormalizedRows out{rows, Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double nrm = rows[k].norm();
    const double s = nrm > 0 ? nrm : 1.0;
    out.scale(static_cast<Eigen::Index>(k)) = s;
    auto& r = out.rows[k];
    for (int t = 0; t < r.nnz; ++t) r.value[t] /= s;
    r.rhs /= s;
  }
  return out;
}

Eigen::VectorXd row_products(const std::vector<SparseRow>& rows, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Eigen::Index>(k)) = rows[k].dot(y);
  return out;
}

void apply_transpose_add(const std::vector<SparseRow>& rows, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double vk = v(static_cast<Eigen::Index>(k));
    for (int t = 0; t < rows[k].nnz; ++t) out(rows[k].index[t]) += rows[k].value[t] * vk;
  }
}

// Hessian of -F: C'' grad M grad M' + C' diag(d^2 M).
Eigen::MatrixXd neg_hessian(const DiscretizedProblem& problem, const Eigen::VectorXd& y) {
  const auto& inst = problem.instance();
  const double e = 1 / inst.eta;
  const double m = problem.consumption(y);
  const double d1 = inst.cost.derivative(m);
  const double d2 = inst.cost.second_derivative(m);
  const auto n = static_cast<Eigen::Index>(problem.num_variables());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd gm = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < problem.num_points(); ++i) {
    const double w = problem.weights()[i];
    for (int k = 0; k < 2; ++k) {
      const int idx = problem.q_index(i, k);
      const double q = y(idx);
      const double x = problem.points()[i](k);
      gm(idx) = w * x * e * std::pow(q, e - 1);
      h(idx, idx) += d1 * w * x * e * (e - 1) * std::pow(q, e - 2);
    }
  }
  h.noalias() += d2 * gm * gm.transpose();
  return h;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (dv(k) < 0) a = std::min(a, -v(k) / dv(k));
  return a;
}

MenuSolution interior_point(const DiscretizedProblem& problem, const SolveOptions& opt) {
  const auto norm = normalize(problem.rows());
  const auto& rows = norm.rows;
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd b(m);
  for (Eigen::Index k = 0; k < m; ++k) b(k) = rows[static_cast<std::size_t>(k)].rhs;

  Eigen::VectorXd y = problem.interior_start();
  Eigen::VectorXd s = b - row_products(rows, y);
  if (!(s.minCoeff() > 0)) throw std::runtime_error("interior point: start is not strictly feasible");
  const double f0 = problem.objective(y);
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(m, 1.0).cwiseQuotient(s) * ((1 + std::abs(f0)) / m);

  auto unnormalized = [&](const Eigen::VectorXd& l) { return l.cwiseQuotient(norm.scale); };

  double best_gap = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_y = y, best_l = lambda;
  int stalled = 0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const double fval = problem.objective(y);
    const double gap = certified_gap(problem, y, unnormalized(lambda));
    if (gap < best_gap) {
      best_gap = gap;
      best_y = y;
      best_l = lambda;
      stalled = 0;
    } else if (++stalled > 25) {
      break;
    }
    if (gap <= 0.1 * opt.tol * (1 + std::abs(fval))) break;

    const Eigen::VectorXd grad_f = -problem.gradient(y);
    Eigen::VectorXd r_d = grad_f;
    apply_transpose_add(rows, lambda, r_d);
    const Eigen::VectorXd d = lambda.cwiseQuotient(s);

    Eigen::MatrixXd kkt = neg_hessian(problem, y);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      const double dk = d(static_cast<Eigen::Index>(k));
      for (int a = 0; a < r.nnz; ++a)
        for (int c = 0; c < r.nnz; ++c) kkt(r.index[a], r.index[c]) += dk * r.value[a] * r.value[c];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(kkt);
    double reg = 1e-12 * std::max(1.0, kkt.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success) {
      kkt.diagonal().array() += reg;
      llt.compute(kkt);
      reg *= 10;
      if (!std::isfinite(reg)) throw std::runtime_error("interior point: singular Newton system");
    }

    auto solve_dir = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dy, Eigen::VectorXd& ds, Eigen::VectorXd& dl) {
      Eigen::VectorXd rhs = -r_d;
      apply_transpose_add(rows, rc.cwiseQuotient(s), rhs);
      dy = llt.solve(rhs);
      ds = -row_products(rows, dy);
      dl = (-rc - lambda.cwiseProduct(ds)).cwiseQuotient(s);
    };

    const double mu = s.dot(lambda) / static_cast<double>(m);
    Eigen::VectorXd dy, ds, dl;
    solve_dir(s.cwiseProduct(lambda), dy, ds, dl);
    const double a_aff = std::min(max_step(s, ds), max_step(lambda, dl));
    const double mu_aff = (s + a_aff * ds).dot(lambda + a_aff * dl) / static_cast<double>(m);
    const double sigma = std::pow(mu_aff / mu, 3);
    const Eigen::VectorXd rc =
        s.cwiseProduct(lambda) + ds.cwiseProduct(dl) - Eigen::VectorXd::Constant(m, sigma * mu);
    solve_dir(rc, dy, ds, dl);
    const double step = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(lambda, dl)));
    if (!(step > 1e-12)) break;
    y += step * dy;
    lambda += step * dl;
    s = b - row_products(rows, y);
    for (Eigen::Index k = 0; k < m; ++k)
      if (!(s(k) > 0)) s(k) = std::numeric_limits<double>::min();
  }

  MenuSolution out = unpack(problem, best_y);
  out.iterations = it;
  out.multipliers = unnormalized(best_l);
  out.fw_gap = best_gap;
  out.converged = best_gap <= opt.tol * (1 + std::abs(out.objective));
  out.message = out.converged ? "converged" : "gap above tolerance";
  return out;
}

// max_gamma F(y + gamma d) on [0, 1] for concave F, by bisection on the slope.
double line_search(const DiscretizedProblem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& d) {
  auto slope = [&](double g) { return problem.gradient(y + g * d).dot(d); };
  if (slope(1.0) >= 0) return 1.0;
  if (slope(0.0) <= 0) return 0.0;
  double lo = 0, hi = 1;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MenuSolution frank_wolfe(const DiscretizedProblem& problem, const SolveOptions& opt) {
  const auto& rows = problem.rows();
  const auto n = static_cast<Eigen::Index>(problem.num_variables());
  lp::LinearProgram<double> lp;
  lp.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
  lp.b.resize(lp.A.rows());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    for (int t = 0; t < rows[k].nnz; ++t) lp.A(kk, rows[k].index[t]) += rows[k].value[t];
    lp.b(kk) = rows[k].rhs;
  }
  std::tie(lp.lower, lp.upper) = problem.variable_bounds();

  Eigen::VectorXd y = problem.reservation_start();
  double gap = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    lp.objective = problem.gradient(y);
    const auto res = lp::solve_lp(lp);
    if (res.status != lp::LpStatus::optimal)
      throw std::runtime_error(std::string("frank-wolfe oracle: ") + lp::to_string(res.status));
    const Eigen::VectorXd d = res.primal - y;
    gap = std::max(0.0, lp.objective.dot(d));
    if (gap <= opt.tol * (1 + std::abs(problem.objective(y)))) break;
    y += line_search(problem, y, d) * d;
  }
  MenuSolution out = unpack(problem, y);
  out.iterations = it;
  out.fw_gap = gap;
  out.converged = gap <= opt.tol * (1 + std::abs(out.objective));
  out.message = out.converged ? "converged" : "iteration limit";
  return out;
}

}  // namespace

MenuSolution solve_infinite_menu(const DiscretizedProblem& problem, const SolveOptions& options) {
  if (!(options.tol > 0) || options.max_iter < 1) throw std::invalid_argument("solve: bad options");
  return options.method == Method::frank_wolfe ? frank_wolfe(problem, options) : interior_point(problem, options);
}

std::vector<model::BasisFunction> extract_basis(const MenuSolution& sol, const model::Instance& instance,
                                                double dedup_tol) {
  std::vector<model::BasisFunction> out;
  const double gtol = dedup_tol * instance.alpha.cwiseAbs().maxCoeff();
  const double ptol = dedup_tol * std::abs(instance.p_max);
  for (std::size_t i = 0; i < sol.q.size(); ++i) {
    const model::BasisFunction f{instance.alpha.cwiseProduct(sol.q[i]), -sol.p[i], static_cast<int>(i)};
    const bool dup = std::any_of(out.begin(), out.end(), [&](const model::BasisFunction& g) {
      return (g.gradient - f.gradient).lpNorm<Eigen::Infinity>() <= gtol && std::abs(g.intercept - f.intercept) <= ptol;
    });
    if (!dup) out.push_back(f);
  }
  return out;
}

}  // namespace menuprune::solver
