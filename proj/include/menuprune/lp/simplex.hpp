#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace menuprune::lp {

/// maximize <objective, y>  s.t.  A y <= b,  lower <= y <= upper.
/// Empty bound vectors mean "free"; entries may be +-infinity.
template <typename Scalar = double>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector objective;
  Matrix A;
  Vector b;
  Vector lower;
  Vector upper;
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

template <typename Scalar = double>
struct LpSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LpStatus status = LpStatus::infeasible;
  Vector primal;
  Scalar value = 0;
  Vector duals;                  // one per row of A, >= 0
  Vector bound_duals;            // per variable: + for active upper, - for active lower
  std::vector<int> active_rows;  // rows with slack <= 1e-8
  int pivots = 0;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Dictionary simplex on  max c'x, Ax <= b, x >= 0  with one artificial column
// for phase one. Leaving ties go to the smallest basic index.
template <typename Scalar>
class Dictionary {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Dictionary(const Matrix& A, const Vector& b, const Vector& c)
      : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), nonbasic_(n_ + 1), basic_(m_),
        D_(Matrix::Zero(m_ + 2, n_ + 2)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_(i, j) = A(i, j);
      basic_[i] = n_ + i;
      D_(i, n_) = -1;
      D_(i, n_ + 1) = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      D_(m_, j) = -c(j);
    }
    nonbasic_[n_] = -1;
    D_(m_ + 1, n_) = 1;
    pivot_cap_ = 50 * (m_ + n_ + 1);
  }

  LpStatus solve() {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!run(2) || D_(m_ + 1, n_ + 1) < -kEps) return LpStatus::infeasible;
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j < n_ + 1; ++j)
          if (nonbasic_[j] != -1 && std::abs(D_(i, j)) > kEps && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
        if (s >= 0) pivot(i, s);
      }
    }
    return run(1) ? LpStatus::optimal : LpStatus::unbounded;
  }

  Vector primal() const {
    Vector x = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < n_) x(basic_[i]) = D_(i, n_ + 1);
    return x;
  }

  Vector duals() const {
    Vector y = Vector::Zero(m_);
    for (int j = 0; j < n_ + 1; ++j)
      if (nonbasic_[j] >= n_) y(nonbasic_[j] - n_) = D_(m_, j);
    return y;
  }

  Scalar value() const { return D_(m_, n_ + 1); }
  int pivots() const { return pivots_; }

 private:
  static constexpr Scalar kEps = Scalar(1e-11);
  static constexpr Scalar kPivotEps = Scalar(1e-9);
  static constexpr int kBlandAfter = 50;
  static constexpr Scalar kHarris = Scalar(1e-9);

  void pivot(int r, int s) {
    if (++pivots_ > pivot_cap_) throw NumericalFailure("simplex: pivot cap exceeded");
    const Scalar inv = 1 / D_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(D_(i, s)) <= kEps) continue;
      const Scalar f = D_(i, s) * inv;
      D_.row(i) -= f * D_.row(r);
      D_(i, s) = D_(r, s) * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const int x = m_ + phase - 1;
    int degenerate = 0;
    for (;;) {
      // Dantzig pricing; Bland's rule after a run of degenerate pivots
      const bool bland = degenerate >= kBlandAfter;
      int s = -1;
      for (int j = 0; j < n_ + 1; ++j) {
        if (nonbasic_[j] == -phase || D_(x, j) >= -kEps) continue;
        if (s == -1) {
          s = j;
        } else if (bland) {
          if (nonbasic_[j] < nonbasic_[s]) s = j;
        } else if (D_(x, j) < D_(x, s) || (D_(x, j) == D_(x, s) && nonbasic_[j] < nonbasic_[s])) {
          s = j;
        }
      }
      if (s == -1) return true;
      const int r = bland ? leaving_bland(s) : leaving_harris(s);
      if (r == -1) return false;
      degenerate = D_(r, n_ + 1) <= kEps ? degenerate + 1 : 0;
      pivot(r, s);
    }
  }

  Scalar rhs(int i) const { return std::max(D_(i, n_ + 1), Scalar(0)); }

  int leaving_bland(int s) const {
    int r = -1;
    for (int i = 0; i < m_; ++i) {
      if (D_(i, s) <= kPivotEps) continue;
      if (r == -1) {
        r = i;
        continue;
      }
      const Scalar lhs = rhs(i) / D_(i, s);
      const Scalar cur = rhs(r) / D_(r, s);
      if (lhs < cur - kEps || (lhs <= cur + kEps && basic_[i] < basic_[r])) r = i;
    }
    return r;
  }

  // Harris two-pass test: among rows whose ratio is within the relaxed
  // bound, take the largest pivot element.
  int leaving_harris(int s) const {
    Scalar bound = std::numeric_limits<Scalar>::infinity();
    for (int i = 0; i < m_; ++i)
      if (D_(i, s) > kPivotEps) bound = std::min(bound, (rhs(i) + kHarris) / D_(i, s));
    int r = -1;
    for (int i = 0; i < m_; ++i) {
      if (D_(i, s) <= kPivotEps || rhs(i) / D_(i, s) > bound) continue;
      if (r == -1 || D_(i, s) > D_(r, s) || (D_(i, s) == D_(r, s) && basic_[i] < basic_[r])) r = i;
    }
    return r;
  }

  int m_, n_;
  std::vector<int> nonbasic_, basic_;
  Matrix D_;
  int pivots_ = 0;
  int pivot_cap_ = 0;
};

}  // namespace detail

/// Solves a dense LP. Bounds are folded into the standard form
/// (shift, reflection, split of free variables, explicit upper-bound rows).
/// Throws NumericalFailure when the pivot cap 50*(m+n) is exceeded.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp) {
  using Vector = typename LinearProgram<Scalar>::Vector;
  using Matrix = typename LinearProgram<Scalar>::Matrix;
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();

  const int n = static_cast<int>(lp.objective.size());
  const int m = static_cast<int>(lp.b.size());
  if (n < 1) throw std::invalid_argument("solve_lp: no variables");
  if (lp.A.rows() != m || lp.A.cols() != n) throw std::invalid_argument("solve_lp: shape mismatch");
  if (!lp.A.allFinite() || !lp.b.allFinite() || !lp.objective.allFinite())
    throw std::invalid_argument("solve_lp: non-finite data");
  const Vector lower = lp.lower.size() ? lp.lower : Vector::Constant(n, -inf);
  const Vector upper = lp.upper.size() ? lp.upper : Vector::Constant(n, inf);

  // y_j = shift_j + sign_j * x_col(j)  [- x_col2(j) for free variables]
  enum class Kind { shifted, reflected, free };
  std::vector<Kind> kind(n);
  std::vector<int> col(n), col2(n, -1);
  Vector shift = Vector::Zero(n);
  std::vector<int> bound_row(n, -1);
  int ncols = 0, nbound = 0;
  for (int j = 0; j < n; ++j) {
    if (lower(j) > upper(j)) {
      LpSolution<Scalar> out;
      out.status = LpStatus::infeasible;
      return out;
    }
    if (std::isfinite(lower(j))) {
      kind[j] = Kind::shifted;
      shift(j) = lower(j);
      col[j] = ncols++;
      if (std::isfinite(upper(j))) bound_row[j] = nbound++;
    } else if (std::isfinite(upper(j))) {
      kind[j] = Kind::reflected;
      shift(j) = upper(j);
      col[j] = ncols++;
    } else {
      kind[j] = Kind::free;
      col[j] = ncols++;
      col2[j] = ncols++;
    }
  }

  Matrix A = Matrix::Zero(m + nbound, ncols);
  Vector b(m + nbound);
  Vector c = Vector::Zero(ncols);
  b.head(m) = lp.b - lp.A * shift;
  for (int j = 0; j < n; ++j) {
    const Scalar sign = kind[j] == Kind::reflected ? Scalar(-1) : Scalar(1);
    A.block(0, col[j], m, 1) = sign * lp.A.col(j);
    c(col[j]) = sign * lp.objective(j);
    if (col2[j] >= 0) {
      A.block(0, col2[j], m, 1) = -lp.A.col(j);
      c(col2[j]) = -lp.objective(j);
    }
    if (bound_row[j] >= 0) {
      A(m + bound_row[j], col[j]) = 1;
      b(m + bound_row[j]) = upper(j) - lower(j);
    }
  }

  // equilibrate columns, then rows, by their largest entries
  Vector col_scale = Vector::Ones(ncols), row_scale = Vector::Ones(m + nbound);
  for (int j = 0; j < ncols; ++j) {
    const Scalar s = A.col(j).cwiseAbs().maxCoeff();
    if (s > 0) col_scale(j) = s;
  }
  A = A * col_scale.cwiseInverse().asDiagonal();
  c = c.cwiseQuotient(col_scale);
  for (int i = 0; i < m + nbound; ++i) {
    const Scalar s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0) row_scale(i) = s;
  }
  A = row_scale.cwiseInverse().asDiagonal() * A;
  b = b.cwiseQuotient(row_scale);

  detail::Dictionary<Scalar> dict(A, b, c);
  LpSolution<Scalar> out;
  out.status = dict.solve();
  out.pivots = dict.pivots();
  if (out.status != LpStatus::optimal) return out;

  const Vector x = dict.primal().cwiseQuotient(col_scale);
  const Vector y = dict.duals().cwiseQuotient(row_scale);
  out.primal.resize(n);
  out.bound_duals = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    Scalar v = x(col[j]);
    if (kind[j] == Kind::reflected) v = -v;
    if (col2[j] >= 0) v -= x(col2[j]);
    out.primal(j) = shift(j) + v;
  }
  out.value = lp.objective.dot(out.primal);
  out.duals = y.head(m).cwiseMax(Scalar(0));
  // reduced cost of y_j at an active bound
  const Vector reduced = lp.objective - lp.A.transpose() * out.duals;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(upper(j)) && std::abs(out.primal(j) - upper(j)) <= Scalar(1e-9) * (1 + std::abs(upper(j))) &&
        reduced(j) > 0)
      out.bound_duals(j) = reduced(j);
    else if (std::isfinite(lower(j)) && std::abs(out.primal(j) - lower(j)) <= Scalar(1e-9) * (1 + std::abs(lower(j))) &&
             reduced(j) < 0)
      out.bound_duals(j) = reduced(j);
  }
  const Vector slack = lp.b - lp.A * out.primal;
  for (int i = 0; i < m; ++i)
    if (slack(i) <= Scalar(1e-8)) out.active_rows.push_back(i);
  return out;
}

}  // namespace menuprune::lp
