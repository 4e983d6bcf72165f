#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace menuprune::geometry {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Closed half-plane {x : <normal, x> <= offset}. `origin` records which
/// contract (id >= 0) or domain facet (id < 0) generated it.
template <typename Scalar>
struct HalfPlane {
  Vec2<Scalar> normal = Vec2<Scalar>::Zero();
  Scalar offset = 0;
  int origin = -1;

  /// Signed value <normal,x> - offset; nonpositive inside.
  Scalar violation(const Vec2<Scalar>& x) const { return normal.dot(x) - offset; }
  bool valid() const { return normal.norm() > Scalar(1e-12); }
};

/// x -> <gradient, x> + intercept, with an identifier used for tie-breaks.
template <typename Scalar>
struct AffineFunction {
  Vec2<Scalar> gradient = Vec2<Scalar>::Zero();
  Scalar intercept = 0;
  int id = 0;

  Scalar operator()(const Vec2<Scalar>& x) const { return gradient.dot(x) + intercept; }
};

/// Length and area thresholds below which features are treated as degenerate.
template <typename Scalar>
struct Tolerance {
  Scalar length = Scalar(1e-9);
  Scalar area = Scalar(1e-12);

  static Tolerance for_scale(Scalar diameter) {
    const Scalar d = std::max(diameter, std::numeric_limits<Scalar>::min());
    return {Scalar(1e-9) * d, Scalar(1e-12) * d * d};
  }
};

/// Convex polygon stored as counter-clockwise vertices. `edge_origins()[k]`
/// tags the edge from vertex k to vertex k+1. An empty vertex list is the
/// empty polygon.
template <typename Scalar>
class ConvexPolygon {
 public:
  using Point = Vec2<Scalar>;

  ConvexPolygon() = default;

  explicit ConvexPolygon(std::vector<Point> vertices, std::vector<int> edge_origins = {})
      : vertices_(std::move(vertices)), edge_origins_(std::move(edge_origins)) {
    if (edge_origins_.empty()) {
      edge_origins_.resize(vertices_.size());
      for (std::size_t k = 0; k < vertices_.size(); ++k) edge_origins_[k] = -1 - static_cast<int>(k);
    }
    if (edge_origins_.size() != vertices_.size())
      throw std::invalid_argument("ConvexPolygon: one edge origin per vertex required");
    if (vertices_.size() < 3) {
      vertices_.clear();
      edge_origins_.clear();
    } else if (signed_area() < 0) {
      std::reverse(vertices_.begin(), vertices_.end());
      // edge k (v_k -> v_{k+1}) becomes edge between reversed neighbours
      std::vector<int> tags(edge_origins_.size());
      const std::size_t n = tags.size();
      for (std::size_t k = 0; k < n; ++k) tags[k] = edge_origins_[(2 * n - 2 - k) % n];
      edge_origins_ = std::move(tags);
    }
  }

  /// Axis-aligned rectangle [lo, hi]; edges tagged -1 (bottom), -2 (right),
  /// -3 (top), -4 (left).
  static ConvexPolygon rectangle(const Point& lo, const Point& hi) {
    return ConvexPolygon({lo, Point(hi.x(), lo.y()), hi, Point(lo.x(), hi.y())}, {-1, -2, -3, -4});
  }

  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<int>& edge_origins() const { return edge_origins_; }
  const Point& vertex(std::size_t k) const { return vertices_[k % vertices_.size()]; }

  Scalar signed_area() const {
    if (vertices_.size() < 3) return 0;
    const Point& o = vertices_.front();
    Scalar twice = 0;
    for (std::size_t k = 1; k + 1 < vertices_.size(); ++k) {
      const Point a = vertices_[k] - o;
      const Point b = vertices_[k + 1] - o;
      twice += a.x() * b.y() - a.y() * b.x();
    }
    return twice / 2;
  }
  Scalar area() const { return std::abs(signed_area()); }

  Eigen::AlignedBox<Scalar, 2> bounding_box() const {
    Eigen::AlignedBox<Scalar, 2> box;
    for (const auto& v : vertices_) box.extend(v);
    return box;
  }

  Scalar diameter() const {
    if (empty()) return 0;
    return bounding_box().diagonal().norm();
  }

  /// Half-plane supporting edge k, with the polygon on its feasible side.
  HalfPlane<Scalar> edge_half_plane(std::size_t k) const {
    const Point& a = vertex(k);
    const Point& b = vertex(k + 1);
    const Point d = b - a;
    HalfPlane<Scalar> h;
    h.normal = Point(d.y(), -d.x());  // outward for CCW
    h.offset = h.normal.dot(a);
    h.origin = edge_origins_[k];
    return h;
  }

  bool contains(const Point& x, Scalar tol = 0) const {
    if (empty()) return false;
    for (std::size_t k = 0; k < size(); ++k) {
      const auto h = edge_half_plane(k);
      if (h.violation(x) > tol * h.normal.norm()) return false;
    }
    return true;
  }

 private:
  std::vector<Point> vertices_;
  std::vector<int> edge_origins_;
};

namespace detail {

template <typename Scalar>
ConvexPolygon<Scalar> cleaned(std::vector<Vec2<Scalar>> pts, std::vector<int> tags,
                              const Tolerance<Scalar>& tol) {
  // drop zero-length edges: keep the later vertex so its outgoing tag survives
  bool changed = true;
  while (changed && pts.size() >= 2) {
    changed = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::size_t next = (k + 1) % pts.size();
      if ((pts[k] - pts[next]).norm() <= tol.length) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(k));
        tags.erase(tags.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  if (pts.size() < 3) return {};
  ConvexPolygon<Scalar> out(std::move(pts), std::move(tags));
  if (out.area() < tol.area) return {};
  return out;
}

}  // namespace detail

/// poly ∩ h. Degenerate results (area below tol.area) come back empty.
template <typename Scalar>
ConvexPolygon<Scalar> clip(const ConvexPolygon<Scalar>& poly, const HalfPlane<Scalar>& h,
                           const Tolerance<Scalar>& tol) {
  if (poly.empty()) return {};
  const Scalar norm = h.normal.norm();
  if (!(norm > 0)) return h.offset >= 0 ? poly : ConvexPolygon<Scalar>{};

  const std::size_t n = poly.size();
  std::vector<Scalar> dist(n);
  bool all_in = true, any_strict_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    dist[k] = h.violation(poly.vertex(k)) / norm;
    all_in = all_in && dist[k] <= tol.length;
    any_strict_in = any_strict_in || dist[k] < -tol.length;
  }
  if (all_in) return poly;
  if (!any_strict_in) return {};

  std::vector<Vec2<Scalar>> pts;
  std::vector<int> tags;
  pts.reserve(n + 1);
  tags.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = (k + 1) % n;
    const auto& a = poly.vertex(k);
    const auto& b = poly.vertex(next);
    const Scalar da = dist[k], db = dist[next];
    const int edge = poly.edge_origins()[k];
    const bool a_in = da <= tol.length;
    const bool b_out = db > tol.length;
    if (a_in) {
      if (b_out) {
        if (da < -tol.length) {
          pts.push_back(a);
          tags.push_back(edge);
          pts.push_back(a + (b - a) * (da / (da - db)));
          tags.push_back(h.origin);
        } else {
          pts.push_back(a);
          tags.push_back(h.origin);
        }
      } else {
        pts.push_back(a);
        tags.push_back(edge);
      }
    } else if (db < -tol.length) {
      pts.push_back(a + (b - a) * (da / (da - db)));
      tags.push_back(edge);
    }
  }
  return detail::cleaned(std::move(pts), std::move(tags), tol);
}

template <typename Scalar>
ConvexPolygon<Scalar> clip(const ConvexPolygon<Scalar>& poly, const HalfPlane<Scalar>& h) {
  return clip(poly, h, Tolerance<Scalar>::for_scale(poly.diameter()));
}

template <typename Scalar>
ConvexPolygon<Scalar> intersect(const ConvexPolygon<Scalar>& p, const ConvexPolygon<Scalar>& q,
                                const Tolerance<Scalar>& tol) {
  if (p.empty() || q.empty()) return {};
  ConvexPolygon<Scalar> out = p;
  for (std::size_t k = 0; k < q.size() && !out.empty(); ++k) out = clip(out, q.edge_half_plane(k), tol);
  return out;
}

template <typename Scalar>
ConvexPolygon<Scalar> intersect(const ConvexPolygon<Scalar>& p, const ConvexPolygon<Scalar>& q) {
  return intersect(p, q, Tolerance<Scalar>::for_scale(std::max(p.diameter(), q.diameter())));
}

/// Exact ∬_P (a x + b y + c) dx dy via boundary first moments, taken about
/// the first vertex to limit cancellation.
template <typename Scalar>
Scalar integrate_affine(const ConvexPolygon<Scalar>& poly, Scalar a, Scalar b, Scalar c) {
  if (poly.empty()) return 0;
  const auto& o = poly.vertex(0);
  Scalar twice_area = 0, mx = 0, my = 0;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Vec2<Scalar> p = poly.vertex(k) - o;
    const Vec2<Scalar> q = poly.vertex(k + 1) - o;
    const Scalar cross = p.x() * q.y() - p.y() * q.x();
    twice_area += cross;
    mx += (p.x() + q.x()) * cross;
    my += (p.y() + q.y()) * cross;
  }
  const Scalar area = twice_area / 2;
  return a * mx / 6 + b * my / 6 + (a * o.x() + b * o.y() + c) * area;
}

template <typename Scalar>
Scalar integrate_affine(const ConvexPolygon<Scalar>& poly, const AffineFunction<Scalar>& f) {
  return integrate_affine(poly, f.gradient.x(), f.gradient.y(), f.intercept);
}

/// Maximum of an affine function over a non-empty polygon and a vertex
/// attaining it (first vertex on ties).
template <typename Scalar>
std::pair<Scalar, Vec2<Scalar>> max_affine_gap(const ConvexPolygon<Scalar>& poly,
                                               const AffineFunction<Scalar>& f) {
  if (poly.empty()) throw std::invalid_argument("max_affine_gap: empty polygon");
  std::size_t best = 0;
  Scalar value = f(poly.vertex(0));
  for (std::size_t k = 1; k < poly.size(); ++k) {
    const Scalar v = f(poly.vertex(k));
    if (v > value) {
      value = v;
      best = k;
    }
  }
  return {value, poly.vertex(best)};
}

template <typename Scalar>
struct CellResult {
  ConvexPolygon<Scalar> polygon;
  std::vector<int> active_ids;  // sorted contract ids owning a non-degenerate edge
};

/// Cell {x in domain : f_i(x) >= f_j(x) for all j} of basis[i], built by
/// clipping the domain in basis order. Identical functions go to the lower id.
/// basis[skip], if given, is ignored (the cell within the menu without it).
template <typename Scalar>
CellResult<Scalar> cell_vrep(std::span<const AffineFunction<Scalar>> basis, std::size_t i,
                             const ConvexPolygon<Scalar>& domain, std::size_t skip = std::size_t(-1)) {
  if (i >= basis.size()) throw std::out_of_range("cell_vrep: index out of range");
  if (skip == i) throw std::invalid_argument("cell_vrep: cannot skip the cell's own function");
  const auto tol = Tolerance<Scalar>::for_scale(domain.diameter());
  const auto& fi = basis[i];
  const Scalar gscale = std::max<Scalar>(1, fi.gradient.template lpNorm<Eigen::Infinity>());
  const Scalar cscale = std::max<Scalar>(1, std::abs(fi.intercept));

  ConvexPolygon<Scalar> cell = domain;
  for (std::size_t j = 0; j < basis.size() && !cell.empty(); ++j) {
    if (j == i || j == skip) continue;
    const auto& fj = basis[j];
    HalfPlane<Scalar> h;
    h.normal = fj.gradient - fi.gradient;
    h.offset = fi.intercept - fj.intercept;
    h.origin = fj.id;
    if (h.normal.template lpNorm<Eigen::Infinity>() <= Scalar(1e-12) * gscale) {
      const bool same = std::abs(h.offset) <= Scalar(1e-12) * cscale;
      if ((same && fj.id < fi.id) || (!same && h.offset < 0)) return {};
      continue;
    }
    cell = clip(cell, h, tol);
  }
  CellResult<Scalar> out;
  if (cell.empty()) return out;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    const int tag = cell.edge_origins()[k];
    if (tag >= 0 && (cell.vertex(k + 1) - cell.vertex(k)).norm() > tol.length) out.active_ids.push_back(tag);
  }
  std::sort(out.active_ids.begin(), out.active_ids.end());
  out.active_ids.erase(std::unique(out.active_ids.begin(), out.active_ids.end()), out.active_ids.end());
  out.polygon = std::move(cell);
  return out;
}

using HalfPlaned = HalfPlane<double>;
using Polygon = ConvexPolygon<double>;
using Affine = AffineFunction<double>;

}  // namespace menuprune::geometry
