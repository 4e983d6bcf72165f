#include "menuprune/model/complex.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace menuprune::model {

const Cell* Complex::find(int id) const {
  for (const auto& c : cells)
    if (c.id == id) return &c;
  return nullptr;
}

double Complex::covered_area() const {
  double a = 0;
  for (const auto& c : cells) a += c.polygon.area();
  return a;
}

std::vector<int> touching_ids(std::span<const BasisFunction> basis, std::size_t i, const Polygon& cell) {
  std::vector<int> out;
  if (cell.empty()) return out;
  const auto& fi = basis[i];
  const double diam = cell.diameter();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (j == i) continue;
    const auto& fj = basis[j];
    const double gscale = fi.gradient.lpNorm<1>() + fj.gradient.lpNorm<1>();
    for (const auto& v : cell.vertices()) {
      const double fv = fi(v);
      const double tol = 1e-8 * (1 + std::abs(fv) + gscale * (v.lpNorm<Eigen::Infinity>() + diam));
      if (fv - fj(v) <= tol) {
        out.push_back(fj.id);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Complex build_complex(const Menu& menu, const Polygon& domain) {
  Complex cx;
  cx.domain = domain;
  const std::span<const BasisFunction> basis(menu.basis);
  cx.cells.resize(basis.size());
  std::set<int> empty;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto res = geometry::cell_vrep(basis, i, domain);
    ++cx.vrep_calls;
    cx.cells[i].id = basis[i].id;
    cx.cells[i].polygon = std::move(res.polygon);
    if (cx.cells[i].polygon.empty()) {
      empty.insert(basis[i].id);
      cx.empty_ids.push_back(basis[i].id);
    }
  }
  std::vector<std::set<int>> nb(basis.size());
  std::map<int, std::size_t> pos_of;
  for (std::size_t i = 0; i < basis.size(); ++i) pos_of[basis[i].id] = i;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (cx.cells[i].polygon.empty()) continue;
    for (int j : touching_ids(basis, i, cx.cells[i].polygon)) {
      if (empty.count(j)) continue;
      nb[i].insert(j);
      nb[pos_of.at(j)].insert(basis[i].id);
    }
  }
  for (std::size_t i = 0; i < basis.size(); ++i) cx.cells[i].neighbors.assign(nb[i].begin(), nb[i].end());
  return cx;
}

}  // namespace menuprune::model
