#pragma once

#include "menuprune/model/instance.hpp"

#include <span>
#include <vector>

namespace menuprune::model {

/// Region of the domain where one contract attains the envelope.
struct Cell {
  int id = -1;
  Polygon polygon;
  std::vector<int> neighbors;  // ids of cells meeting this one, sorted
};

/// Polyhedral complex of a menu: one cell per basis function, in menu order.
struct Complex {
  Polygon domain;
  std::vector<Cell> cells;
  std::vector<int> empty_ids;
  long vrep_calls = 0;

  const Cell* find(int id) const;
  double covered_area() const;
};

/// Ids j != i whose function ties with basis[i] at some vertex of `cell`,
/// i.e. whose cell meets `cell` in at least one point.
std::vector<int> touching_ids(std::span<const BasisFunction> basis, std::size_t i, const Polygon& cell);

/// Cells via cell_vrep plus symmetrized touching neighbours.
Complex build_complex(const Menu& menu, const Polygon& domain);

}  // namespace menuprune::model
