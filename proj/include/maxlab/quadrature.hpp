#pragma once

// 1-D Gauss-Legendre rules and composite meshes. Meshes are explicit cell
// lists so integrands with known kinks can get cell boundaries exactly at
// the kink locations, and endpoint singularities get graded cells.

#include <functional>
#include <vector>

#include "maxlab/common.hpp"

namespace maxlab {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Newton-on-Legendre construction, cached per order.
const GaussRule& gauss_legendre(int order);

struct Cell {
  double lo;
  double hi;
};

struct CompositeMesh {
  std::vector<Cell> cells;

  double lo() const { return cells.empty() ? 0.0 : cells.front().lo; }
  double hi() const { return cells.empty() ? 0.0 : cells.back().hi; }

  // Split cells at the given interior points (clamped to the mesh span).
  void insert_breakpoints(std::vector<double> pts);

  // Replace each cell with an edge at one of the given points by a dyadic
  // grading toward that edge; resolves integrands with root-type behavior
  // at known locations (typically after insert_breakpoints on the same
  // points).
  void grade_at(const std::vector<double>& pts, int levels);
};

CompositeMesh uniform_mesh(double lo, double hi, int cells);

// Cells shrink geometrically toward `end` (one endpoint of [lo,hi]);
// absorbs integrable endpoint singularities. depth = number of dyadic
// levels; the cell touching `end` has width (hi-lo)*2^-depth.
CompositeMesh graded_mesh(double lo, double hi, double end, int depth);

// Geometric cells on [lo, hi], lo > 0, cell edges at lo*ratio^k.
CompositeMesh geometric_mesh(double lo, double hi, double ratio);

double integrate(const CompositeMesh& mesh, int nodes_per_cell,
                 const std::function<double(double)>& f);

// All Gauss abscissae of the mesh, with their weights, in ascending order.
void mesh_points(const CompositeMesh& mesh, int nodes_per_cell,
                 std::vector<double>& pts, std::vector<double>& wts);

}  // namespace maxlab
