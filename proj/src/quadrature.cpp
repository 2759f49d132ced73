#include "maxlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace maxlab {

namespace {

GaussRule build_gauss(int order) {
  GaussRule r;
  r.nodes.resize(static_cast<size_t>(order));
  r.weights.resize(static_cast<size_t>(order));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < order; ++i) {
    // Chebyshev-angle initial guess, then Newton on P_order.
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<size_t>(order - 1 - i)] = x;
    r.weights[static_cast<size_t>(order - 1 - i)] =
        2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

std::map<int, GaussRule> g_rules;
std::mutex g_rules_mutex;

}  // namespace

const GaussRule& gauss_legendre(int order) {
  require(order >= 1 && order <= 64, "gauss_legendre: order must be in [1,64]");
  std::lock_guard<std::mutex> lock(g_rules_mutex);
  auto it = g_rules.find(order);
  if (it == g_rules.end()) it = g_rules.emplace(order, build_gauss(order)).first;
  return it->second;
}

void CompositeMesh::insert_breakpoints(std::vector<double> pts) {
  if (cells.empty() || pts.empty()) return;
  std::sort(pts.begin(), pts.end());
  std::vector<Cell> out;
  out.reserve(cells.size() + pts.size());
  for (const Cell& c : cells) {
    double cur = c.lo;
    for (double p : pts) {
      if (p > cur + 1e-14 && p < c.hi - 1e-14) {
        out.push_back({cur, p});
        cur = p;
      }
    }
    out.push_back({cur, c.hi});
  }
  cells = std::move(out);
}

void CompositeMesh::grade_at(const std::vector<double>& pts, int levels) {
  if (cells.empty() || pts.empty() || levels < 1) return;
  auto matches = [&](double edge) {
    for (double p : pts)
      if (std::abs(edge - p) <= 1e-14 * std::max(1.0, std::abs(p))) return true;
    return false;
  };
  std::vector<Cell> out;
  for (const Cell& c : cells) {
    bool at_lo = matches(c.lo);
    bool at_hi = matches(c.hi);
    if (!at_lo && !at_hi) {
      out.push_back(c);
      continue;
    }
    auto append = [&](double a, double b, double end) {
      for (const Cell& s : graded_mesh(a, b, end, levels).cells)
        out.push_back(s);
    };
    if (at_lo && at_hi) {
      double mid = 0.5 * (c.lo + c.hi);
      append(c.lo, mid, c.lo);
      append(mid, c.hi, c.hi);
    } else if (at_lo) {
      append(c.lo, c.hi, c.lo);
    } else {
      append(c.lo, c.hi, c.hi);
    }
  }
  cells = std::move(out);
}

CompositeMesh uniform_mesh(double lo, double hi, int ncells) {
  require(hi > lo, "uniform_mesh: empty interval");
  require(ncells >= 1, "uniform_mesh: need at least one cell");
  CompositeMesh m;
  m.cells.reserve(static_cast<size_t>(ncells));
  for (int i = 0; i < ncells; ++i) {
    double a = lo + (hi - lo) * i / ncells;
    double b = lo + (hi - lo) * (i + 1) / ncells;
    m.cells.push_back({a, b});
  }
  return m;
}

CompositeMesh graded_mesh(double lo, double hi, double end, int depth) {
  require(hi > lo, "graded_mesh: empty interval");
  require(end == lo || end == hi, "graded_mesh: end must be lo or hi");
  require(depth >= 1 && depth <= 60, "graded_mesh: depth must be in [1,60]");
  double len = hi - lo;
  CompositeMesh m;
  m.cells.reserve(static_cast<size_t>(depth) + 1);
  if (end == hi) {
    double prev = lo;
    for (int k = 1; k <= depth; ++k) {
      double edge = hi - len * std::ldexp(1.0, -k);
      if (edge <= prev) continue;
      m.cells.push_back({prev, edge});
      prev = edge;
    }
    if (prev < hi) m.cells.push_back({prev, hi});
  } else {
    double prev = hi;
    for (int k = 1; k <= depth; ++k) {
      double edge = lo + len * std::ldexp(1.0, -k);
      if (edge >= prev) continue;
      m.cells.push_back({edge, prev});
      prev = edge;
    }
    if (prev > lo) m.cells.push_back({lo, prev});
    std::reverse(m.cells.begin(), m.cells.end());
  }
  return m;
}

CompositeMesh geometric_mesh(double lo, double hi, double ratio) {
  require(lo > 0.0 && hi > lo, "geometric_mesh: need 0 < lo < hi");
  require(ratio > 1.0, "geometric_mesh: ratio must exceed 1");
  CompositeMesh m;
  double cur = lo;
  while (cur * ratio < hi) {
    m.cells.push_back({cur, cur * ratio});
    cur *= ratio;
    if (m.cells.size() > 100000) throw domain_error("geometric_mesh: too many cells");
  }
  m.cells.push_back({cur, hi});
  return m;
}

double integrate(const CompositeMesh& mesh, int nodes_per_cell,
                 const std::function<double(double)>& f) {
  const GaussRule& g = gauss_legendre(nodes_per_cell);
  double total = 0.0;
  for (const Cell& c : mesh.cells) {
    double mid = 0.5 * (c.lo + c.hi);
    double hw = 0.5 * (c.hi - c.lo);
    double s = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i)
      s += g.weights[i] * f(mid + hw * g.nodes[i]);
    total += s * hw;
  }
  return total;
}

void mesh_points(const CompositeMesh& mesh, int nodes_per_cell,
                 std::vector<double>& pts, std::vector<double>& wts) {
  const GaussRule& g = gauss_legendre(nodes_per_cell);
  pts.clear();
  wts.clear();
  pts.reserve(mesh.cells.size() * g.nodes.size());
  wts.reserve(mesh.cells.size() * g.nodes.size());
  for (const Cell& c : mesh.cells) {
    double mid = 0.5 * (c.lo + c.hi);
    double hw = 0.5 * (c.hi - c.lo);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      pts.push_back(mid + hw * g.nodes[i]);
      wts.push_back(g.weights[i] * hw);
    }
  }
}

}  // namespace maxlab
