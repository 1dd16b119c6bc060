#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "homog/common.hpp"

namespace homog {

enum class EdgeKind { dirichlet, periodic, neumann_far };

struct AxisSpec {
  int n{2};            // number of nodes
  double h{1.0};       // spacing (uniform, shared by both axes in 2d)
  double origin{0.0};  // coordinate of node 0
  EdgeKind lo{EdgeKind::periodic};
  EdgeKind hi{EdgeKind::periodic};
};

// Uniform tensor grid. Axis 0 is the lateral direction (always periodic in
// 2d), axis 1 the normal direction: either Dirichlet at the bottom row with a
// reflecting far edge at the top, or fully periodic (torus). In 1d axis 0
// plays the normal role. Spacing is shared across axes so that the diagonal
// stencil arms have equal length.
struct Lattice {
  int dim{2};
  std::array<AxisSpec, 2> ax{};

  int nx() const { return ax[0].n; }
  int ny() const { return dim == 2 ? ax[1].n : 1; }
  double h() const { return ax[0].h; }
  std::size_t size() const { return std::size_t(nx()) * std::size_t(ny()); }
  std::size_t id(int i, int j) const { return std::size_t(i) + std::size_t(nx()) * j; }

  Vec pos(int i, int j = 0) const {
    if (dim == 1) return Vec::d1(ax[0].origin + i * ax[0].h);
    return Vec::d2(ax[0].origin + i * ax[0].h, ax[1].origin + j * ax[1].h);
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw ShapeError("lattice dimension must be 1 or 2");
    for (int k = 0; k < dim; ++k) {
      if (ax[k].n < 3) throw ShapeError("each axis needs at least 3 nodes");
      if (!(ax[k].h > 0.0)) throw ShapeError("lattice spacing must be positive");
      const bool periodic_pair = ax[k].lo == EdgeKind::periodic && ax[k].hi == EdgeKind::periodic;
      const bool wall_pair = ax[k].lo == EdgeKind::dirichlet && ax[k].hi == EdgeKind::neumann_far;
      if (!periodic_pair && !wall_pair)
        throw ShapeError("axis edges must be periodic/periodic or dirichlet/neumann_far");
    }
    if (dim == 2) {
      if (ax[0].lo != EdgeKind::periodic)
        throw ShapeError("2d lattices require a periodic lateral axis");
      if (std::abs(ax[0].h - ax[1].h) > 1e-14 * (ax[0].h + ax[1].h))
        throw ShapeError("2d lattices require equal spacing on both axes");
    }
  }

  // Half-plane strip: one lateral period (n_lateral nodes, spacing
  // period/n_lateral), normal extent >= depth with Dirichlet bottom row at
  // the origin and a reflecting far edge.
  static Lattice halfplane(double lateral_period, int n_lateral, double depth) {
    Lattice lat;
    lat.dim = 2;
    const double h = lateral_period / n_lateral;
    const int ny = int(std::ceil(depth / h)) + 1;
    lat.ax[0] = AxisSpec{n_lateral, h, 0.0, EdgeKind::periodic, EdgeKind::periodic};
    lat.ax[1] = AxisSpec{ny, h, 0.0, EdgeKind::dirichlet, EdgeKind::neumann_far};
    lat.validate();
    return lat;
  }

  // Half-line [0, depth]: Dirichlet at 0, reflecting far edge.
  static Lattice halfline(double depth, double h) {
    Lattice lat;
    lat.dim = 1;
    const int n = int(std::ceil(depth / h)) + 1;
    lat.ax[0] = AxisSpec{n, h, 0.0, EdgeKind::dirichlet, EdgeKind::neumann_far};
    lat.validate();
    return lat;
  }

  // Periodic box [0, period)^dim with n nodes per axis.
  static Lattice torus(int dim, double period, int n) {
    Lattice lat;
    lat.dim = dim;
    const double h = period / n;
    lat.ax[0] = AxisSpec{n, h, 0.0, EdgeKind::periodic, EdgeKind::periodic};
    if (dim == 2) lat.ax[1] = lat.ax[0];
    lat.validate();
    return lat;
  }
};

// A snapshot of grid values at a fixed time.
struct GridFunction {
  std::vector<double> values;
  double time{0.0};
};

}  // namespace homog
