#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "homog/direction.hpp"

namespace homog {

// Half-plane { x . nu >= 0 } with lateral boundary { x . nu = 0 }.
struct HalfPlane {
  Direction nu;
  int dim() const { return nu.dim(); }
};

// Slab Q_L = { |x'| < L, 0 < x_nu < L, |t| < L^2 } in boundary-adapted
// coordinates (x' lateral, x_nu normal); certification region for the
// quadratic slab barriers. In dimension 1 the lateral coordinate is absent.
struct SlabQL {
  int dim{2};
  double L{1.0};

  bool contains(const Vec& x, double t) const {
    const double lat = dim == 2 ? std::abs(x.x) : 0.0;
    const double nrm = dim == 2 ? x.y : x.x;
    return lat < L && nrm > 0.0 && nrm < L && std::abs(t) < L * L;
  }
  // Interior sample nodes for residual certification.
  std::vector<std::pair<Vec, double>> interior_samples(int n) const {
    std::vector<std::pair<Vec, double>> out;
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j)
        for (int k = 1; k < n; ++k) {
          const double lat = (2.0 * i / n - 1.0) * L * 0.95;
          const double nrm = (double(j) / n) * L * 0.95 + 0.01 * L;
          const double t = (2.0 * k / n - 1.0) * L * L * 0.95;
          out.push_back({dim == 2 ? Vec::d2(lat, nrm) : Vec::d1(nrm), t});
        }
    return out;
  }
};

// Parabolic cylinder S_r(x0, t0) = {|x - x0| < r, |t - t0| < r^2}, the
// natural scaling neighbourhood of parabolic equations.
struct ParabolicCylinder {
  Vec center;
  double t0{0.0};
  double r{1.0};

  bool contains(const Vec& x, double t) const {
    return (x - center).norm() < r && std::abs(t - t0) < r * r;
  }
};

enum class GammaCase { gamma1, gamma2, neither };

inline const char* to_string(GammaCase c) {
  switch (c) {
    case GammaCase::gamma1: return "gamma1";
    case GammaCase::gamma2: return "gamma2";
    default: return "neither";
  }
}

// Classified lateral-boundary point: inner normal, normal speed, and which
// cell-problem regime applies there.
struct BoundaryPoint {
  Vec x0;
  double t0{0.0};
  Direction nu;
  double c{0.0};
  GammaCase kind{GammaCase::neither};
};

// ---------------------------------------------------------------------------
// Space-time domains with moving lateral boundary. Three kinds cover the
// workbench: a half-plane translating at constant speed, the piecewise
// rotating graph domain (flat and translating for t < 0, rotating about the
// origin for t >= 0), and a stationary half-plane as the degenerate control.
// ---------------------------------------------------------------------------
struct MovingDomain {
  enum class Kind { flat_moving, rotating_graph, stationary_halfplane };

  Kind kind{Kind::flat_moving};
  int dim{1};
  Direction nu;          // flat kinds: constant inner normal
  double b0{0.0};        // flat kinds: boundary offset at t = 0
  double speed{0.0};     // flat_moving: d/dt of the offset (normal speed)
  double span{1.0};      // extent of the domain beyond the boundary (for grids)

  static MovingDomain flat(int dim, const Direction& nu, double b0, double speed, double span) {
    MovingDomain d;
    d.kind = Kind::flat_moving;
    d.dim = dim;
    d.nu = nu;
    d.b0 = b0;
    d.speed = speed;
    d.span = span;
    return d;
  }
  static MovingDomain stationary(int dim, const Direction& nu, double b0, double span) {
    MovingDomain d = flat(dim, nu, b0, 0.0, span);
    d.kind = Kind::stationary_halfplane;
    return d;
  }
  // Omega(t) = {y > t} for t < 0, {y - tan(t) x > t} for t >= 0 (dim 2).
  static MovingDomain rotating() {
    MovingDomain d;
    d.kind = Kind::rotating_graph;
    d.dim = 2;
    return d;
  }

  double boundary_offset(double t) const {
    if (kind == Kind::rotating_graph)
      throw PreconditionError("boundary_offset applies to flat domains only");
    return b0 + speed * t;
  }

  // Signed level function: positive inside, zero on the lateral boundary.
  double level(const Vec& x, double t) const {
    switch (kind) {
      case Kind::flat_moving:
      case Kind::stationary_halfplane:
        return x.dot(nu.nu) - boundary_offset(t);
      case Kind::rotating_graph:
        if (t < 0.0) return x.y - t;
        return x.y - std::tan(t) * x.x - t;
    }
    return 0.0;
  }

  bool contains(const Vec& x, double t) const { return level(x, t) > 0.0; }

  bool on_lateral_boundary(const Vec& x, double t, double tol = 1e-9) const {
    return std::abs(level(x, t)) <= tol;
  }

  Vec inner_normal(const Vec& x, double t) const {
    (void)x;
    switch (kind) {
      case Kind::flat_moving:
      case Kind::stationary_halfplane:
        return nu.nu;
      case Kind::rotating_graph: {
        if (t < 0.0) return Vec::d2(0.0, 1.0);
        const double s = std::sin(t), c = std::cos(t);
        return Vec::d2(-s, c);
      }
    }
    return nu.nu;
  }

  // Boundary speed in the inner-normal direction at a lateral boundary point.
  double normal_speed(const Vec& x, double t) const {
    switch (kind) {
      case Kind::flat_moving:
        return speed;
      case Kind::stationary_halfplane:
        return 0.0;
      case Kind::rotating_graph: {
        if (t < 0.0) return 1.0;
        // level = y - tan(t) x - t; speed = -d(level)/dt / |grad level|
        const double sec = 1.0 / std::cos(t);
        return (x.x * sec * sec + 1.0) * std::cos(t);
      }
    }
    return 0.0;
  }

  // Finite-difference speed via the level function, for cross-checking the
  // analytic formula: tracks the boundary along the normal ray.
  double normal_speed_fd(const Vec& x, double t, double dt = 1e-6) const {
    const Vec n = inner_normal(x, t);
    auto offset = [&](double tt) {
      // solve level(x + a n, tt) = 0 for a (level is affine along n here)
      const double f0 = level(x, tt);
      const double f1 = level(x + n * 1.0, tt);
      const double slope = f1 - f0;
      if (std::abs(slope) < 1e-14) throw GeometryError("degenerate normal ray");
      return -f0 / slope;
    };
    return (offset(t + dt) - offset(t - dt)) / (2.0 * dt);
  }
};

// ---------------------------------------------------------------------------
// Boundary-point classification. gamma2 requires the inner normal to be
// constant and rational across the sampled time neighborhood with a nonzero
// constant-sign normal speed; gamma1 requires an irrational normal at the
// point; everything else is neither.
// ---------------------------------------------------------------------------
inline BoundaryPoint classify_boundary_point(const MovingDomain& dom, const Vec& x0, double t0,
                                             double nbhd = 0.02, double rat_tol = 1e-6,
                                             int rat_cap = 250) {
  if (!dom.on_lateral_boundary(x0, t0, 1e-9))
    throw GeometryError("classify_boundary_point: (x0, t0) is not on the lateral boundary");

  BoundaryPoint out;
  out.x0 = x0;
  out.t0 = t0;
  const Vec n0 = dom.inner_normal(x0, t0);
  out.c = dom.normal_speed(x0, t0);

  bool normal_constant = true;
  bool speed_sign_constant = std::abs(out.c) > 1e-9;
  const int samples = 5;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 - nbhd + (2.0 * nbhd) * i / samples;
    const Vec ni = dom.inner_normal(x0, t);
    if ((ni - n0).norm() > 1e-9) normal_constant = false;
    const double ci = dom.normal_speed(x0, t);
    if (std::abs(ci) < 1e-9 || ci * out.c < 0.0) speed_sign_constant = false;
  }

  auto rep = rationality(n0, rat_tol, rat_cap);
  out.nu.nu = n0;
  out.nu.rational = rep;
  if (normal_constant && rep && speed_sign_constant)
    out.kind = GammaCase::gamma2;
  else if (!rep)
    out.kind = GammaCase::gamma1;
  else
    out.kind = GammaCase::neither;
  return out;
}

}  // namespace homog
