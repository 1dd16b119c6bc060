#pragma once
// Direct simulation of oscillatory Dirichlet problems on moving domains at a
// ladder of scale parameters.  Each rung solves the full problem
//
//     u_t = F(D^2 u, x / eps, t / eps^2)   in  Omega(t),
//     u   = g(x / eps, t / eps^2)          on the lateral boundary,
//     u   = g(x / eps, 0)                  at  t = 0,
//
// with an explicit monotone scheme on a graded grid (fine collar around the
// probed boundary segment, smoothly coarsened far field), probes the solution
// near the boundary at prescribed depths, and compares against the
// homogenized boundary values produced by the cell solvers.  The boundary is
// enforced per time step: the Dirichlet trace is written at the wall, nodes
// swept into the domain are initialized from boundary data, and nodes swept
// out are dropped.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homog/bdata.hpp"
#include "homog/cell.hpp"
#include "homog/common.hpp"
#include "homog/domains.hpp"
#include "homog/effop.hpp"
#include "homog/operators.hpp"

namespace homog {

// ---------------------------------------------------------------------------
// Plan types.
// ---------------------------------------------------------------------------

enum class DepthScaling { eps_R, sqrt_eps_R, bottom };

inline const char* to_string(DepthScaling s) {
  switch (s) {
    case DepthScaling::eps_R: return "eps_R";
    case DepthScaling::sqrt_eps_R: return "sqrt_eps_R";
    case DepthScaling::bottom: return "bottom";
  }
  return "?";
}

struct ProbeSpec {
  std::string id;
  Vec x0;          // lateral probes: a point on the boundary at time t0;
                   // bottom probes: an interior anchor point
  double t0{0.0};  // probe time for lateral probes (bottom probes use eps * R)
  double R{1.0};   // depth multiplier
  DepthScaling scaling{DepthScaling::sqrt_eps_R};
  std::optional<double> reference;  // homogenized value; computed from the
                                    // cell solvers when absent
};

struct SweepBudget {
  double max_node_steps{2.0e10};
  long long max_nodes{2'000'000};
};

struct SweepPlan {
  MovingDomain domain;
  EllipticOperator op = EllipticOperator::heat(1);  // microscopic variables
  TrigPoly g = constant_data(0.0);                  // microscopic variables
  std::vector<double> eps_ladder;  // strictly decreasing; empty -> default
  std::vector<ProbeSpec> probes;
  double collar_width_factor{4.0};  // collar = factor * sqrt(eps)
  double cfl_safety{0.9};
  int phase_samples{4};        // sub-eps snapshots per lateral probe
  double phase_period{1.0};    // s-period of the fast oscillation
  double lateral_period{1.0};  // y-period of the fast oscillation (2-d box)
  SweepBudget budget;
  CellConfig cell;  // configuration for the homogenized references
};

inline std::vector<double> default_eps_ladder(int dim) {
  if (dim == 1) return {0.25, 0.125, 0.0625, 0.03125};
  return {0.25, 0.125, 0.0625};
}

// ---------------------------------------------------------------------------
// Result types.
// ---------------------------------------------------------------------------

struct SweepEntry {
  std::string probe;
  double eps{0.0};
  DepthScaling scaling{DepthScaling::sqrt_eps_R};
  double R{1.0};
  double depth{0.0};  // actual offset used (space for lateral, time for bottom)
  double value{0.0};
  double reference{0.0};
  double deviation{0.0};  // |value - reference|
  std::vector<double> phase_values;  // lateral probes: sub-eps phase snapshots
  double max_abs_u{0.0};             // sup |u| over the whole rung
  double h_fine{0.0};
  double dt{0.0};
  long long steps{0};
};

struct CauchyRow {
  std::string probe;
  double eps_coarse{0.0};
  double eps_fine{0.0};
  double diff{0.0};  // |value(eps_coarse) - value(eps_fine)|
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // one row per (probe, eps), probe-major
  std::vector<CauchyRow> cauchy;
  std::vector<double> eps_used;
  std::vector<std::string> warnings;  // ladder truncation and similar events
};

namespace sweep_detail {

// ---------------------------------------------------------------------------
// Graded one-dimensional grids: fine spacing inside designated intervals, a
// smooth geometric ramp outside (|dh/dx| <= ramp slope), capped coarse
// spacing in the far field.  The ramp keeps adjacent spacings within a
// factor ~1.35 so the nonuniform three-point Laplacian stays well behaved.
// ---------------------------------------------------------------------------

struct Grid1 {
  std::vector<double> x;      // node coordinates, ascending
  std::vector<bool> fine;     // node lies in a fine interval
  double h_fine{0.0};
  double h_coarse{0.0};
};

inline Grid1 build_graded_grid(double lo, double hi, double h_fine, double h_coarse,
                               std::vector<std::pair<double, double>> fine_ivs) {
  if (!(hi > lo)) throw PreconditionError("graded grid: empty span");
  if (!(h_fine > 0.0) || h_coarse < h_fine)
    throw PreconditionError("graded grid: need 0 < h_fine <= h_coarse");
  std::sort(fine_ivs.begin(), fine_ivs.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : fine_ivs) {
    const double a = std::max(lo, iv.first), b = std::min(hi, iv.second);
    if (b <= a) continue;
    if (!merged.empty() && a <= merged.back().second + h_fine)
      merged.back().second = std::max(merged.back().second, b);
    else
      merged.emplace_back(a, b);
  }
  const double slope = 0.35;
  auto dist_to_fine = [&](double x) {
    double d = 1e300;
    for (const auto& iv : merged) {
      if (x < iv.first) d = std::min(d, iv.first - x);
      else if (x > iv.second) d = std::min(d, x - iv.second);
      else return 0.0;
    }
    return d;
  };
  Grid1 g;
  g.h_fine = h_fine;
  g.h_coarse = h_coarse;
  double x = lo;
  while (true) {
    const double d = dist_to_fine(x);
    g.x.push_back(x);
    g.fine.push_back(d == 0.0);
    if (x >= hi) break;
    const double h = std::min(h_coarse, h_fine + slope * d);
    x = std::min(x + h, hi);
    // avoid a degenerate final cell
    if (hi - x < 0.25 * h_fine) x = hi;
  }
  if (g.x.size() < 8) throw PreconditionError("graded grid: too few nodes");
  return g;
}

// ---------------------------------------------------------------------------
// Per-member coefficient evaluation.  Coefficients live in microscopic
// variables; nodes at physical position x are evaluated at (x * inv_len,
// t * inv_len^2).  Time-independent fields are tabulated per node; far-field
// (coarse) nodes use the fast-variable mean so the unresolved oscillation is
// not aliased onto spurious slow modes.
// ---------------------------------------------------------------------------

struct MemberCoef {
  double axx{1.0}, ayy{0.0}, axy{0.0};
  bool time_const{true};
  TrigPoly scale, source;
  std::vector<double> scale_tab, source_tab;  // per node, when time_const
};

struct CoefSet {
  bool extremal{false};
  bool take_max{true};
  double ex_a{1.0}, ex_b{0.0};
  double lip{1.0};  // diffusion magnitude bound (patch sizing)
  double k1{2.0};   // 1-d stability factor: dt * k1 / (h_l h_r) <= 1
  double k2{4.0};   // 2-d stability factor: dt * k2 / h^2 <= 1
  std::vector<MemberCoef> members;
};

inline CoefSet make_coefs(const EllipticOperator& op, int dim, bool mirror_xy) {
  CoefSet cs;
  const OpKind k = op.kind();
  if (k == OpKind::custom)
    throw StencilError("direct sweeps require a stencil form (pointwise operators are not supported)");
  if (k == OpKind::pucci_plus || k == OpKind::pucci_minus) {
    cs.extremal = true;
    cs.take_max = (k == OpKind::pucci_plus);
    cs.ex_a = 0.5 * (op.Lambda() + op.lambda());
    cs.ex_b = 0.5 * (op.Lambda() - op.lambda());
    if (k == OpKind::pucci_minus) cs.ex_b = -cs.ex_b;
    cs.lip = op.Lambda();
    cs.k1 = 2.0 * cs.lip;
    cs.k2 = 4.0 * cs.lip;
    return cs;
  }
  cs.extremal = false;
  cs.take_max = (k != OpKind::bellman_min);
  cs.lip = cs.k1 = cs.k2 = 0.0;
  for (const auto& m : op.members()) {
    MemberCoef mc;
    mc.axx = m.A.xx();
    if (dim == 2) {
      mc.ayy = m.A.yy();
      mc.axy = mirror_xy ? -m.A.xy() : m.A.xy();
      const double off = std::abs(mc.axy);
      if (mc.axx - off < -1e-12 || mc.ayy - off < -1e-12)
        throw StencilError("member matrix is not diagonally dominant in the grid frame");
    } else if (mc.axx < -1e-12) {
      throw StencilError("member matrix has a negative diagonal entry");
    }
    mc.scale = m.scale;
    mc.source = m.source;
    mc.time_const = m.scale.constant_in_time() && m.source.constant_in_time();
    const double smax = m.scale.sup_bound();
    cs.lip = std::max(cs.lip, smax * (dim == 2 ? mc.axx + mc.ayy : std::abs(mc.axx)));
    cs.k1 = std::max(cs.k1, 2.0 * std::abs(mc.axx) * smax);
    if (dim == 2)
      cs.k2 = std::max(cs.k2, 2.0 * (mc.axx + mc.ayy - std::abs(mc.axy)) * smax);
    cs.members.push_back(std::move(mc));
  }
  if (cs.members.empty()) throw PreconditionError("operator has no members");
  if (cs.lip <= 0.0) throw PreconditionError("operator is totally degenerate");
  return cs;
}

// Tabulate time-independent coefficients per node.  `fine` flags select
// pointwise microscopic evaluation; coarse nodes get the fast mean.
inline void tabulate(CoefSet& cs, const std::vector<Vec>& pos, const std::vector<bool>& fine,
                     double inv_len, int dim, double y_period, double s_period) {
  for (auto& mc : cs.members) {
    if (!mc.time_const) continue;
    mc.scale_tab.resize(pos.size());
    mc.source_tab.resize(pos.size());
    const double scale_mean = mc.scale.cell_mean(dim, y_period, s_period);
    const double source_mean = mc.source.cell_mean(dim, y_period, s_period);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (fine[i]) {
        const Vec y = pos[i] * inv_len;
        mc.scale_tab[i] = mc.scale.eval(y, 0.0);
        mc.source_tab[i] = mc.source.eval(y, 0.0);
      } else {
        mc.scale_tab[i] = scale_mean;
        mc.source_tab[i] = source_mean;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Probe bookkeeping shared by the steppers.
// ---------------------------------------------------------------------------

struct Event {
  double t{0.0};
  double xi{0.0};      // scalar inward coordinate to probe (1-d)
  double lat{0.0};     // lateral coordinate (2-d)
  int probe{-1};
  int phase{0};  // snapshot slot within the probe
};

struct RungStats {
  double dt{0.0};
  long long steps{0};
  double max_abs_u{0.0};
};

// ---------------------------------------------------------------------------
// One-dimensional moving-wall stepper on a graded grid.  Works in the scalar
// inward coordinate xi = x . nu; the wall sits at xi = w(t) and the domain is
// xi > w(t).  Physical positions (for coefficient and data evaluation) are
// x = xi * nu_x.
// ---------------------------------------------------------------------------

struct Stepper1D {
  Grid1 grid;
  double nux{1.0};
  double b0{0.0}, speed{0.0};
  CoefSet coefs;
  double inv_len{1.0};
  double cfl{0.9};
  std::function<double(double)> wall_value;          // trace at the wall
  std::function<double(double, double)> entry_value; // (x_phys, t) for nodes entering

  std::vector<double> u;

  void set_initial(const std::function<double(double, bool)>& init) {
    u.resize(grid.x.size());
    for (std::size_t i = 0; i < grid.x.size(); ++i)
      u[i] = init(grid.x[i] * nux, grid.fine[i]);
  }

  double stable_dt() const {
    // Smallest neighbor-product over configurations: interior fine cells give
    // h^2; the wall arm is kept >= h/2 by the snap rule below.
    return cfl * 0.5 * grid.h_fine * grid.h_fine / coefs.k1;
  }

  double interpolate(double xi, int first_active) const {
    const auto& xs = grid.x;
    auto it = std::lower_bound(xs.begin(), xs.end(), xi);
    if (it == xs.begin() || it == xs.end())
      throw PreconditionError("probe position outside the grid");
    const std::size_t j = std::size_t(it - xs.begin());
    const std::size_t i = j - 1;
    if (int(i) < first_active)
      throw PreconditionError("probe position outside the active region");
    const double w = (xi - xs[i]) / (xs[j] - xs[i]);
    return (1.0 - w) * u[i] + w * u[j];
  }

  double node_rhs(std::size_t i, double xl_pos, double ul, double s,
                  const double* sig, const double* src, std::size_t nm) const {
    const auto& xs = grid.x;
    const std::size_t n = xs.size();
    const double hr = (i + 1 < n) ? xs[i + 1] - xs[i] : xs[i] - xs[i - 1];
    const double ur = (i + 1 < n) ? u[i + 1] : u[i - 1];  // reflecting far edge
    const double hl = xs[i] - xl_pos;
    const double q =
        2.0 * ((ur - u[i]) / hr + (ul - u[i]) / hl) / (hl + hr);
    if (coefs.extremal) return coefs.ex_a * q + coefs.ex_b * std::abs(q);
    double best = coefs.take_max ? -1e300 : 1e300;
    for (std::size_t m = 0; m < nm; ++m) {
      const double v = sig[m] * (coefs.members[m].axx * q) + src[m];
      best = coefs.take_max ? std::max(best, v) : std::min(best, v);
    }
    (void)s;
    return best;
  }

  // March until all events are consumed; `record` receives (event, value at
  // the nearest time level).
  RungStats march(std::vector<Event> events,
                  const std::function<void(const Event&, double)>& record) {
    std::stable_sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });
    const double dt = stable_dt();
    const auto& xs = grid.x;
    const std::size_t n = xs.size();
    std::vector<double> u_next(n, 0.0);
    const std::size_t nm = coefs.members.size();
    std::vector<double> sig(std::max<std::size_t>(nm, 1), 0.0);
    std::vector<double> src(std::max<std::size_t>(nm, 1), 0.0);
    RungStats stats;
    stats.dt = dt;
    std::size_t next_ev = 0;
    int iw_prev = -1;
    for (long long nstep = 0;; ++nstep) {
      const double t = double(nstep) * dt;
      const double s = t * inv_len * inv_len;
      // --- wall update at the current level -------------------------------
      const double w = b0 + speed * t;
      int iw = int(std::lower_bound(xs.begin(), xs.end(), w) - xs.begin());
      if (iw >= int(n) - 2) throw PreconditionError("wall left the grid");
      if (iw_prev >= 0 && iw < iw_prev)
        for (int j = iw; j < iw_prev; ++j)  // nodes swept into the domain
          u[j] = entry_value(xs[j] * nux, t);
      iw_prev = iw;
      const double gap = xs[std::size_t(iw)] - w;
      const double h0 = (iw + 1 < int(n)) ? xs[std::size_t(iw) + 1] - xs[std::size_t(iw)]
                                          : grid.h_fine;
      const bool snap = gap < 0.5 * h0;
      const double gw = wall_value(t);
      int first_unknown = iw;
      if (snap) {
        u[std::size_t(iw)] = gw;  // Dirichlet trace written onto the wall node
        first_unknown = iw + 1;
      }
      if (nstep == 0)
        for (std::size_t i = std::size_t(iw); i < n; ++i)
          stats.max_abs_u = std::max(stats.max_abs_u, std::abs(u[i]));
      // --- probes at this level -------------------------------------------
      while (next_ev < events.size() && events[next_ev].t < t + 0.5 * dt) {
        const Event& ev = events[next_ev];
        record(ev, interpolate(ev.xi, iw));
        ++next_ev;
      }
      if (next_ev >= events.size()) {
        stats.steps = nstep;
        break;
      }
      // --- explicit step ---------------------------------------------------
      for (std::size_t i = std::size_t(first_unknown); i < n; ++i) {
        if (!coefs.extremal) {
          for (std::size_t m = 0; m < nm; ++m) {
            const auto& mc = coefs.members[m];
            if (mc.time_const) {
              sig[m] = mc.scale_tab[i];
              src[m] = mc.source_tab[i];
            } else {
              const Vec y = Vec::d1(xs[i] * nux * inv_len);
              sig[m] = mc.scale.eval(y, s);
              src[m] = mc.source.eval(y, s);
            }
          }
        }
        double xl_pos, ul;
        if (int(i) == first_unknown && !snap) {
          xl_pos = w;   // ghost arm reaching down to the wall
          ul = gw;
        } else {
          xl_pos = xs[i - 1];
          ul = u[i - 1];
        }
        u_next[i] = u[i] + dt * node_rhs(i, xl_pos, ul, s, sig.data(), src.data(), nm);
      }
      for (std::size_t i = std::size_t(first_unknown); i < n; ++i) {
        u[i] = u_next[i];
        const double a = std::abs(u[i]);
        if (a > stats.max_abs_u) stats.max_abs_u = a;
      }
    }
    return stats;
  }
};

// ---------------------------------------------------------------------------
// Two-dimensional moving-wall stepper: uniform grid, lateral periodic wrap
// over one fast cell, reflecting far edge, Dirichlet row snapped to the wall
// (O(h) enforcement).  Requires an axis-aligned flat boundary (nu = ±e2); the
// lateral axis is physical x, the normal coordinate is xi = y . nu_y.
// ---------------------------------------------------------------------------

struct Stepper2D {
  int nx{0}, ny{0};
  double h{0.0};
  double xi0{0.0};
  double nuy{1.0};  // physical y = xi * nuy
  double b0{0.0}, speed{0.0};
  CoefSet coefs;
  double inv_len{1.0};
  double cfl{0.9};
  std::function<double(double, double)> wall_value;           // (x_phys, t)
  std::function<double(double, double, double)> entry_value;  // (x, y_phys, t)

  std::vector<double> u;

  std::size_t idx(int i, int j) const { return std::size_t(i) + std::size_t(j) * std::size_t(nx); }
  double lat(int i) const { return double(i) * h; }
  double xi(int j) const { return xi0 + double(j) * h; }

  void set_initial(const std::function<double(double, double)>& init) {
    u.assign(std::size_t(nx) * std::size_t(ny), 0.0);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) u[idx(i, j)] = init(lat(i), xi(j) * nuy);
  }

  double stable_dt() const { return cfl * h * h / coefs.k2; }

  double interpolate(double x_lat, double xi_p, int jw) const {
    const double fx = x_lat / h;
    double fj = (xi_p - xi0) / h;
    const int j0 = int(std::floor(fj));
    if (j0 < jw || j0 + 1 >= ny)
      throw PreconditionError("probe position outside the active region");
    const int i0 = int(std::floor(fx)) % nx;
    const int i0w = (i0 % nx + nx) % nx;
    const int i1 = (i0w + 1) % nx;
    const double wx = fx - std::floor(fx);
    const double wj = fj - double(j0);
    const double a = (1.0 - wx) * u[idx(i0w, j0)] + wx * u[idx(i1, j0)];
    const double b = (1.0 - wx) * u[idx(i0w, j0 + 1)] + wx * u[idx(i1, j0 + 1)];
    return (1.0 - wj) * a + wj * b;
  }

  RungStats march(std::vector<Event> events,
                  const std::function<void(const Event&, double)>& record) {
    std::stable_sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });
    const double dt = stable_dt();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> u_next(u.size(), 0.0);
    const std::size_t nm = coefs.members.size();
    std::vector<double> sig(std::max<std::size_t>(nm, 1), 0.0);
    std::vector<double> src(std::max<std::size_t>(nm, 1), 0.0);
    RungStats stats;
    stats.dt = dt;
    std::size_t next_ev = 0;
    int jw_prev = -1;
    for (long long nstep = 0;; ++nstep) {
      const double t = double(nstep) * dt;
      const double s = t * inv_len * inv_len;
      const double w = b0 + speed * t;
      int jw = int(std::ceil((w - xi0) / h - 1e-12));
      if (jw < 0) jw = 0;
      if (jw >= ny - 3) throw PreconditionError("wall left the grid");
      if (jw_prev >= 0 && jw < jw_prev)
        for (int j = jw; j < jw_prev; ++j)
          for (int i = 0; i < nx; ++i) u[idx(i, j)] = entry_value(lat(i), xi(j) * nuy, t);
      jw_prev = jw;
      for (int i = 0; i < nx; ++i) u[idx(i, jw)] = wall_value(lat(i), t);
      if (nstep == 0)
        for (int j = jw; j < ny; ++j)
          for (int i = 0; i < nx; ++i)
            stats.max_abs_u = std::max(stats.max_abs_u, std::abs(u[idx(i, j)]));
      while (next_ev < events.size() && events[next_ev].t < t + 0.5 * dt) {
        const Event& ev = events[next_ev];
        record(ev, interpolate(ev.lat, ev.xi, jw));
        ++next_ev;
      }
      if (next_ev >= events.size()) {
        stats.steps = nstep;
        break;
      }
      for (int j = jw + 1; j < ny; ++j) {
        const int jm = j - 1;
        const int jp = (j + 1 <= ny - 1) ? j + 1 : ny - 2;  // reflecting far edge
        for (int i = 0; i < nx; ++i) {
          const int im = (i - 1 + nx) % nx;
          const int ip = (i + 1) % nx;
          const double c = u[idx(i, j)];
          const double d0 = (u[idx(im, j)] + u[idx(ip, j)] - 2.0 * c) * inv_h2;
          const double d1 = (u[idx(i, jm)] + u[idx(i, jp)] - 2.0 * c) * inv_h2;
          double rhs;
          if (coefs.extremal) {
            const double dA = (u[idx(ip, jp)] + u[idx(im, jm)] - 2.0 * c) * (0.5 * inv_h2);
            const double dB = (u[idx(ip, jm)] + u[idx(im, jp)] - 2.0 * c) * (0.5 * inv_h2);
            const double ax =
                coefs.ex_a * (d0 + d1) + coefs.ex_b * (std::abs(d0) + std::abs(d1));
            if (coefs.ex_b == 0.0) {
              rhs = ax;
            } else {
              const double dg =
                  coefs.ex_a * (dA + dB) + coefs.ex_b * (std::abs(dA) + std::abs(dB));
              rhs = coefs.take_max ? std::max(ax, dg) : std::min(ax, dg);
            }
          } else {
            double dA = 0.0, dB = 0.0;
            bool have_diag = false;
            for (std::size_t m = 0; m < nm; ++m) {
              const auto& mc = coefs.members[m];
              if (mc.axy != 0.0 && !have_diag) {
                dA = (u[idx(ip, jp)] + u[idx(im, jm)] - 2.0 * c) * (0.5 * inv_h2);
                dB = (u[idx(ip, jm)] + u[idx(im, jp)] - 2.0 * c) * (0.5 * inv_h2);
                have_diag = true;
              }
              if (mc.time_const) {
                sig[m] = mc.scale_tab[idx(i, j)];
                src[m] = mc.source_tab[idx(i, j)];
              } else {
                const Vec y = Vec::d2(lat(i), xi(j) * nuy) * inv_len;
                sig[m] = mc.scale.eval(y, s);
                src[m] = mc.source.eval(y, s);
              }
            }
            rhs = coefs.take_max ? -1e300 : 1e300;
            for (std::size_t m = 0; m < nm; ++m) {
              const auto& mc = coefs.members[m];
              const double off = std::abs(mc.axy);
              const double dd = 2.0 * (mc.axy >= 0.0 ? dA : dB);
              const double tr = (mc.axx - off) * d0 + (mc.ayy - off) * d1 + off * dd;
              const double v = sig[m] * tr + src[m];
              rhs = coefs.take_max ? std::max(rhs, v) : std::min(rhs, v);
            }
          }
          u_next[idx(i, j)] = c + dt * rhs;
        }
      }
      for (int j = jw + 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double v = u_next[idx(i, j)];
          u[idx(i, j)] = v;
          const double a = std::abs(v);
          if (a > stats.max_abs_u) stats.max_abs_u = a;
        }
    }
    return stats;
  }
};

}  // namespace sweep_detail

inline bool data_is_constant(const SweepPlan& plan) {
  if (!plan.g.terms.empty()) return false;
  for (const auto& m : plan.op.members())
    if (!m.source.terms.empty() || m.source.constant != 0.0) return false;
  return true;
}

// Homogenized reference for one probe, from the cell solvers (unless pinned
// in the probe spec).  Constant data short-circuits to the constant.
inline double probe_reference(const SweepPlan& plan, const ProbeSpec& p) {
  if (p.reference) return *p.reference;
  if (data_is_constant(plan)) return plan.g.constant;
  if (p.scaling == DepthScaling::bottom)
    return solve_bottom(p.x0, plan.op, plan.g, plan.cell).value;
  const BoundaryPoint pt = classify_boundary_point(plan.domain, p.x0, p.t0);
  return homogenized_boundary_data(pt, plan.op, plan.g, plan.cell).tail.value;
}

namespace sweep_detail {

inline void validate_plan(const SweepPlan& plan, const std::vector<double>& ladder) {
  const int dim = plan.domain.dim;
  if (dim != 1 && dim != 2) throw ShapeError("sweeps support one or two space dimensions");
  if (plan.op.dim() != dim) throw ShapeError("operator dimension does not match the domain");
  if (ladder.empty()) throw PreconditionError("scale ladder is empty");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0) || ladder[k] >= 1.0)
      throw PreconditionError("scale parameters must lie in (0, 1)");
    if (k > 0 && ladder[k] >= ladder[k - 1])
      throw PreconditionError("scale ladder must be strictly decreasing");
  }
  if (plan.domain.kind == MovingDomain::Kind::rotating_graph)
    throw ConfigError("direct sweeps support flat boundaries only");
  if (dim == 2 && std::abs(plan.domain.nu.nu.x) > 1e-12)
    throw ConfigError("two-dimensional sweeps require an axis-aligned normal (nu = ±e2)");
  if (plan.probes.empty()) throw PreconditionError("sweep plan has no probes");
  if (plan.phase_samples < 1) throw PreconditionError("phase_samples must be >= 1");
  for (const auto& p : plan.probes) {
    if (p.id.empty()) throw PreconditionError("every probe needs a nonempty id");
    if (!(p.R > 0.0)) throw PreconditionError("probe depth multiplier must be positive");
    if (p.scaling == DepthScaling::bottom) {
      const double t_last = ladder.front() * (p.R + plan.phase_period);
      if (!plan.domain.contains(p.x0, 0.0) || !plan.domain.contains(p.x0, t_last))
        throw PreconditionError("bottom probe anchor must stay inside the domain");
    } else {
      if (!(p.t0 > 0.0)) throw PreconditionError("lateral probes need t0 > 0");
      if (!plan.domain.on_lateral_boundary(p.x0, p.t0, 1e-9))
        throw PreconditionError("lateral probe point must lie on the boundary at its time");
    }
  }
}

// Scalar inward coordinate of a physical point.
inline double inward_coord(const MovingDomain& dom, const Vec& x) {
  return x.dot(dom.nu.nu);
}

// Relaxed bulk value of oscillatory initial data: the state a fast cell decays
// to away from all boundaries.  For a scaled-trace operator sigma(y,s) tr(A
// D2u) the invariant measure weights the average by 1 / mean_s sigma, so the
// limit is the weighted mean of the initial slice g(., 0); every other
// operator in stencil form uses the plain mean of the slice (exact for
// constant-coefficient members, and only steering the far coarse zone
// otherwise).
inline double relaxed_mean(const EllipticOperator& op, const TrigPoly& g, int dim,
                           double y_period, double s_period) {
  const bool weighted = op.kind() == OpKind::linear_trace &&
                        !op.members().empty() &&
                        !op.members().front().scale.terms.empty();
  const int n = 512, ns = 32;
  double num = 0.0, den = 0.0;
  const int ny = dim == 2 ? n : 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double y1 = y_period * (i + 0.5) / n;
      const double y2 = y_period * (j + 0.5) / n;
      const Vec y = dim == 2 ? Vec::d2(y1, y2) : Vec::d1(y1);
      double w = 1.0;
      if (weighted) {
        double sbar = 0.0;
        for (int k = 0; k < ns; ++k) sbar += op.members().front().scale.eval(y, s_period * (k + 0.5) / ns);
        sbar /= ns;
        if (!(sbar > 0.0)) throw PreconditionError("scaled-trace weight must stay positive");
        w = 1.0 / sbar;
      }
      num += w * g.eval(y, 0.0);
      den += w;
    }
  }
  return num / den;
}

struct RungSetup {
  double h_fine{0.0};
  long long nodes{0};
  long long steps{0};
  double node_steps{0.0};
};

}  // namespace sweep_detail

inline SweepResult run_sweep(const SweepPlan& plan) {
  using namespace sweep_detail;
  std::vector<double> ladder =
      plan.eps_ladder.empty() ? default_eps_ladder(plan.domain.dim) : plan.eps_ladder;
  validate_plan(plan, ladder);
  const int dim = plan.domain.dim;
  const MovingDomain& dom = plan.domain;
  const double nux = dim == 1 ? dom.nu.nu.x : dom.nu.nu.y;  // sign of the normal axis

  SweepResult out;
  const std::size_t np = plan.probes.size();
  // Probes at the same anchor share one reference solve: the homogenized value
  // depends on the anchor alone, not on the depth scaling or multiplier.
  std::vector<double> refs(np);
  std::map<std::array<double, 4>, double> ref_cache;
  for (std::size_t p = 0; p < np; ++p) {
    const ProbeSpec& spec = plan.probes[p];
    const std::array<double, 4> key{spec.scaling == DepthScaling::bottom ? 1.0 : 0.0,
                                    spec.x0.x, spec.x0.y, spec.t0};
    if (spec.reference) {
      refs[p] = *spec.reference;
      continue;
    }
    auto it = ref_cache.find(key);
    if (it == ref_cache.end()) it = ref_cache.emplace(key, probe_reference(plan, spec)).first;
    refs[p] = it->second;
  }

  // values[p] collects (eps, entry) pairs in ladder order
  std::vector<std::vector<SweepEntry>> values(np);

  CoefSet base_coefs = make_coefs(plan.op, dim, dim == 2 && nux < 0.0);
  const double g_mean = relaxed_mean(plan.op, plan.g, dim, plan.lateral_period, plan.phase_period);

  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double eps = ladder[k];
    const double inv_len = 1.0 / eps;
    // One sub-eps phase window: the boundary trace repeats on this macro-time
    // scale, so snapshots spread across it sample the trace phase uniformly.
    const double s_slow = eps * plan.phase_period;
    const int J = plan.phase_samples;

    // --- events and probe geometry --------------------------------------
    std::vector<Event> events;
    std::vector<double> depths(np, 0.0);
    double t_max = 0.0;
    double bottom_patch_max = 0.0;
    std::vector<std::pair<double, double>> fine_ivs;
    for (std::size_t p = 0; p < np; ++p) {
      const ProbeSpec& pr = plan.probes[p];
      if (pr.scaling == DepthScaling::bottom) {
        const double tp = eps * pr.R;
        const double xi_p = inward_coord(dom, pr.x0);
        depths[p] = tp;
        // Bottom probes also spread J snapshots across one trace period: the
        // settled bulk value is constant in time, while the oscillating tail
        // of the wall influence (a pure trace harmonic) averages out.
        for (int j = 0; j < J; ++j) {
          const double tj = tp + double(j) * s_slow / double(J);
          events.push_back({tj, xi_p, pr.x0.x, int(p), j});
          t_max = std::max(t_max, tj);
        }
        double rb = 4.0 * std::sqrt(base_coefs.lip * (tp + s_slow)) + 16.0 * (eps * eps / 4.0);
        // Snap the resolved patch to a whole number of data microperiods:
        // a partial period would carry O(eps) invariant-measure mass that
        // settles as a constant offset on the probe.
        const double per = eps * plan.lateral_period;
        rb = 0.5 * per * std::ceil(2.0 * rb / per - 1e-9);
        fine_ivs.emplace_back(xi_p - rb, xi_p + rb);
        bottom_patch_max = std::max(bottom_patch_max, xi_p + rb);
      } else {
        const double depth =
            pr.scaling == DepthScaling::eps_R ? eps * pr.R : std::sqrt(eps) * pr.R;
        depths[p] = depth;
        for (int j = 0; j < J; ++j) {
          const double tj = pr.t0 + double(j) * s_slow / double(J);
          events.push_back({tj, dom.boundary_offset(tj) + depth, pr.x0.x, int(p), j});
          t_max = std::max(t_max, tj);
        }
      }
    }

    const double h_fine = eps * eps / 4.0;
    for (std::size_t p = 0; p < np; ++p)
      if (plan.probes[p].scaling != DepthScaling::bottom && depths[p] < 4.0 * h_fine)
        throw PreconditionError("probe depth falls below four grid cells");

    const double w0 = dom.boundary_offset(0.0), w1 = dom.boundary_offset(t_max);
    const double w_lo = std::min(w0, w1), w_hi = std::max(w0, w1);
    const double collar =
        std::max(plan.collar_width_factor * std::sqrt(eps),
                 *std::max_element(depths.begin(), depths.end()) + 8.0 * h_fine);
    const double lo = w_lo - 2.0 * h_fine;
    const double hi = std::max(w_hi + dom.span, bottom_patch_max + 0.5);
    fine_ivs.emplace_back(lo, w_hi + collar);

    // --- budget gate ------------------------------------------------------
    double est_nodes, dt_est;
    if (dim == 1) {
      Grid1 probe_grid = build_graded_grid(
          lo, hi, h_fine, std::max(h_fine, std::min(std::sqrt(eps) / 4.0, (hi - lo) / 64.0)),
          fine_ivs);
      est_nodes = double(probe_grid.x.size());
      dt_est = plan.cfl_safety * 0.5 * h_fine * h_fine / base_coefs.k1;
      // keep the grid for the run below
      const double est_steps = std::ceil(t_max / dt_est) + 1.0;
      const double est_ns = est_nodes * est_steps;
      if (est_nodes > double(plan.budget.max_nodes) || est_ns > plan.budget.max_node_steps) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "ladder truncated at eps=%g: estimated %.3g node-steps (%lld nodes) "
                      "exceeds budget; dropping this and all finer rungs",
                      eps, est_ns, (long long)est_nodes);
        out.warnings.emplace_back(buf);
        break;
      }

      // --- one-dimensional rung --------------------------------------------
      Stepper1D st;
      st.grid = std::move(probe_grid);
      st.nux = nux;
      st.b0 = dom.b0;
      st.speed = dom.speed;
      st.coefs = base_coefs;
      st.inv_len = inv_len;
      st.cfl = plan.cfl_safety;
      const TrigPoly& g = plan.g;
      st.wall_value = [&dom, &g, nux, inv_len](double t) {
        const double xw = dom.boundary_offset(t) * nux;
        return g.eval(Vec::d1(xw * inv_len), t * inv_len * inv_len);
      };
      st.entry_value = [&g, inv_len](double x, double t) {
        return g.eval(Vec::d1(x * inv_len), t * inv_len * inv_len);
      };
      {
        std::vector<Vec> pos(st.grid.x.size());
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = Vec::d1(st.grid.x[i] * nux);
        tabulate(st.coefs, pos, st.grid.fine, inv_len, 1, plan.lateral_period,
                 plan.phase_period);
      }
      st.set_initial([&g, inv_len, g_mean](double x, bool fine) {
        return fine ? g.eval(Vec::d1(x * inv_len), 0.0) : g_mean;
      });
      std::vector<std::vector<double>> recorded(np);
      for (std::size_t p = 0; p < np; ++p) recorded[p].assign(std::size_t(J), 0.0);
      RungStats stats = st.march(events, [&recorded](const Event& ev, double v) {
        recorded[std::size_t(ev.probe)][std::size_t(ev.phase)] = v;
      });
      for (std::size_t p = 0; p < np; ++p) {
        SweepEntry e;
        e.probe = plan.probes[p].id;
        e.eps = eps;
        e.scaling = plan.probes[p].scaling;
        e.R = plan.probes[p].R;
        e.depth = depths[p];
        // Probe value: mean over the sub-eps phase snapshots (the trace
        // phase is not part of the limit).
        e.value = 0.0;
        for (double v : recorded[p]) e.value += v;
        e.value /= double(recorded[p].size());
        e.reference = refs[p];
        e.deviation = std::abs(e.value - e.reference);
        e.phase_values = recorded[p];
        e.max_abs_u = stats.max_abs_u;
        e.h_fine = h_fine;
        e.dt = stats.dt;
        e.steps = stats.steps;
        values[p].push_back(std::move(e));
      }
    } else {
      // --- two-dimensional rung ---------------------------------------------
      const double box = eps * plan.lateral_period;
      const int nx = std::max(4, int(std::ceil(box / h_fine - 1e-12)));
      const double h = box / double(nx);
      const double xi_min = lo, xi_max = hi;
      const int ny = int(std::ceil((xi_max - xi_min) / h)) + 1;
      const double est_ns0 = double(nx) * double(ny);
      dt_est = plan.cfl_safety * h * h / base_coefs.k2;
      const double est_steps = std::ceil(t_max / dt_est) + 1.0;
      if (est_ns0 > double(plan.budget.max_nodes) ||
          est_ns0 * est_steps > plan.budget.max_node_steps) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "ladder truncated at eps=%g: estimated %.3g node-steps (%lld nodes) "
                      "exceeds budget; dropping this and all finer rungs",
                      eps, est_ns0 * est_steps, (long long)est_ns0);
        out.warnings.emplace_back(buf);
        break;
      }
      Stepper2D st;
      st.nx = nx;
      st.ny = ny;
      st.h = h;
      st.xi0 = xi_min;
      st.nuy = nux;
      st.b0 = dom.b0;
      st.speed = dom.speed;
      st.coefs = base_coefs;
      st.inv_len = inv_len;
      st.cfl = plan.cfl_safety;
      const TrigPoly& g = plan.g;
      st.wall_value = [&dom, &g, nux, inv_len](double x, double t) {
        const double yw = dom.boundary_offset(t) * nux;
        return g.eval(Vec::d2(x * inv_len, yw * inv_len), t * inv_len * inv_len);
      };
      st.entry_value = [&g, inv_len](double x, double y, double t) {
        return g.eval(Vec::d2(x * inv_len, y * inv_len), t * inv_len * inv_len);
      };
      {
        std::vector<Vec> pos(std::size_t(nx) * std::size_t(ny));
        std::vector<bool> fine(pos.size(), true);
        for (int j = 0; j < ny; ++j)
          for (int i = 0; i < nx; ++i)
            pos[st.idx(i, j)] = Vec::d2(st.lat(i), st.xi(j) * nux);
        tabulate(st.coefs, pos, fine, inv_len, 2, plan.lateral_period, plan.phase_period);
      }
      st.set_initial([&g, inv_len](double x, double y) {
        return g.eval(Vec::d2(x * inv_len, y * inv_len), 0.0);
      });
      std::vector<std::vector<double>> recorded(np);
      for (std::size_t p = 0; p < np; ++p) recorded[p].assign(std::size_t(J), 0.0);
      RungStats stats = st.march(events, [&recorded](const Event& ev, double v) {
        recorded[std::size_t(ev.probe)][std::size_t(ev.phase)] = v;
      });
      for (std::size_t p = 0; p < np; ++p) {
        SweepEntry e;
        e.probe = plan.probes[p].id;
        e.eps = eps;
        e.scaling = plan.probes[p].scaling;
        e.R = plan.probes[p].R;
        e.depth = depths[p];
        // Probe value: mean over the sub-eps phase snapshots (the trace
        // phase is not part of the limit).
        e.value = 0.0;
        for (double v : recorded[p]) e.value += v;
        e.value /= double(recorded[p].size());
        e.reference = refs[p];
        e.deviation = std::abs(e.value - e.reference);
        e.phase_values = recorded[p];
        e.max_abs_u = stats.max_abs_u;
        e.h_fine = h;
        e.dt = stats.dt;
        e.steps = stats.steps;
        values[p].push_back(std::move(e));
      }
    }
    out.eps_used.push_back(eps);
  }

  if (out.eps_used.empty())
    throw PreconditionError("no ladder rung fits the sweep budget");

  for (std::size_t p = 0; p < np; ++p) {
    const auto& rows = values[p];
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      CauchyRow c;
      c.probe = plan.probes[p].id;
      c.eps_coarse = rows[k].eps;
      c.eps_fine = rows[k + 1].eps;
      c.diff = std::abs(rows[k].value - rows[k + 1].value);
      out.cauchy.push_back(c);
    }
    for (auto& e : values[p]) out.entries.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interior agreement check: solves the oscillatory problem on a uniformly
// fine grid and compares interior point values against the homogenized
// solution.  Constant data compares against the constant; linear
// one-dimensional problems against a fine solve with the averaged
// coefficient; anything else is Cauchy-only across the ladder.
// ---------------------------------------------------------------------------

struct InteriorPoint {
  Vec x;
  double t{0.0};
};

struct InteriorRow {
  int point{0};
  double eps{0.0};
  double value{0.0};
  std::optional<double> reference;
  std::optional<double> deviation;
};

struct InteriorResult {
  std::string mode;  // "constant", "linear-1d", or "cauchy"
  std::vector<InteriorRow> rows;
  std::vector<CauchyRow> cauchy;  // probe field holds the point index as text
  std::vector<std::string> warnings;
};

// `g_bar_hint` pins the homogenized boundary value for the linear reference
// solve when the caller knows it (e.g. the data average for averaging
// operators); otherwise it is computed from the cell solvers.
inline InteriorResult interior_check(const SweepPlan& plan,
                                     const std::vector<InteriorPoint>& points,
                                     std::optional<double> g_bar_hint = {}) {
  using namespace sweep_detail;
  std::vector<double> ladder =
      plan.eps_ladder.empty() ? default_eps_ladder(plan.domain.dim) : plan.eps_ladder;
  const int dim = plan.domain.dim;
  if (plan.domain.kind == MovingDomain::Kind::rotating_graph)
    throw ConfigError("interior checks support flat boundaries only");
  if (dim != 1 && dim != 2) throw ShapeError("interior checks support one or two dimensions");
  if (plan.op.dim() != dim) throw ShapeError("operator dimension does not match the domain");
  if (points.empty()) throw PreconditionError("no interior points supplied");
  const MovingDomain& dom = plan.domain;
  const double nux = dim == 1 ? dom.nu.nu.x : dom.nu.nu.y;

  // Parabolic distance to the lateral boundary and the initial face.
  for (const auto& pt : points) {
    if (!(pt.t > 0.0) || !dom.contains(pt.x, pt.t))
      throw PreconditionError("interior point must lie inside the space-time domain");
    const double xi_p = inward_coord(dom, pt.x);
    double d2 = pt.t;  // squared parabolic distance to the initial face
    for (int k = 0; k <= 1024; ++k) {
      const double s = pt.t * double(k) / 1024.0;
      const double dx = xi_p - dom.boundary_offset(s);
      d2 = std::min(d2, dx * dx + (pt.t - s));
    }
    if (std::sqrt(d2) < 0.1 - 1e-12)
      throw PreconditionError("interior point too close to the parabolic boundary");
  }

  InteriorResult out;
  const bool constant = data_is_constant(plan);
  const bool linear1d = !constant && dim == 1 && plan.op.kind() == OpKind::linear_trace;
  out.mode = constant ? "constant" : (linear1d ? "linear-1d" : "cauchy");

  double t_max = 0.0;
  for (const auto& pt : points) t_max = std::max(t_max, pt.t);
  const double w0 = dom.boundary_offset(0.0), w1 = dom.boundary_offset(t_max);
  const double lo_base = std::min(w0, w1), hi = std::max(w0, w1) + dom.span;

  // Homogenized reference values.
  std::vector<std::optional<double>> refs(points.size());
  if (constant) {
    for (auto& r : refs) r = plan.g.constant;
  } else if (linear1d) {
    EffectiveOperator eff(plan.op);
    const double a_bar = eff.value(SymMatrix::d1(1.0));
    double g_bar;
    if (g_bar_hint) {
      g_bar = *g_bar_hint;
    } else {
      const Vec xw = Vec::d1(dom.boundary_offset(0.0) * nux);
      const BoundaryPoint bp = classify_boundary_point(dom, xw, 0.0);
      g_bar = homogenized_boundary_data(bp, plan.op, plan.g, plan.cell).tail.value;
    }
    const double g_mean = relaxed_mean(plan.op, plan.g, 1, plan.lateral_period, plan.phase_period);

    Stepper1D st;
    const double h_ref = 1.0 / 512.0;
    st.grid = build_graded_grid(lo_base - 2.0 * h_ref, hi, h_ref, h_ref, {{lo_base, hi}});
    st.nux = nux;
    st.b0 = dom.b0;
    st.speed = dom.speed;
    st.coefs = make_coefs(EllipticOperator::linear_trace(SymMatrix::d1(a_bar)), 1, false);
    st.inv_len = 1.0;
    st.cfl = plan.cfl_safety;
    st.wall_value = [g_bar](double) { return g_bar; };
    st.entry_value = [g_bar](double, double) { return g_bar; };
    {
      std::vector<Vec> pos(st.grid.x.size());
      for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = Vec::d1(st.grid.x[i] * nux);
      tabulate(st.coefs, pos, st.grid.fine, 1.0, 1, 1.0, 1.0);
    }
    st.set_initial([g_mean](double, bool) { return g_mean; });
    std::vector<Event> events;
    for (std::size_t p = 0; p < points.size(); ++p)
      events.push_back({points[p].t, inward_coord(dom, points[p].x), points[p].x.x, int(p), 0});
    std::vector<double> vals(points.size(), 0.0);
    st.march(events, [&vals](const Event& ev, double v) { vals[std::size_t(ev.probe)] = v; });
    for (std::size_t p = 0; p < points.size(); ++p) refs[p] = vals[p];
  }

  CoefSet base_coefs = make_coefs(plan.op, dim, dim == 2 && nux < 0.0);
  std::vector<std::vector<double>> per_point(points.size());
  std::vector<double> eps_used;
  for (double eps : ladder) {
    const double inv_len = 1.0 / eps;
    const double h_fine = eps * eps / 4.0;
    std::vector<Event> events;
    for (std::size_t p = 0; p < points.size(); ++p)
      events.push_back({points[p].t, inward_coord(dom, points[p].x), points[p].x.x, int(p), 0});

    if (dim == 1) {
      const double lo = lo_base - 2.0 * h_fine;
      const double est_nodes = (hi - lo) / h_fine;
      const double dt_est = plan.cfl_safety * 0.5 * h_fine * h_fine / base_coefs.k1;
      const double est_ns = est_nodes * (std::ceil(t_max / dt_est) + 1.0);
      if (est_nodes > double(plan.budget.max_nodes) || est_ns > plan.budget.max_node_steps) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "interior ladder truncated at eps=%g: estimated %.3g node-steps "
                      "exceeds budget",
                      eps, est_ns);
        out.warnings.emplace_back(buf);
        break;
      }
      Stepper1D st;
      st.grid = build_graded_grid(lo, hi, h_fine, h_fine, {{lo, hi}});
      st.nux = nux;
      st.b0 = dom.b0;
      st.speed = dom.speed;
      st.coefs = base_coefs;
      st.inv_len = inv_len;
      st.cfl = plan.cfl_safety;
      const TrigPoly& g = plan.g;
      st.wall_value = [&dom, &g, nux, inv_len](double t) {
        const double xw = dom.boundary_offset(t) * nux;
        return g.eval(Vec::d1(xw * inv_len), t * inv_len * inv_len);
      };
      st.entry_value = [&g, inv_len](double x, double t) {
        return g.eval(Vec::d1(x * inv_len), t * inv_len * inv_len);
      };
      {
        std::vector<Vec> pos(st.grid.x.size());
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = Vec::d1(st.grid.x[i] * nux);
        tabulate(st.coefs, pos, st.grid.fine, inv_len, 1, plan.lateral_period,
                 plan.phase_period);
      }
      st.set_initial([&g, inv_len](double x, bool) {
        return g.eval(Vec::d1(x * inv_len), 0.0);
      });
      std::vector<double> vals(points.size(), 0.0);
      st.march(events, [&vals](const Event& ev, double v) { vals[std::size_t(ev.probe)] = v; });
      for (std::size_t p = 0; p < points.size(); ++p) per_point[p].push_back(vals[p]);
    } else {
      const double box = eps * plan.lateral_period;
      const int nx = std::max(4, int(std::ceil(box / h_fine - 1e-12)));
      const double h = box / double(nx);
      const double lo = lo_base - 2.0 * h;
      const int ny = int(std::ceil((hi - lo) / h)) + 1;
      const double est_nodes = double(nx) * double(ny);
      const double dt_est = plan.cfl_safety * h * h / base_coefs.k2;
      const double est_ns = est_nodes * (std::ceil(t_max / dt_est) + 1.0);
      if (est_nodes > double(plan.budget.max_nodes) || est_ns > plan.budget.max_node_steps) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "interior ladder truncated at eps=%g: estimated %.3g node-steps "
                      "exceeds budget",
                      eps, est_ns);
        out.warnings.emplace_back(buf);
        break;
      }
      Stepper2D st;
      st.nx = nx;
      st.ny = ny;
      st.h = h;
      st.xi0 = lo;
      st.nuy = nux;
      st.b0 = dom.b0;
      st.speed = dom.speed;
      st.coefs = base_coefs;
      st.inv_len = inv_len;
      st.cfl = plan.cfl_safety;
      const TrigPoly& g = plan.g;
      st.wall_value = [&dom, &g, nux, inv_len](double x, double t) {
        const double yw = dom.boundary_offset(t) * nux;
        return g.eval(Vec::d2(x * inv_len, yw * inv_len), t * inv_len * inv_len);
      };
      st.entry_value = [&g, inv_len](double x, double y, double t) {
        return g.eval(Vec::d2(x * inv_len, y * inv_len), t * inv_len * inv_len);
      };
      {
        std::vector<Vec> pos(std::size_t(nx) * std::size_t(ny));
        std::vector<bool> fine(pos.size(), true);
        for (int j = 0; j < ny; ++j)
          for (int i = 0; i < nx; ++i)
            pos[st.idx(i, j)] = Vec::d2(st.lat(i), st.xi(j) * nux);
        tabulate(st.coefs, pos, fine, inv_len, 2, plan.lateral_period, plan.phase_period);
      }
      st.set_initial([&g, inv_len](double x, double y) {
        return g.eval(Vec::d2(x * inv_len, y * inv_len), 0.0);
      });
      std::vector<double> vals(points.size(), 0.0);
      st.march(events, [&vals](const Event& ev, double v) { vals[std::size_t(ev.probe)] = v; });
      for (std::size_t p = 0; p < points.size(); ++p) per_point[p].push_back(vals[p]);
    }
    eps_used.push_back(eps);
  }

  if (eps_used.empty()) throw PreconditionError("no interior rung fits the sweep budget");

  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t k = 0; k < eps_used.size(); ++k) {
      InteriorRow r;
      r.point = int(p);
      r.eps = eps_used[k];
      r.value = per_point[p][k];
      r.reference = refs[p];
      if (refs[p]) r.deviation = std::abs(r.value - *refs[p]);
      out.rows.push_back(r);
    }
    for (std::size_t k = 0; k + 1 < eps_used.size(); ++k) {
      CauchyRow c;
      c.probe = "point" + std::to_string(p);
      c.eps_coarse = eps_used[k];
      c.eps_fine = eps_used[k + 1];
      c.diff = std::abs(per_point[p][k] - per_point[p][k + 1]);
      out.cauchy.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic CSV body for a sweep result.
// ---------------------------------------------------------------------------

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "probe,eps,depth_scaling,R,value,reference,deviation\n";
  char buf[256];
  for (const auto& e : r.entries) {
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%s,%.12g,%.12g,%.12g,%.12g\n", e.probe.c_str(),
                  e.eps, to_string(e.scaling), e.R, e.value, e.reference, e.deviation);
    out += buf;
  }
  return out;
}

}  // namespace homog
