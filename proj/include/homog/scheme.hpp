#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "homog/lattice.hpp"
#include "homog/operators.hpp"

namespace homog {

struct SchemeOptions {
  double cfl_safety{0.9};
  std::optional<double> dt_override;   // must respect the stability bound
  std::optional<double> snap_period;   // shrink dt so this duration is an exact step multiple
};

// Full description of one initial/boundary-value problem on a lattice:
//   d_s u = F(D^2 u + H, y, s) + drift . grad u
// with Dirichlet data on the bottom row (when the lattice has one) and
// reflecting far edge, or fully periodic. H is a constant Hessian offset.
struct EvolutionProblem {
  Lattice lattice;
  EllipticOperator op;
  Vec drift{};                                         // constant; zero by default
  SymMatrix hessian_offset;                            // defaults to zero of op dim
  std::function<double(const Vec&, double)> dirichlet; // required iff lattice has a wall
  std::function<double(const Vec&)> initial;           // required
  double start_time{0.0};
  SchemeOptions options{};

  EvolutionProblem() : hessian_offset(SymMatrix::zero(2)) { drift = Vec::d2(0.0, 0.0); }
};

namespace detail {

// Raw (undivided) stencil reads around one node.
struct NodeNbrs {
  double c{0}, xl{0}, xr{0}, yl{0}, yu{0};
  double pp{0}, mm{0}, pm{0}, mp{0};  // (+1,+1), (-1,-1), (+1,-1), (-1,+1)
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Explicit monotone marching scheme. Pucci-type operators use per-direction
// extremal maps q -> a q + b |q| summed over orthogonal stencil frames (axes
// and diagonals) and combined by max/min; Bellman and linear operators use a
// seven-point discretization of tr(A D^2 u) per member, which is monotone
// exactly when every member is diagonally dominant in the grid frame. The
// time step obeys the monotonicity (CFL) bound derived from the scheme's own
// coefficient budget.
// ---------------------------------------------------------------------------
class Evolution {
 public:
  explicit Evolution(EvolutionProblem problem) : p_(std::move(problem)) {
    const Lattice& lat = p_.lattice;
    lat.validate();
    if (p_.op.dim() != lat.dim) throw ShapeError("operator/lattice dimension mismatch");
    if (p_.op.kind() == OpKind::custom)
      throw StencilError("opaque custom operators have no lattice discretization");
    if (p_.drift.dim != lat.dim) p_.drift = lat.dim == 1 ? Vec::d1(0.0) : Vec::d2(0.0, 0.0);
    if (p_.hessian_offset.dim() != lat.dim) p_.hessian_offset = SymMatrix::zero(lat.dim);
    has_wall_ = (lat.dim == 2 ? lat.ax[1].lo : lat.ax[0].lo) == EdgeKind::dirichlet;
    if (has_wall_ && !p_.dirichlet)
      throw PreconditionError("lattice has a Dirichlet edge but no boundary data was given");
    if (!p_.initial) throw PreconditionError("initial data is required");

    bake();
    pick_dt();

    u_.resize(lat.size());
    u_next_.resize(lat.size());
    time_ = p_.start_time;
    for (int j = 0; j < lat.ny(); ++j)
      for (int i = 0; i < lat.nx(); ++i) u_[lat.id(i, j)] = p_.initial(lat.pos(i, j));
    if (has_wall_) fill_wall(u_, time_);
  }

  const Lattice& lattice() const { return p_.lattice; }
  double dt() const { return dt_; }
  double time() const { return time_; }
  const std::vector<double>& values() const { return u_; }
  double value_at(int i, int j = 0) const { return u_[p_.lattice.id(i, j)]; }
  long long steps_taken() const { return steps_; }

  // Largest stable time step for this problem (before snapping).
  double stability_dt() const { return cfl_dt_; }

  void step() {
    const Lattice& lat = p_.lattice;
    const double s_new = time_ + dt_;
    const int ny = lat.ny();
    const int j_lo = (lat.dim == 2 && has_wall_) ? 1 : 0;
    if (lat.dim == 1) {
      step_row_1d();
    } else {
      for (int j = j_lo; j < ny; ++j) step_row_2d(j);
    }
    if (has_wall_) fill_wall(u_next_, s_new);
    u_.swap(u_next_);
    time_ = s_new;
    ++steps_;
  }

  void run_until(double s_end) {
    while (time_ < s_end - 0.5 * dt_) step();
  }

  // Scheme right-hand side F_h at one node (the exact value used by step()).
  // Public so property tests can probe monotonicity and consistency.
  double rhs_at(int i, int j, const std::vector<double>& u, double s) const {
    detail::NodeNbrs nb = gather(u, i, j);
    double sigma[kMaxMembers], source[kMaxMembers];
    member_coeffs(i, j, s, sigma, source);
    return node_rhs(nb, sigma, source);
  }
  double rhs_at(int i, int j) const { return rhs_at(i, j, u_, time_); }

  // Row statistics over the lateral direction (2d) or single values (1d).
  double row_mean(int j) const {
    const Lattice& lat = p_.lattice;
    double s = 0.0;
    for (int i = 0; i < lat.nx(); ++i) s += u_[lat.id(i, j)];
    return s / lat.nx();
  }
  std::pair<double, double> row_min_max(int j) const {
    const Lattice& lat = p_.lattice;
    double lo = u_[lat.id(0, j)], hi = lo;
    for (int i = 1; i < lat.nx(); ++i) {
      const double v = u_[lat.id(i, j)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }
  double domain_mean() const {
    double s = 0.0;
    for (double v : u_) s += v;
    return s / double(u_.size());
  }

  GridFunction snapshot() const { return GridFunction{u_, time_}; }

 private:
  static constexpr int kMaxMembers = 24;

  enum class Mode { extremal, bellman };

  struct BakedMember {
    double w0{0}, w1{0}, wd{0};  // axis0, axis1, diagonal weights (grid frame)
    bool diag_plus{true};        // true: (1,1) diagonal carries the stencil arm
    double trAM{0};              // tr(A H) fold of the Hessian offset
    TrigPoly scale, source;
    bool scale_const{true}, source_const{true};
    double scale_value{1.0}, source_value{0.0};
    std::vector<double> scale_tab, source_tab;  // per node, when space-dep time-const
    bool scale_tabbed{false}, source_tabbed{false};
  };

  void bake() {
    const auto kind = p_.op.kind();
    if (kind == OpKind::pucci_plus || kind == OpKind::pucci_minus) {
      mode_ = Mode::extremal;
      ex_a_ = 0.5 * (p_.op.Lambda() + p_.op.lambda());
      ex_b_ = 0.5 * (p_.op.Lambda() - p_.op.lambda());
      if (kind == OpKind::pucci_minus) ex_b_ = -ex_b_;
      ex_max_ = kind == OpKind::pucci_plus;
      bake_offsets();
      return;
    }
    // Isotropic constant-coefficient linear operators take the cheap
    // extremal path with b = 0 (axis frame only).
    if (kind == OpKind::linear_trace) {
      const auto& m = p_.op.members()[0];
      const bool isotropic = p_.op.dim() == 1 ||
                             (std::abs(m.A.xy()) == 0.0 && m.A.xx() == m.A.yy());
      const bool plain = m.scale.terms.empty() && m.source.terms.empty() &&
                         m.source.constant == 0.0;
      if (isotropic && plain) {
        mode_ = Mode::extremal;
        ex_a_ = m.A.xx() * m.scale.constant;
        ex_b_ = 0.0;
        ex_max_ = true;
        bake_offsets();
        return;
      }
    }
    mode_ = Mode::bellman;
    bellman_max_ = kind != OpKind::bellman_min;
    const auto& members = p_.op.members();
    if (int(members.size()) > kMaxMembers)
      throw StencilError("operator has more members than the scheme supports");
    for (const auto& m : members) {
      BakedMember b;
      if (p_.op.dim() == 1) {
        b.w0 = m.A.xx();
        b.w1 = b.wd = 0.0;
      } else {
        const double off = std::abs(m.A.xy());
        b.w0 = m.A.xx() - off;
        b.w1 = m.A.yy() - off;
        b.wd = off;
        b.diag_plus = m.A.xy() >= 0.0;
        if (b.w0 < -1e-12 || b.w1 < -1e-12)
          throw StencilError("member matrix is not diagonally dominant in the grid frame");
        b.w0 = std::max(b.w0, 0.0);
        b.w1 = std::max(b.w1, 0.0);
      }
      b.trAM = m.A.inner(p_.hessian_offset);
      b.scale = m.scale;
      b.source = m.source;
      b.scale_const = m.scale.terms.empty();
      b.source_const = m.source.terms.empty();
      b.scale_value = m.scale.constant;
      b.source_value = m.source.constant;
      if (!b.scale_const && m.scale.constant_in_time()) {
        b.scale_tab = tabulate(m.scale);
        b.scale_tabbed = true;
      }
      if (!b.source_const && m.source.constant_in_time()) {
        b.source_tab = tabulate(m.source);
        b.source_tabbed = true;
      }
      baked_.push_back(std::move(b));
    }
  }

  std::vector<double> tabulate(const TrigPoly& poly) const {
    const Lattice& lat = p_.lattice;
    std::vector<double> tab(lat.size());
    for (int j = 0; j < lat.ny(); ++j)
      for (int i = 0; i < lat.nx(); ++i) tab[lat.id(i, j)] = poly.eval(lat.pos(i, j), 0.0);
    return tab;
  }

  void bake_offsets() {
    const SymMatrix& H = p_.hessian_offset;
    if (p_.op.dim() == 1) {
      off_ax0_ = H.xx();
      return;
    }
    off_ax0_ = H.xx();
    off_ax1_ = H.yy();
    const Vec dpos = Vec::d2(1.0, 1.0).unit();
    const Vec dneg = Vec::d2(1.0, -1.0).unit();
    off_dA_ = H.quad(dpos);
    off_dB_ = H.quad(dneg);
  }

  void pick_dt() {
    const double h = p_.lattice.h();
    const double inv_h2 = 1.0 / (h * h);
    double k_diff = 0.0;
    if (mode_ == Mode::extremal) {
      const double lip = std::abs(ex_a_) + std::abs(ex_b_);
      k_diff = (p_.lattice.dim == 2 ? 4.0 : 2.0) * lip * inv_h2;
    } else {
      for (const auto& b : baked_) {
        const double osc = b.scale.sup_bound() - std::abs(b.scale.constant);
        const double smax = std::abs(b.scale.constant) + osc;
        k_diff = std::max(k_diff, 2.0 * (b.w0 + b.w1 + b.wd) * smax * inv_h2);
      }
    }
    const double k_drift =
        (std::abs(p_.drift.x) + (p_.lattice.dim == 2 ? std::abs(p_.drift.y) : 0.0)) / h;
    const double budget = k_diff + k_drift;
    if (budget <= 0.0) throw StencilError("scheme has an empty coefficient budget");
    cfl_dt_ = p_.options.cfl_safety / budget;
    dt_ = cfl_dt_;
    if (p_.options.dt_override) {
      if (*p_.options.dt_override > 1.0 / budget + 1e-15)
        throw CflError("requested time step exceeds the monotonicity bound");
      dt_ = *p_.options.dt_override;
    }
    if (p_.options.snap_period) {
      const double period = *p_.options.snap_period;
      if (period <= 0.0) throw PreconditionError("snap period must be positive");
      dt_ = period / std::ceil(period / dt_ - 1e-12);
    }
  }

  void fill_wall(std::vector<double>& u, double s) {
    const Lattice& lat = p_.lattice;
    if (lat.dim == 1) {
      u[0] = p_.dirichlet(lat.pos(0), s);
      return;
    }
    for (int i = 0; i < lat.nx(); ++i) u[lat.id(i, 0)] = p_.dirichlet(lat.pos(i, 0), s);
  }

  detail::NodeNbrs gather(const std::vector<double>& u, int i, int j) const {
    const Lattice& lat = p_.lattice;
    const int nx = lat.nx();
    detail::NodeNbrs nb;
    if (lat.dim == 1) {
      const int n = nx;
      int im = i - 1, ip = i + 1;
      if (lat.ax[0].lo == EdgeKind::periodic) {
        im = (i + n - 1) % n;
        ip = (i + 1) % n;
      } else {
        if (i == 0) throw PreconditionError("rhs is undefined on the Dirichlet node");
        if (ip > n - 1) ip = n - 2;  // reflecting far edge
      }
      nb.c = u[i];
      nb.xl = u[im];
      nb.xr = u[ip];
      return nb;
    }
    const int ny = lat.ny();
    const int im = (i + nx - 1) % nx;
    const int ip = (i + 1) % nx;
    int jm = j - 1, jp = j + 1;
    if (lat.ax[1].lo == EdgeKind::periodic) {
      jm = (j + ny - 1) % ny;
      jp = (j + 1) % ny;
    } else {
      if (j == 0) throw PreconditionError("rhs is undefined on the Dirichlet row");
      if (jp > ny - 1) jp = ny - 2;  // reflecting far edge
    }
    const std::size_t rc = lat.id(0, j), rm = lat.id(0, jm), rp = lat.id(0, jp);
    nb.c = u[rc + i];
    nb.xl = u[rc + im];
    nb.xr = u[rc + ip];
    nb.yl = u[rm + i];
    nb.yu = u[rp + i];
    nb.pp = u[rp + ip];
    nb.mm = u[rm + im];
    nb.pm = u[rm + ip];
    nb.mp = u[rp + im];
    return nb;
  }

  // Per-node member coefficients at (i, j, s); arrays sized kMaxMembers.
  void member_coeffs(int i, int j, double s, double* sigma, double* source) const {
    if (mode_ == Mode::extremal) return;
    const Lattice& lat = p_.lattice;
    const std::size_t id = lat.id(i, j);
    for (std::size_t m = 0; m < baked_.size(); ++m) {
      const BakedMember& b = baked_[m];
      sigma[m] = b.scale_const ? b.scale_value
                               : (b.scale_tabbed ? b.scale_tab[id] : b.scale.eval(lat.pos(i, j), s));
      source[m] = b.source_const
                      ? b.source_value
                      : (b.source_tabbed ? b.source_tab[id] : b.source.eval(lat.pos(i, j), s));
    }
  }

  double node_rhs(const detail::NodeNbrs& nb, const double* sigma, const double* source) const {
    const double h = p_.lattice.h();
    const double inv_h2 = 1.0 / (h * h);
    const double d0 = (nb.xl + nb.xr - 2.0 * nb.c) * inv_h2;
    double rhs;
    if (p_.lattice.dim == 1) {
      if (mode_ == Mode::extremal) {
        const double q = d0 + off_ax0_;
        rhs = ex_a_ * q + ex_b_ * std::abs(q);
      } else {
        rhs = bellman_max_ ? -1e300 : 1e300;
        for (std::size_t m = 0; m < baked_.size(); ++m) {
          const double v = sigma[m] * (baked_[m].w0 * d0 + baked_[m].trAM) + source[m];
          rhs = bellman_max_ ? std::max(rhs, v) : std::min(rhs, v);
        }
      }
    } else {
      const double d1 = (nb.yl + nb.yu - 2.0 * nb.c) * inv_h2;
      const double dA = (nb.pp + nb.mm - 2.0 * nb.c) * (0.5 * inv_h2);
      const double dB = (nb.pm + nb.mp - 2.0 * nb.c) * (0.5 * inv_h2);
      if (mode_ == Mode::extremal) {
        const double q0 = d0 + off_ax0_, q1 = d1 + off_ax1_;
        const double qa = dA + off_dA_, qb = dB + off_dB_;
        const double ax = ex_a_ * (q0 + q1) + ex_b_ * (std::abs(q0) + std::abs(q1));
        if (ex_b_ == 0.0) {
          rhs = ax;  // linear isotropic: axis frame is the discretization
        } else {
          const double dg = ex_a_ * (qa + qb) + ex_b_ * (std::abs(qa) + std::abs(qb));
          rhs = ex_max_ ? std::max(ax, dg) : std::min(ax, dg);
        }
      } else {
        rhs = bellman_max_ ? -1e300 : 1e300;
        for (std::size_t m = 0; m < baked_.size(); ++m) {
          const BakedMember& b = baked_[m];
          const double dd = 2.0 * (b.diag_plus ? dA : dB);  // undoing the 1/2 in dA
          const double tr = b.w0 * d0 + b.w1 * d1 + b.wd * dd + b.trAM;
          const double v = sigma[m] * tr + source[m];
          rhs = bellman_max_ ? std::max(rhs, v) : std::min(rhs, v);
        }
      }
    }
    // First-order upwind drift, sign-selected for monotonicity.
    const double bx = p_.drift.x;
    if (bx != 0.0) rhs += bx * (bx > 0.0 ? nb.xr - nb.c : nb.c - nb.xl) / h;
    if (p_.lattice.dim == 2) {
      const double by = p_.drift.y;
      if (by != 0.0) rhs += by * (by > 0.0 ? nb.yu - nb.c : nb.c - nb.yl) / h;
    }
    return rhs;
  }

  void step_row_1d() {
    const Lattice& lat = p_.lattice;
    const int n = lat.nx();
    const int i_lo = has_wall_ ? 1 : 0;
    double sigma[kMaxMembers], source[kMaxMembers];
    for (int i = i_lo; i < n; ++i) {
      detail::NodeNbrs nb = gather(u_, i, 0);
      member_coeffs(i, 0, time_, sigma, source);
      u_next_[i] = nb.c + dt_ * node_rhs(nb, sigma, source);
    }
  }

  void step_row_2d(int j) {
    const Lattice& lat = p_.lattice;
    const int nx = lat.nx();
    const int ny = lat.ny();
    double sigma[kMaxMembers], source[kMaxMembers];
    int jm = j - 1, jp = j + 1;
    if (lat.ax[1].lo == EdgeKind::periodic) {
      jm = (j + ny - 1) % ny;
      jp = (j + 1) % ny;
    } else if (jp > ny - 1) {
      jp = ny - 2;  // reflecting far edge
    }
    const std::size_t row = lat.id(0, j);
    const double* Rm = u_.data() + lat.id(0, jm);
    const double* Rc = u_.data() + row;
    const double* Rp = u_.data() + lat.id(0, jp);
    // Wrapped columns through the generic gather; contiguous interior inline.
    for (int i : {0, nx - 1}) {
      detail::NodeNbrs nb = gather(u_, i, j);
      member_coeffs(i, j, time_, sigma, source);
      u_next_[row + i] = nb.c + dt_ * node_rhs(nb, sigma, source);
    }
    detail::NodeNbrs nb;
    for (int i = 1; i < nx - 1; ++i) {
      nb.c = Rc[i];
      nb.xl = Rc[i - 1];
      nb.xr = Rc[i + 1];
      nb.yl = Rm[i];
      nb.yu = Rp[i];
      nb.pp = Rp[i + 1];
      nb.mm = Rm[i - 1];
      nb.pm = Rm[i + 1];
      nb.mp = Rp[i - 1];
      member_coeffs(i, j, time_, sigma, source);
      u_next_[row + i] = nb.c + dt_ * node_rhs(nb, sigma, source);
    }
  }

  EvolutionProblem p_;
  Mode mode_{Mode::extremal};
  bool has_wall_{false};
  bool ex_max_{true}, bellman_max_{true};
  double ex_a_{1.0}, ex_b_{0.0};
  double off_ax0_{0.0}, off_ax1_{0.0}, off_dA_{0.0}, off_dB_{0.0};
  std::vector<BakedMember> baked_;
  double dt_{0.0}, cfl_dt_{0.0}, time_{0.0};
  long long steps_{0};
  std::vector<double> u_, u_next_;
};

}  // namespace homog
