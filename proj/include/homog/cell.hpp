#pragma once

// Half-plane and torus cell solvers: long-time Dirichlet relaxation with
// per-depth probe statistics, boundary-profile extraction, and the staged
// reductions that produce homogenized boundary values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homog/bdata.hpp"
#include "homog/common.hpp"
#include "homog/direction.hpp"
#include "homog/domains.hpp"
#include "homog/effop.hpp"
#include "homog/lattice.hpp"
#include "homog/operators.hpp"
#include "homog/scheme.hpp"

namespace homog {

// ---------------------------------------------------------------------------
// Configuration shared by the cell solvers.
// ---------------------------------------------------------------------------

struct CellConfig {
  double h_target{1.0 / 32};        // lateral grid spacing target
  std::vector<double> probe_depths{4.0, 8.0, 16.0, 32.0};
  double depth_L{0.0};              // 0 => 4 * max(probe_depths)
  double relax_time{25.0};          // total horizon unless stopped early
  double window{1.0};               // probe-averaging window (snapped to data period)
  double stop_tol{0.0};             // early stop when bucket means settle; 0 disables
  double min_time{0.0};             // never stop before this time
  int cf_order{3};                  // continued-fraction order for irrational normals
  int s_samples{8};                 // boundary-profile sample count per period
  Vec z{Vec::d2(0.0, 0.0)};         // fast-variable shift of the data
  double tau{0.0};                  // fast time shift of the data
  bool use_aitken{true};
  double y_period{1.0};             // spatial period of the data in each axis
  double s_period{1.0};             // temporal period of the data
  double cfl_safety{0.9};
  double interp_tol{5e-3};          // admissible profile interpolation residual
  std::vector<double> time_probes{1.0, 2.0, 4.0, 8.0};  // torus relaxation ladder

  double depth() const {
    if (depth_L > 0.0) return depth_L;
    double m = 0.0;
    for (double d : probe_depths) m = std::max(m, d);
    if (m <= 0.0) throw ConfigError("cell config needs probe depths or an explicit depth");
    return 4.0 * m;
  }
};

// ---------------------------------------------------------------------------
// Problem description: a constant-direction half-plane with periodic data.
// ---------------------------------------------------------------------------

struct HalfPlaneProblem {
  Direction nu;                     // inward normal (grid-aligned via rational rep)
  Vec z{Vec::d2(0.0, 0.0)};         // spatial shift applied to the data
  double tau{0.0};                  // temporal shift applied to the data
  double c{0.0};                    // boundary speed entering through the frozen shift
  double s_param{0.0};              // frozen slow time: data shifted by c * s_param * nu
  EllipticOperator op{EllipticOperator::heat(2)};
  TrigPoly bdata{};                 // boundary data g(y, s)
  double y_period{1.0};
  double s_period{1.0};
};

// Row-level statistics of the trailing probe window.
struct RowStats {
  double sum{0.0};
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};
  double mean_lo{std::numeric_limits<double>::infinity()};
  double mean_hi{-std::numeric_limits<double>::infinity()};
  long long samples{0};

  void fold(double row_sum, double row_min, double row_max, double row_mean) {
    sum += row_sum;
    lo = std::min(lo, row_min);
    hi = std::max(hi, row_max);
    mean_lo = std::min(mean_lo, row_mean);
    mean_hi = std::max(mean_hi, row_mean);
    ++samples;
  }
};

// Raw output of a half-plane (or half-line) relaxation run.
struct HalfPlaneRun {
  Lattice lattice{};
  GridFunction final_level{};
  Direction nu{};
  double lateral_period{1.0};
  double h{0.0};
  double dt{0.0};
  double time_end{0.0};
  long long steps{0};
  double window{1.0};
  double coarse_window{1.0};
  std::vector<RowStats> window_stats;              // per row, last completed bucket
  std::vector<std::vector<double>> bucket_means;   // last <=3 coarse buckets, oldest first
  double last_bucket_delta{0.0};                   // max row change between last two buckets
  bool stopped_early{false};
  double runtime_seconds{0.0};
  double nu_error{0.0};                            // |nu - approximant| when approximated

  int rows() const { return lattice.dim == 1 ? lattice.ax[0].n : lattice.ax[1].n; }
  int row_width() const { return lattice.dim == 1 ? 1 : lattice.ax[0].n; }
};

// One probe depth in the oscillation table.
struct DepthProbe {
  double depth{0.0};       // actual depth of the probed row
  double mean{0.0};        // window mean of the row
  double osc{0.0};         // max - min over the row and the window
  double time_osc{0.0};    // oscillation of the row mean over the window
};

// Final extraction: a bracketed tail value with decay diagnostics.
struct TailResult {
  double value{0.0};
  double upper{0.0};
  double lower{0.0};
  std::vector<DepthProbe> osc_table;
  double fitted_decay{0.0};          // slope of log(osc) vs log(depth)
  std::optional<double> aitken_value;
  bool relaxed{true};
  bool stopped_early{false};
  long long steps{0};
  double nu_error{0.0};
  double interp_residual{0.0};       // profile interpolation residual, when relevant
  double h{0.0};
  double dt{0.0};
  double time_end{0.0};
  double runtime_seconds{0.0};

  double bracket() const { return upper - lower; }
};

// Boundary profile f(c s) sampled over one slow period, with periodic
// linear interpolation.
struct ProfileF {
  Direction nu{};
  double c{1.0};
  double period_s{1.0};      // period in the slow time s
  double period_theta{1.0};  // period in the scalar shift theta = c s
  std::vector<double> s_values;
  std::vector<double> f_values;
  std::vector<TailResult> tails;   // per-sample diagnostics

  // Periodic linear interpolation in s.
  double eval(double s) const {
    if (s_values.empty()) throw PreconditionError("empty boundary profile");
    if (s_values.size() == 1) return f_values.front();
    const int n = static_cast<int>(s_values.size());
    const double ds = period_s / n;
    double u = (s - s_values.front()) / ds;
    u -= std::floor(u / n) * n;
    int k = static_cast<int>(std::floor(u));
    if (k >= n) k = 0;
    const double w = u - k;
    return (1.0 - w) * f_values[k] + w * f_values[(k + 1) % n];
  }

  // Mean over one period (samples are uniform, so this is exact trapezoid).
  double mean() const {
    if (f_values.empty()) throw PreconditionError("empty boundary profile");
    double s = 0.0;
    for (double v : f_values) s += v;
    return s / static_cast<double>(f_values.size());
  }

  // Bound on the piecewise-linear interpolation error from second differences.
  double interp_residual() const {
    const int n = static_cast<int>(f_values.size());
    if (n < 3) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d2 = f_values[(k + 1) % n] - 2.0 * f_values[k] +
                        f_values[(k + n - 1) % n];
      worst = std::max(worst, std::abs(d2));
    }
    return worst / 8.0;
  }

  double max_tail_bracket() const {
    double w = 0.0;
    for (const auto& t : tails) w = std::max(w, t.bracket());
    return w;
  }
};

// Right-handed boundary frame: tangent such that (tangent, normal) has
// determinant +1 and normal = e2 gives tangent = e1.
inline Vec frame_tangent(const Vec& normal) {
  return Vec::d2(normal.y, -normal.x);
}

namespace detail {

// Core relaxation driver shared by every cell solve: march an Evolution,
// maintain per-row window aggregates in buckets, optionally stop early once
// consecutive bucket means settle.
struct CoreSpec {
  Lattice lattice{};
  EllipticOperator op{EllipticOperator::heat(2)};
  std::function<double(const Vec&, double)> dirichlet;  // grid coordinates
  std::function<double(const Vec&)> initial;
  double relax_time{25.0};
  double time_period{0.0};  // >0 when data or coefficients are time-periodic
  double window{1.0};
  double stop_tol{0.0};
  double min_time{0.0};
  double cfl_safety{0.9};
};

inline HalfPlaneRun solve_core(const CoreSpec& spec) {
  const auto wall0 = std::chrono::steady_clock::now();

  double window = std::max(spec.window, 1e-9);
  if (spec.time_period > 0.0) {
    const double k = std::ceil(window / spec.time_period - 1e-12);
    window = std::max(1.0, k) * spec.time_period;
  }

  EvolutionProblem prob;
  prob.lattice = spec.lattice;
  prob.op = spec.op;
  prob.dirichlet = spec.dirichlet;
  prob.initial = spec.initial;
  prob.options.cfl_safety = spec.cfl_safety;
  // Integer steps per window (and per data period, since the window is a
  // multiple of it) keep bucket boundaries exact.
  prob.options.snap_period = (spec.time_period > 0.0) ? spec.time_period : window;

  Evolution evo(prob);
  const double dt = evo.stability_dt();
  const long long steps_per_window =
      std::max<long long>(1, static_cast<long long>(std::llround(window / dt)));
  const int n_buckets = std::max(
      1, static_cast<int>(std::ceil(spec.relax_time / window - 1e-12)));

  const int dim = spec.lattice.dim;
  const int rows = (dim == 1) ? spec.lattice.ax[0].n : spec.lattice.ax[1].n;
  const int width = (dim == 1) ? 1 : spec.lattice.ax[0].n;
  const long long stride = (dim == 1) ? 1 : 4;

  HalfPlaneRun run;
  run.lattice = spec.lattice;
  run.h = spec.lattice.h();
  run.dt = dt;
  run.window = window;
  run.window_stats.assign(rows, RowStats{});

  // Aitken extrapolation needs bucket means far enough apart that geometric
  // settling is resolvable, so group fine buckets into at most eight coarse
  // ones; early stopping still watches the fine buckets.
  const int group = std::max(1, n_buckets / 8);
  run.coarse_window = group * window;
  std::vector<double> coarse_acc(rows, 0.0);
  int coarse_fill = 0;

  std::vector<RowStats> bucket(rows);
  std::vector<double> prev_means;
  long long in_bucket = 0;

  auto sample_rows = [&](std::vector<RowStats>& acc) {
    const auto& u = evo.values();
    for (int j = 0; j < rows; ++j) {
      const double* p = u.data() + static_cast<std::size_t>(j) * width;
      double s = 0.0, lo = p[0], hi = p[0];
      for (int i = 0; i < width; ++i) {
        s += p[i];
        lo = std::min(lo, p[i]);
        hi = std::max(hi, p[i]);
      }
      acc[j].fold(s, lo, hi, s / width);
    }
  };

  for (int b = 0; b < n_buckets; ++b) {
    std::fill(bucket.begin(), bucket.end(), RowStats{});
    in_bucket = 0;
    for (long long k = 0; k < steps_per_window; ++k) {
      evo.step();
      if (k % stride == stride - 1 || k == steps_per_window - 1) {
        sample_rows(bucket);
        ++in_bucket;
      }
    }
    std::vector<double> means(rows);
    for (int j = 0; j < rows; ++j)
      means[j] = bucket[j].sum / (static_cast<double>(bucket[j].samples) * width);
    if (!prev_means.empty()) {
      double delta = 0.0;
      for (int j = 0; j < rows; ++j)
        delta = std::max(delta, std::abs(means[j] - prev_means[j]));
      run.last_bucket_delta = delta;
    }
    prev_means = means;
    for (int j = 0; j < rows; ++j) coarse_acc[j] += means[j];
    if (++coarse_fill == group) {
      std::vector<double> cm(rows);
      for (int j = 0; j < rows; ++j) cm[j] = coarse_acc[j] / group;
      run.bucket_means.push_back(std::move(cm));
      if (run.bucket_means.size() > 3)
        run.bucket_means.erase(run.bucket_means.begin());
      std::fill(coarse_acc.begin(), coarse_acc.end(), 0.0);
      coarse_fill = 0;
    }
    run.window_stats = bucket;

    if (spec.stop_tol > 0.0 && b >= 2 &&
        evo.time() >= spec.min_time - 1e-12 &&
        run.last_bucket_delta <= spec.stop_tol) {
      run.stopped_early = true;
      break;
    }
  }

  run.final_level = GridFunction{evo.values(), evo.time()};
  run.time_end = evo.time();
  run.steps = evo.steps_taken();
  run.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return run;
}

// Rotate a constant coefficient matrix into the (tangent, normal) frame.
inline SymMatrix rotate_to_frame(const SymMatrix& a, const Vec& tangent,
                                 const Vec& normal) {
  return SymMatrix(2, a.quad(tangent), a.bilinear(tangent, normal),
                   a.quad(normal));
}

// Express the operator in grid coordinates (x = tangent coord, y = normal
// coord). Constant-coefficient members rotate exactly; operators with
// fast-variable dependence are only supported in the axis-aligned frame.
inline EllipticOperator grid_frame_operator(const EllipticOperator& op,
                                            const Vec& tangent, const Vec& normal,
                                            const Vec& shift, double tau) {
  const bool aligned = std::abs(normal.x) < 1e-14 &&
                       std::abs(normal.y - 1.0) < 1e-14;
  if (op.kind() == OpKind::pucci_plus || op.kind() == OpKind::pucci_minus)
    return op;  // rotation invariant
  if (op.depends_on_fast_variables()) {
    if (!aligned)
      throw UnsupportedPointError(
          "operators with fast-variable coefficients are only supported for "
          "axis-aligned normals");
    // Apply the data shift to the coefficients as well.
    std::vector<OperatorMember> shifted;
    for (const auto& m : op.members()) {
      OperatorMember s = m;
      s.scale = m.scale.shifted(shift, tau);
      s.source = m.source.shifted(shift, tau);
      shifted.push_back(std::move(s));
    }
    if (op.kind() == OpKind::linear_trace)
      return EllipticOperator::linear_trace(shifted.front().A,
                                            shifted.front().scale,
                                            shifted.front().source, op.label());
    return EllipticOperator::bellman(op.kind(), op.dim(), shifted, op.label());
  }
  if (aligned) return op;
  std::vector<OperatorMember> rotated;
  for (const auto& m : op.members()) {
    OperatorMember r = m;
    r.A = rotate_to_frame(m.A, tangent, normal);
    rotated.push_back(std::move(r));
  }
  if (op.kind() == OpKind::linear_trace)
    return EllipticOperator::linear_trace(rotated.front().A,
                                          rotated.front().scale,
                                          rotated.front().source, op.label());
  return EllipticOperator::bellman(op.kind(), op.dim(), rotated, op.label());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Half-plane relaxation.
// ---------------------------------------------------------------------------

inline HalfPlaneRun solve_halfplane(const HalfPlaneProblem& prob, double L,
                                    double relax_time,
                                    const CellConfig& cfg = CellConfig{}) {
  const int dim = prob.op.dim();
  if (prob.op.kind() == OpKind::custom)
    throw PreconditionError("cell solves need a stencil-representable operator");
  if (!prob.bdata.has_period(dim, prob.y_period, prob.s_period, 1e-12))
    throw PreconditionError("boundary data must be periodic in the declared cell");
  if (L <= 0.0 || relax_time <= 0.0)
    throw PreconditionError("half-plane solve needs positive depth and horizon");

  // Shift the data: g_eff(y, s) = g(y + z + c s_param nu, s + tau).
  Vec shift = prob.z;
  if (prob.c != 0.0 && prob.s_param != 0.0) {
    const Vec adv = prob.nu.nu * (prob.c * prob.s_param);
    shift = (dim == 1) ? Vec::d1(shift.x + adv.x) : shift + adv;
  }
  const TrigPoly g_eff = prob.bdata.shifted(shift, prob.tau);

  const bool data_time_dep = !g_eff.constant_in_time();
  const bool op_time_dep = [&] {
    for (const auto& m : prob.op.members())
      if (!m.scale.constant_in_time() || !m.source.constant_in_time())
        return true;
    return false;
  }();
  const double time_period =
      (data_time_dep || op_time_dep) ? prob.s_period : 0.0;

  detail::CoreSpec spec;
  spec.relax_time = relax_time;
  spec.time_period = time_period;
  spec.window = cfg.window;
  spec.stop_tol = cfg.stop_tol;
  spec.min_time = cfg.min_time;
  spec.cfl_safety = cfg.cfl_safety;

  HalfPlaneRun run;
  if (dim == 1) {
    spec.lattice = Lattice::halfline(L, cfg.h_target);
    spec.op = prob.op;
    spec.dirichlet = [g_eff](const Vec&, double s) {
      return g_eff.eval(Vec::d1(0.0), s);
    };
    const double g0 = g_eff.eval(Vec::d1(0.0), 0.0);
    spec.initial = [g0](const Vec&) { return g0; };
    run = detail::solve_core(spec);
    run.lateral_period = 0.0;
    run.nu = prob.nu;
    return run;
  }

  if (!prob.nu.rational)
    throw PreconditionError(
        "half-plane grids need a rational normal; approximate first");
  const Vec normal = prob.nu.rational->unit();
  const Vec tangent = frame_tangent(normal);
  const double lateral = prob.y_period * prob.nu.rational->norm();
  const int n_lat =
      std::max(8, static_cast<int>(std::llround(lateral / cfg.h_target)));

  spec.lattice = Lattice::halfplane(lateral, n_lat, L);
  spec.op = detail::grid_frame_operator(prob.op, tangent, normal, shift, prob.tau);
  // Grid coordinates (a, b) map to lab position a*tangent + b*normal; the
  // data is evaluated on the boundary line b = 0.
  spec.dirichlet = [g_eff, tangent](const Vec& p, double s) {
    return g_eff.eval(tangent * p.x, s);
  };
  // Start from the mean of the boundary values along the wall: the
  // relaxation then only has to resolve the oscillatory part, and the
  // far-field offset starts near its limit.
  double init = 0.0;
  for (int i = 0; i < n_lat; ++i)
    init += spec.dirichlet(spec.lattice.pos(i, 0), 0.0);
  init /= n_lat;
  spec.initial = [init](const Vec&) { return init; };

  run = detail::solve_core(spec);
  run.lateral_period = lateral;
  run.nu = prob.nu;
  return run;
}

// ---------------------------------------------------------------------------
// Tail extraction from a finished run.
// ---------------------------------------------------------------------------

inline TailResult extract_tail(const HalfPlaneRun& run,
                               std::vector<double> depths,
                               bool use_aitken = true) {
  if (depths.empty()) throw PreconditionError("tail extraction needs probe depths");
  std::sort(depths.begin(), depths.end());
  const int rows = run.rows();
  const double domain_depth = (rows - 1) * run.h;
  if (depths.back() > 0.5 * domain_depth + 1e-9)
    throw PreconditionError("probe depths must stay within half the domain depth");

  TailResult out;
  out.h = run.h;
  out.dt = run.dt;
  out.time_end = run.time_end;
  out.runtime_seconds = run.runtime_seconds;
  out.nu_error = run.nu_error;
  out.stopped_early = run.stopped_early;
  out.steps = run.steps;

  std::vector<int> probe_rows;
  for (double d : depths) {
    int j = static_cast<int>(std::llround(d / run.h));
    j = std::clamp(j, 1, rows - 1);
    probe_rows.push_back(j);
    const RowStats& st = run.window_stats[j];
    DepthProbe p;
    p.depth = j * run.h;
    p.mean = st.sum / (static_cast<double>(st.samples) * run.row_width());
    p.osc = st.hi - st.lo;
    p.time_osc = st.mean_hi - st.mean_lo;
    out.osc_table.push_back(p);
  }

  // Bracket: the two deepest probe means, optionally tightened/widened by an
  // Aitken extrapolation of the last three bucket means at the deepest row.
  const DepthProbe& deepest = out.osc_table.back();
  std::vector<double> candidates{deepest.mean};
  if (out.osc_table.size() >= 2)
    candidates.push_back(out.osc_table[out.osc_table.size() - 2].mean);
  if (use_aitken && run.bucket_means.size() == 3) {
    const int j = probe_rows.back();
    const auto a = aitken(run.bucket_means[0][j], run.bucket_means[1][j],
                          run.bucket_means[2][j]);
    if (a) {
      out.aitken_value = *a;
      candidates.push_back(*a);
    }
  }
  out.upper = *std::max_element(candidates.begin(), candidates.end());
  out.lower = *std::min_element(candidates.begin(), candidates.end());
  out.value = 0.5 * (out.upper + out.lower);

  // log-log decay fit over depths with resolvable oscillation.
  std::vector<double> xs, ys;
  for (const auto& p : out.osc_table)
    if (p.osc > 1e-13) {
      xs.push_back(std::log(p.depth));
      ys.push_back(std::log(p.osc));
    }
  if (xs.size() >= 2) out.fitted_decay = fit_line(xs, ys).slope;

  out.relaxed = deepest.time_osc <= 1e-4 &&
                (run.bucket_means.size() < 2 || run.last_bucket_delta <= 1e-3);
  return out;
}

// Convenience: solve and extract in one call.
inline TailResult halfplane_tail(const HalfPlaneProblem& prob,
                                 const CellConfig& cfg = CellConfig{}) {
  const HalfPlaneRun run = solve_halfplane(prob, cfg.depth(), cfg.relax_time, cfg);
  return extract_tail(run, cfg.probe_depths, cfg.use_aitken);
}

// ---------------------------------------------------------------------------
// Boundary profile: the tail as a function of the frozen slow time.
// ---------------------------------------------------------------------------

inline ProfileF profile_f(const HalfPlaneProblem& base, const CellConfig& cfg,
                          int max_samples = 0) {
  if (base.c == 0.0)
    throw PreconditionError("boundary profiles need a nonzero normal speed");
  if (!base.nu.rational)
    throw PreconditionError("boundary profiles need a rational normal");
  if (cfg.s_samples < 2)
    throw PreconditionError("boundary profiles need at least two samples");

  ProfileF prof;
  prof.nu = base.nu;
  prof.c = base.c;
  prof.period_theta = base.y_period / base.nu.rational->norm();
  prof.period_s = prof.period_theta / std::abs(base.c);

  auto sample_at = [&](double s) {
    HalfPlaneProblem p = base;
    p.s_param = s;
    return halfplane_tail(p, cfg);
  };

  int n = cfg.s_samples;
  for (int k = 0; k < n; ++k) {
    const double s = prof.period_s * k / n;
    TailResult t = sample_at(s);
    prof.s_values.push_back(s);
    prof.f_values.push_back(t.value);
    prof.tails.push_back(std::move(t));
  }
  // Refine by doubling (existing samples sit at the even slots) until the
  // interpolation residual meets the requested tolerance.
  while (max_samples > n && prof.interp_residual() > cfg.interp_tol) {
    std::vector<double> sv, fv;
    std::vector<TailResult> tv;
    sv.reserve(2 * n);
    for (int k = 0; k < n; ++k) {
      sv.push_back(prof.s_values[k]);
      fv.push_back(prof.f_values[k]);
      tv.push_back(std::move(prof.tails[k]));
      const double s = prof.period_s * (2 * k + 1) / (2 * n);
      TailResult t = sample_at(s);
      sv.push_back(s);
      fv.push_back(t.value);
      tv.push_back(std::move(t));
    }
    prof.s_values = std::move(sv);
    prof.f_values = std::move(fv);
    prof.tails = std::move(tv);
    n *= 2;
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Second-stage reduction: relax the effective operator against the profile.
// ---------------------------------------------------------------------------

inline TailResult solve_profile_stage(const ProfileF& prof,
                                      EffectiveOperator& eff,
                                      const CellConfig& cfg) {
  const double resid = prof.interp_residual();
  if (resid > cfg.interp_tol)
    throw ConfigError(
        "boundary profile is sampled too coarsely for the requested tolerance");

  const auto [a_plus, a_minus] = eff.ray_coefficients(prof.nu.nu);
  // One-dimensional flux a_plus q_+ - a_minus q_- expressed exactly through
  // an extremal pair.
  const EllipticOperator op1d =
      (a_plus >= a_minus)
          ? EllipticOperator::pucci_plus(1, a_minus, a_plus)
          : EllipticOperator::pucci_minus(1, a_plus, a_minus);

  detail::CoreSpec spec;
  spec.lattice = Lattice::halfline(cfg.depth(), cfg.h_target);
  spec.op = op1d;
  spec.time_period = prof.period_s;
  spec.window = std::max(cfg.window, prof.period_s);
  // One-dimensional marching is cheap; extend the horizon until the slowest
  // strip mode (rate ~ lambda (pi / 2L)^2) has decayed by three orders.
  const double depth_l = cfg.depth();
  const double lam = std::max(op1d.lambda(), 1e-12);
  const double drain =
      7.0 * (2.0 * depth_l / kPi) * (2.0 * depth_l / kPi) / lam;
  spec.relax_time = std::max(cfg.relax_time, drain);
  spec.stop_tol = cfg.stop_tol;
  spec.min_time = cfg.min_time;
  spec.cfl_safety = cfg.cfl_safety;
  spec.dirichlet = [&prof](const Vec&, double t) { return prof.eval(t); };
  const double m = prof.mean();
  spec.initial = [m](const Vec&) { return m; };

  HalfPlaneRun run = detail::solve_core(spec);
  run.nu = prof.nu;
  TailResult out = extract_tail(run, cfg.probe_depths, cfg.use_aitken);
  out.interp_residual = resid;
  return out;
}

// ---------------------------------------------------------------------------
// Full staged computation of the homogenized boundary value at a point.
// ---------------------------------------------------------------------------

struct GBarResult {
  TailResult tail;                 // the homogenized boundary value and bracket
  GammaCase kind{GammaCase::neither};
  Direction nu_used{};             // grid normal actually used
  double nu_error{0.0};
  std::optional<ProfileF> profile; // first stage, when the boundary moves
};

inline GBarResult homogenized_boundary_data(const BoundaryPoint& pt,
                                            const EllipticOperator& F,
                                            const TrigPoly& g,
                                            const CellConfig& cfg = CellConfig{}) {
  GBarResult res;
  res.kind = pt.kind;
  const EllipticOperator F0 = F.rescaled_limit();

  if (pt.kind == GammaCase::gamma1) {
    // Static half-plane problem with the point's shift frozen into the data.
    Direction nu_used = pt.nu;
    if (!nu_used.rational) {
      nu_used = continued_fraction_approx(pt.nu.nu, cfg.cf_order);
      res.nu_error = (nu_used.nu - pt.nu.nu).norm();
    }
    res.nu_used = nu_used;
    HalfPlaneProblem prob;
    prob.nu = nu_used;
    prob.z = cfg.z;
    prob.tau = cfg.tau;
    prob.op = F0;
    prob.bdata = g;
    prob.y_period = cfg.y_period;
    prob.s_period = cfg.s_period;
    res.tail = halfplane_tail(prob, cfg);
    res.tail.nu_error = res.nu_error;
    return res;
  }

  if (pt.kind == GammaCase::gamma2) {
    // Stage one: boundary profile along the moving boundary (zero shift —
    // the profile already sweeps all shifts in the normal direction).
    res.nu_used = pt.nu;
    HalfPlaneProblem base;
    base.nu = pt.nu;
    base.c = pt.c;
    base.op = F0;
    base.bdata = g;
    base.y_period = cfg.y_period;
    base.s_period = cfg.s_period;
    res.profile = profile_f(base, cfg, 128);
    // Stage two: effective one-dimensional relaxation of the profile.
    EffectiveOperator eff(F0);
    res.tail = solve_profile_stage(*res.profile, eff, cfg);
    return res;
  }

  throw UnsupportedPointError(
      "no homogenized boundary value at a resting rational boundary point");
}

// ---------------------------------------------------------------------------
// Directional means: first-stage profile for a unit shift speed and its
// lateral relaxation under the effective operator.
// ---------------------------------------------------------------------------

struct DirectionalMean {
  ProfileF m_xi;          // profile of the shifted problem, c = 1
  TailResult L_xi;        // tail of the lateral relaxation of that profile
};

inline DirectionalMean m_xi_and_L_xi(const Direction& xi, const Vec& eta,
                                     const EllipticOperator& G,
                                     const TrigPoly& g, const CellConfig& cfg) {
  if (!xi.rational)
    throw PreconditionError("directional means need a rational direction");
  if (std::abs(eta.dot(xi.nu)) > 1e-9)
    throw PreconditionError("the lateral direction must be orthogonal");

  HalfPlaneProblem base;
  base.nu = xi;
  base.c = 1.0;
  base.op = G;
  base.bdata = g;
  base.y_period = cfg.y_period;
  base.s_period = cfg.s_period;

  DirectionalMean out;
  out.m_xi = profile_f(base, cfg, 128);

  // Lateral stage: static half-plane data m_xi(x . eta) relaxed under the
  // effective operator. Only constant-coefficient operators keep their form
  // in the limit; reject anything else honestly.
  EffectiveOperator eff(G.rescaled_limit());
  if (!eff.trivial())
    throw UnsupportedLimitError(
        "the lateral stage needs a constant-coefficient effective operator");

  const double resid = out.m_xi.interp_residual();
  if (resid > cfg.interp_tol)
    throw ConfigError(
        "directional profile is sampled too coarsely for the lateral stage");

  const Vec normal = xi.rational->unit();
  const Vec tangent = frame_tangent(normal);
  const double factor = tangent.dot(eta.unit());
  const double lateral = out.m_xi.period_theta * xi.rational->norm() *
                         xi.rational->norm();
  // The profile has period period_theta in the lateral coordinate; the box
  // above covers an integer number of those periods.
  const int n_lat = std::max(
      8, static_cast<int>(std::llround(lateral / cfg.h_target)));

  detail::CoreSpec spec;
  spec.lattice = Lattice::halfplane(lateral, n_lat, cfg.depth());
  spec.op = G.rescaled_limit();
  spec.relax_time = cfg.relax_time;
  spec.time_period = 0.0;
  spec.window = cfg.window;
  spec.stop_tol = cfg.stop_tol;
  spec.min_time = cfg.min_time;
  spec.cfl_safety = cfg.cfl_safety;
  const ProfileF& prof = out.m_xi;
  const double c = prof.c;
  spec.dirichlet = [&prof, factor, c](const Vec& p, double) {
    return prof.eval(p.x * factor / c);
  };
  const double m = prof.mean();
  spec.initial = [m](const Vec&) { return m; };

  HalfPlaneRun run = detail::solve_core(spec);
  run.nu = xi;
  out.L_xi = extract_tail(run, cfg.probe_depths, cfg.use_aitken);
  out.L_xi.interp_residual = resid;
  return out;
}

// ---------------------------------------------------------------------------
// Bottom-of-the-domain relaxation: torus initial-value problem probed along
// a time ladder.
// ---------------------------------------------------------------------------

inline TailResult solve_bottom(const Vec& x0, const EllipticOperator& F,
                               const TrigPoly& g, const CellConfig& cfg) {
  (void)x0;  // the freezing point; coefficients are already frozen upstream
  const int dim = F.dim();
  if (F.kind() == OpKind::custom)
    throw PreconditionError("cell solves need a stencil-representable operator");
  if (!g.has_period(dim, cfg.y_period, cfg.s_period, 1e-12))
    throw PreconditionError("initial data must be periodic in the declared cell");
  if (cfg.time_probes.empty())
    throw PreconditionError("bottom solves need a time ladder");

  const auto wall0 = std::chrono::steady_clock::now();

  std::vector<double> probes = cfg.time_probes;
  std::sort(probes.begin(), probes.end());

  const int n = std::max(8, static_cast<int>(std::llround(
                                cfg.y_period / cfg.h_target)));
  EvolutionProblem prob;
  prob.lattice = Lattice::torus(dim, cfg.y_period, n);
  prob.op = F;
  const TrigPoly g_eff = g.shifted(cfg.z, cfg.tau);
  prob.initial = [&g_eff](const Vec& y) { return g_eff.eval(y, 0.0); };
  prob.options.cfl_safety = cfg.cfl_safety;
  const bool op_time_dep = [&] {
    for (const auto& m : F.members())
      if (!m.scale.constant_in_time() || !m.source.constant_in_time())
        return true;
    return false;
  }();
  if (op_time_dep) prob.options.snap_period = cfg.s_period;

  Evolution evo(prob);

  TailResult out;
  out.h = prob.lattice.h();
  out.dt = evo.stability_dt();

  std::vector<double> means;
  for (double target : probes) {
    evo.run_until(target);
    const auto& u = evo.values();
    const auto [lo_it, hi_it] = std::minmax_element(u.begin(), u.end());
    const double lo = *lo_it, hi = *hi_it;
    DepthProbe p;
    p.depth = target;              // ladder position doubles as the probe label
    p.mean = evo.domain_mean();
    p.osc = hi - lo;
    p.time_osc = 0.0;
    out.osc_table.push_back(p);
    means.push_back(p.mean);
  }

  std::vector<double> candidates{means.back()};
  if (means.size() >= 2) candidates.push_back(means[means.size() - 2]);
  if (cfg.use_aitken && means.size() >= 3) {
    const auto a = aitken(means[means.size() - 3], means[means.size() - 2],
                          means.back());
    if (a) {
      out.aitken_value = *a;
      candidates.push_back(*a);
    }
  }
  out.upper = *std::max_element(candidates.begin(), candidates.end());
  out.lower = *std::min_element(candidates.begin(), candidates.end());
  out.value = 0.5 * (out.upper + out.lower);

  std::vector<double> xs, ys;
  for (const auto& p : out.osc_table)
    if (p.osc > 1e-13) {
      xs.push_back(std::log(p.depth));
      ys.push_back(std::log(p.osc));
    }
  if (xs.size() >= 2) out.fitted_decay = fit_line(xs, ys).slope;

  out.relaxed = out.osc_table.back().osc <= 1e-4;
  out.time_end = evo.time();
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return out;
}

}  // namespace homog
