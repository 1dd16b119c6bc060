#pragma once

// Registry of reproducible experiments.  Each entry couples a default
// configuration with a deterministic computation whose assertions encode the
// workbench's checkable claims: averaging identities, shift invariance,
// profile structure, effective-coefficient oracles, barrier certificates,
// discontinuity gaps, and direct small-scale sweeps.
//
// Every run reads its knobs from the (round-trippable) ExperimentConfig, so a
// record produced from a config file and one produced from the built-in
// default are byte-identical whenever the configs agree.  Nothing below
// depends on wall-clock time, thread count, or iteration order of containers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "homog/barriers.hpp"
#include "homog/cell.hpp"
#include "homog/config.hpp"
#include "homog/domains.hpp"
#include "homog/effop.hpp"
#include "homog/operators.hpp"
#include "homog/pipeline.hpp"
#include "homog/sweep.hpp"

namespace homog {
namespace exp_detail {

// ---------------------------------------------------------------------------
// Small shared helpers.
// ---------------------------------------------------------------------------

inline TrigPoly product_mode(double amp, const TrigFactor& a, const TrigFactor& b) {
  TrigPoly p;
  p.terms.push_back(TrigTerm{amp, {a, b}});
  return p;
}

inline TrigFactor sin_factor(double kx, double ky = 0.0, double ks = 0.0, double phase = 0.0) {
  return TrigFactor{true, kx, ky, ks, phase};
}
inline TrigFactor cos_factor(double kx, double ky = 0.0, double ks = 0.0, double phase = 0.0) {
  return TrigFactor{false, kx, ky, ks, phase};
}

// Composite Simpson rule on [a, b].
inline double simpson(double a, double b, int n, const std::function<double(double)>& f) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// CSV table builder with the pipeline's fixed numeric format.
class CsvTable {
 public:
  explicit CsvTable(std::string header) : body_(std::move(header)) { body_ += "\n"; }
  void row(const std::string& label, std::initializer_list<double> vals) {
    body_ += label;
    for (double v : vals) body_ += "," + strprintf("%.12g", v);
    body_ += "\n";
  }
  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

// Shallow half-plane grid for unit-period lateral data (decay rate ~ 2*pi).
inline CellConfig shallow_grid() {
  CellConfig cc;
  cc.h_target = 1.0 / 32;
  cc.probe_depths = {0.5, 1.0, 1.5, 2.0};
  cc.depth_L = 4.5;
  cc.relax_time = 8.0;
  cc.stop_tol = 1e-7;
  cc.min_time = 3.0;
  return cc;
}

// Grid for problems posed on a 2*pi cell (unit angular frequencies).
inline CellConfig wide_grid() {
  CellConfig cc;
  cc.h_target = kTwoPi / 16;
  cc.probe_depths = {kPi, 1.5 * kPi, 2 * kPi, 2.5 * kPi};
  cc.depth_L = 5 * kPi;
  cc.relax_time = 150.0;
  cc.stop_tol = 1e-6;
  cc.min_time = 25.0;
  cc.s_samples = 16;
  cc.y_period = kTwoPi;
  cc.s_period = kTwoPi;
  return cc;
}

inline OperatorSpec spec_heat(int dim) {
  OperatorSpec s;
  s.kind = "heat";
  s.dim = dim;
  return s;
}

inline OperatorSpec spec_pucci(const char* kind, int dim, double lam, double Lam) {
  OperatorSpec s;
  s.kind = kind;
  s.dim = dim;
  s.lambda = lam;
  s.Lambda = Lam;
  return s;
}

inline OperatorSpec spec_sigma_1d() {
  OperatorSpec s;
  s.kind = "linear_trace";
  s.dim = 1;
  s.A = SymMatrix::d1(1.0);
  s.scale = constant_data(2.0) + sin_mode(1.0, kTwoPi);
  return s;
}

// The oscillating-coefficient sweep problem shared by the two sweep entries:
// sigma(y) u'' on a translating half-line with mean-1/2 wall data.
inline void sweep_problem_defaults(ExperimentConfig& c) {
  c.op = spec_sigma_1d();
  DomainSpec dom;
  dom.kind = "flat";
  dom.dim = 1;
  dom.nu = Vec::d1(1.0);
  dom.offset = 0.0;
  dom.speed = 1.0;
  dom.span = 3.0;
  c.domain = dom;
  TrigPoly g = cos_mode(-0.5, kTwoPi);
  g.constant = 0.5;
  c.data = g;
  CellConfig cc;  // reference solves (bottom probes) on the unit cell
  cc.h_target = 1.0 / 32;
  cc.time_probes = {1.0, 2.0, 4.0, 8.0};
  c.grid = cc;
}

inline SweepPlan plan_from(const ExperimentConfig& cfg, const ExperimentConfig& dflt) {
  const SweepSettings s = cfg.sweep_or(*dflt.sweep);
  SweepPlan plan;
  plan.domain = cfg.domain_or(dflt.domain->build());
  plan.op = cfg.op_or(dflt.op->build());
  plan.g = cfg.data_or(*dflt.data);
  plan.cell = cfg.grid_or(*dflt.grid);
  plan.eps_ladder = s.eps_ladder;
  plan.probes = s.probes;
  plan.phase_samples = s.phase_samples;
  plan.phase_period = s.phase_period;
  plan.lateral_period = s.lateral_period;
  plan.collar_width_factor = s.collar_width_factor;
  plan.cfl_safety = s.cfl_safety;
  plan.budget = s.budget;
  return plan;
}

// Shared assertions for an eps-ladder probe: deviations from the reference
// must not grow along the ladder — 20% multiplicative slack plus a floor of
// 20% of the final tolerance, so rungs already deep inside the tolerance are
// not compared against phase-cancellation luck — and the finest rung must be
// within the final tolerance.
inline void assert_ladder(ExperimentRecord& rec, const SweepResult& res, const std::string& probe,
                          double final_tol, double ts) {
  std::vector<const SweepEntry*> rows;
  for (const auto& e : res.entries)
    if (e.probe == probe) rows.push_back(&e);
  for (std::size_t j = 0; j + 1 < rows.size(); ++j)
    rec.assert_le(probe + "-monotone-" + strprintf("%g", rows[j + 1]->eps),
                  rows[j + 1]->deviation,
                  1.2 * rows[j]->deviation + 0.2 * final_tol * ts);
  if (!rows.empty())
    rec.assert_le(probe + "-final-deviation", rows.back()->deviation, final_tol * ts);
}

inline void record_sweep(ExperimentRecord& rec, const SweepResult& res, const TrigPoly& g) {
  double max_u = 0.0;
  for (const auto& e : res.entries) max_u = std::max(max_u, e.max_abs_u);
  rec.assert_le("uniform-bound", max_u, g.sup_bound() + 1e-9);
  json rows = json::array();
  for (const auto& e : res.entries) {
    json r;
    r["probe"] = e.probe;
    r["eps"] = e.eps;
    r["value"] = e.value;
    r["reference"] = e.reference;
    r["deviation"] = e.deviation;
    rows.push_back(std::move(r));
  }
  rec.results["entries"] = std::move(rows);
  rec.results["warnings"] = res.warnings;
  rec.add_file("sweep.csv", sweep_csv(res));
}

}  // namespace exp_detail

namespace experiments {

using exp_detail::CsvTable;

// ===========================================================================
// linear-average: half-plane tails of mean-zero data under the heat operator
// vanish, both for lateral oscillation sin(2*pi*y1) and temporal oscillation
// sin(2*pi*s).
// ===========================================================================

inline ExperimentConfig linear_average_default() {
  ExperimentConfig c;
  c.experiment = "linear-average";
  c.name = "linear-average";
  c.grid = exp_detail::shallow_grid();
  c.tolerances = {{"tail-mean", 2e-3}};
  return c;
}

inline void linear_average_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const CellConfig lateral_cc = cfg.grid_or(exp_detail::shallow_grid());
  const double tol = cfg.tol_or("tail-mean", 2e-3) * ts;

  HalfPlaneProblem lat;
  lat.nu = make_direction(Vec::d2(0.0, 1.0));
  lat.op = EllipticOperator::heat(2);
  lat.bdata = sin_mode(1.0, kTwoPi);
  const TailResult t_lat = halfplane_tail(lat, lateral_cc);

  CellConfig time_cc = lateral_cc;  // deeper box: temporal modes decay slower
  time_cc.probe_depths = {1.5, 2.5, 3.5, 4.5};
  time_cc.depth_L = 10.0;
  time_cc.relax_time = 40.0;
  time_cc.min_time = 12.0;
  HalfPlaneProblem tim;
  tim.nu = make_direction(Vec::d1(1.0));
  tim.op = EllipticOperator::heat(1);
  tim.bdata = sin_mode(1.0, 0.0, 0.0, kTwoPi);
  const TailResult t_tim = halfplane_tail(tim, time_cc);

  rec.results["lateral"] = {{"value", t_lat.value}, {"bracket", t_lat.bracket()}};
  rec.results["time"] = {{"value", t_tim.value}, {"bracket", t_tim.bracket()}};
  rec.assert_le("lateral-tail-mean", std::abs(t_lat.value), tol);
  rec.assert_le("time-tail-mean", std::abs(t_tim.value), tol);

  CsvTable csv("case,value,lower,upper");
  csv.row("lateral", {t_lat.value, t_lat.lower, t_lat.upper});
  csv.row("time", {t_tim.value, t_tim.lower, t_tim.upper});
  rec.add_file("tails.csv", csv.str());
}

// ===========================================================================
// prop3.4-shift: tails at an irrational-normal (approximant) wall do not
// depend on the data shift (z, tau).
// ===========================================================================

inline ExperimentConfig prop34_default() {
  ExperimentConfig c;
  c.experiment = "prop3.4-shift";
  c.name = "prop3.4-shift";
  c.op = exp_detail::spec_pucci("pucci_plus", 2, 1.0, 2.0);
  DomainSpec dom;
  dom.kind = "stationary";
  dom.nu = Vec::d2(1.0, std::sqrt(2.0));
  dom.dim = 2;
  c.domain = dom;
  c.data = exp_detail::product_mode(1.0, exp_detail::sin_factor(kTwoPi),
                                    exp_detail::cos_factor(0.0, 0.0, kTwoPi));
  CellConfig cc;
  cc.h_target = 1.0 / 16;
  cc.probe_depths = {1.0, 2.0, 3.0, 4.0};
  cc.depth_L = 8.0;
  cc.relax_time = 20.0;
  cc.stop_tol = 1e-7;
  cc.min_time = 8.0;
  cc.cf_order = 1;
  c.grid = cc;
  c.tolerances = {{"shift-agreement", 2e-3}};
  return c;
}

inline void prop34_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = prop34_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const MovingDomain dom = cfg.domain_or(d.domain->build());
  const TrigPoly g = cfg.data_or(*d.data);
  CellConfig cc = cfg.grid_or(*d.grid);
  const double tol = cfg.tol_or("shift-agreement", 2e-3) * ts;

  const Vec x0 = dom.dim == 2 ? Vec::d2(0.0, 0.0) : Vec::d1(0.0);
  const BoundaryPoint pt = classify_boundary_point(dom, x0, 0.0);

  cc.z = Vec::d2(0.0, 0.0);
  cc.tau = 0.0;
  const GBarResult base = homogenized_boundary_data(pt, op, g, cc);

  cc.z = Vec::d2(0.37, 0.37);
  cc.tau = 0.61;
  const GBarResult moved = homogenized_boundary_data(pt, op, g, cc);

  rec.results["tail-zero-shift"] = base.tail.value;
  rec.results["tail-with-shift"] = moved.tail.value;
  rec.results["nu-error"] = base.nu_error;
  if (base.nu_used.rational)
    rec.results["nu-approximant"] = {base.nu_used.rational->p, base.nu_used.rational->q};
  rec.assert_le("shift-agreement", std::abs(base.tail.value - moved.tail.value), tol);

  CsvTable csv("shift,tau,value,lower,upper");
  csv.row("0", {0.0, base.tail.value, base.tail.lower, base.tail.upper});
  csv.row("0.37", {0.61, moved.tail.value, moved.tail.lower, moved.tail.upper});
  rec.add_file("tails.csv", csv.str());
}

// ===========================================================================
// prop3.7-profile: the first-stage tail depends on (z, s) only through
// theta = z . nu + c s, and is periodic with period 1/|c nu_hat| in s.
// ===========================================================================

inline ExperimentConfig prop37_default() {
  ExperimentConfig c;
  c.experiment = "prop3.7-profile";
  c.name = "prop3.7-profile";
  c.op = exp_detail::spec_pucci("pucci_plus", 2, 1.0, 2.0);
  TrigPoly g = sin_mode(0.5, 0.0, kTwoPi) + cos_mode(0.25, kTwoPi);
  g.constant = 0.3;
  c.data = g;
  CellConfig cc;
  cc.h_target = 1.0 / 32;
  cc.probe_depths = {0.5, 1.0, 1.5, 2.0};
  cc.depth_L = 4.5;
  cc.relax_time = 10.0;
  cc.stop_tol = 1e-7;
  cc.min_time = 4.0;
  c.grid = cc;
  c.tolerances = {{"profile-agreement", 2e-3}, {"periodicity", 2e-3}};
  return c;
}

inline void prop37_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = prop37_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const TrigPoly g = cfg.data_or(*d.data);
  const CellConfig cc = cfg.grid_or(*d.grid);

  auto tail_at = [&](const Vec& z, double s) {
    HalfPlaneProblem p;
    p.nu = make_direction(Vec::d2(0.0, 1.0));
    p.c = 1.0;
    p.z = z;
    p.s_param = s;
    p.op = op;
    p.bdata = g;
    p.y_period = cc.y_period;
    p.s_period = cc.s_period;
    return halfplane_tail(p, cc);
  };

  // Equal theta = z . nu + c s = 0.35 through two different (z, s) splits;
  // the first also carries a lateral shift that must not matter.
  const TailResult a1 = tail_at(Vec::d2(0.7, 0.35), 0.0);
  const TailResult a2 = tail_at(Vec::d2(0.0, 0.05), 0.30);
  // Periodicity in s: period = y_period / |c nu_hat| = 1 for nu = e2, c = 1.
  const TailResult b1 = tail_at(Vec::d2(0.0, 0.0), 0.15);
  const TailResult b2 = tail_at(Vec::d2(0.0, 0.0), 1.15);
  // Control: a genuinely different theta must give a different value, so the
  // two agreements above are not an artifact of a constant profile.
  const TailResult ctrl = tail_at(Vec::d2(0.0, 0.0), 0.60);

  rec.results["theta-split-a"] = a1.value;
  rec.results["theta-split-b"] = a2.value;
  rec.results["period-s"] = b1.value;
  rec.results["period-s-plus-1"] = b2.value;
  rec.assert_le("equal-theta-agreement", std::abs(a1.value - a2.value),
                cfg.tol_or("profile-agreement", 2e-3) * ts);
  rec.assert_le("s-periodicity", std::abs(b1.value - b2.value),
                cfg.tol_or("periodicity", 2e-3) * ts);
  rec.results["theta-control"] = ctrl.value;
  rec.assert_ge("profile-nondegenerate", std::abs(a1.value - ctrl.value), 0.05);

  CsvTable csv("label,z1,z2,s,value");
  csv.row("theta-0.35-a", {0.7, 0.35, 0.0, a1.value});
  csv.row("theta-0.35-b", {0.0, 0.05, 0.30, a2.value});
  csv.row("s-0.15", {0.0, 0.0, 0.15, b1.value});
  csv.row("s-1.15", {0.0, 0.0, 1.15, b2.value});
  csv.row("s-0.60", {0.0, 0.0, 0.60, ctrl.value});
  rec.add_file("tails.csv", csv.str());
}

// ===========================================================================
// prop3.9-trichotomy: extremal-operator tails bracket the heat tail, with a
// strictly positive convexity gap for mean-zero data.
// ===========================================================================

inline ExperimentConfig prop39_default() {
  ExperimentConfig c;
  c.experiment = "prop3.9-trichotomy";
  c.name = "prop3.9-trichotomy";
  CellConfig cc = exp_detail::shallow_grid();
  cc.h_target = 1.0 / 64;
  c.grid = cc;
  c.tolerances = {{"one-sided", 2e-3}, {"gap", 1e-2}, {"ordering", 1e-3}};
  return c;
}

inline void prop39_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const CellConfig cc = cfg.grid_or([] {
    CellConfig g = exp_detail::shallow_grid();
    g.h_target = 1.0 / 64;
    return g;
  }());
  const TrigPoly g = cfg.data_or(sin_mode(1.0, kTwoPi));

  auto tail_for = [&](const EllipticOperator& op) {
    HalfPlaneProblem p;
    p.nu = make_direction(Vec::d2(0.0, 1.0));
    p.op = op;
    p.bdata = g;
    p.y_period = cc.y_period;
    p.s_period = cc.s_period;
    return halfplane_tail(p, cc);
  };

  const TailResult plus = tail_for(EllipticOperator::pucci_plus(2, 1.0, 2.0));
  const TailResult heat = tail_for(EllipticOperator::heat(2));
  const TailResult minus = tail_for(EllipticOperator::pucci_minus(2, 1.0, 2.0));

  const double one_sided = cfg.tol_or("one-sided", 2e-3) * ts;
  const double ordering = cfg.tol_or("ordering", 1e-3) * ts;
  rec.results["pucci-plus"] = plus.value;
  rec.results["heat"] = heat.value;
  rec.results["pucci-minus"] = minus.value;
  rec.results["gap"] = plus.value - minus.value;
  rec.assert_ge("pucci-plus-tail", plus.value, -one_sided);
  rec.assert_le("pucci-minus-tail", minus.value, one_sided);
  rec.assert_ge("convexity-gap", plus.value - minus.value, cfg.tol_or("gap", 1e-2));
  rec.assert_le("heat-below-plus", heat.value, plus.value + ordering);
  rec.assert_ge("heat-above-minus", heat.value, minus.value - ordering);

  CsvTable csv("operator,value,lower,upper");
  csv.row("pucci-plus", {plus.value, plus.lower, plus.upper});
  csv.row("heat", {heat.value, heat.lower, heat.upper});
  csv.row("pucci-minus", {minus.value, minus.lower, minus.upper});
  rec.add_file("tails.csv", csv.str());
}

// ===========================================================================
// prop4.4-linear-L: for a linear operator the moving-wall limit equals the
// lateral relaxation L_xi, which equals the period-mean of the first-stage
// profile m_xi.
// ===========================================================================

inline ExperimentConfig prop44_default() {
  ExperimentConfig c;
  c.experiment = "prop4.4-linear-L";
  c.name = "prop4.4-linear-L";
  OperatorSpec op;
  op.kind = "linear_trace";
  op.dim = 2;
  op.A = SymMatrix::diag(1.5, 0.8);
  c.op = op;
  c.data = [] {
    TrigPoly g = sin_mode(0.15, 0.0, kTwoPi) + sin_mode(0.1, 0.0, 0.0, kTwoPi);
    g.constant = 0.4;
    return g;
  }();
  DomainSpec dom;
  dom.kind = "flat";
  dom.dim = 2;
  dom.nu = Vec::d2(0.0, 1.0);
  dom.speed = 1.0;
  dom.span = 3.0;
  c.domain = dom;
  CellConfig cc;
  cc.h_target = 1.0 / 16;
  cc.probe_depths = {0.5, 1.0, 1.5, 2.0};
  cc.depth_L = 4.5;
  cc.relax_time = 10.0;
  cc.stop_tol = 1e-7;
  cc.min_time = 4.0;
  c.grid = cc;
  c.tolerances = {{"linear-identity", 3e-3}};
  return c;
}

inline void prop44_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = prop44_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const MovingDomain dom = cfg.domain_or(d.domain->build());
  const TrigPoly g = cfg.data_or(*d.data);
  const CellConfig cc = cfg.grid_or(*d.grid);
  const double tol = cfg.tol_or("linear-identity", 3e-3) * ts;

  const Direction xi = make_direction(Vec::d2(0.0, 1.0));
  const DirectionalMean dm = m_xi_and_L_xi(xi, Vec::d2(1.0, 0.0), op, g, cc);
  const double m_mean = dm.m_xi.mean();
  const double L = dm.L_xi.value;

  const Vec x0 = Vec::d2(0.3, 0.0);
  const BoundaryPoint pt = classify_boundary_point(dom, x0, 0.0);
  const GBarResult gb = homogenized_boundary_data(pt, op, g, cc);

  rec.results["g-bar"] = gb.tail.value;
  rec.results["L-xi"] = L;
  rec.results["m-xi-mean"] = m_mean;
  rec.assert_le("gbar-equals-L", std::abs(gb.tail.value - L), tol);
  rec.assert_le("L-equals-profile-mean", std::abs(L - m_mean), tol);

  CsvTable csv("quantity,value");
  csv.row("g-bar", {gb.tail.value});
  csv.row("L-xi", {L});
  csv.row("m-xi-mean", {m_mean});
  rec.add_file("stages.csv", csv.str());
}

// ===========================================================================
// prop4.5-discontinuity: a cone-sup operator on the piecewise rotating
// domain.  Flat moving wall (t0 < 0): the two-stage value stays near zero.
// Tilted walls at small t0 > 0 (irrational normals): the value stays above a
// fixed constant.  The jump persists as t0 -> 0.
// ===========================================================================

inline ExperimentConfig prop45_default() {
  ExperimentConfig c;
  c.experiment = "prop4.5-discontinuity";
  c.name = "prop4.5-discontinuity";
  OperatorSpec op;
  op.kind = "cone_sup";
  op.dim = 2;
  op.delta = 0.05;
  op.K = 9;
  c.op = op;
  c.data = sin_mode(1.0, 0.0, 1.0);  // sin(y2) on the 2*pi cell
  c.grid = exp_detail::wide_grid();
  c.tolerances = {{"flat-agreement", 2e-3}};
  return c;
}

inline void prop45_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = prop45_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const TrigPoly g = cfg.data_or(*d.data);
  const CellConfig cc = cfg.grid_or(*d.grid);
  const double delta = cfg.op ? cfg.op->delta : d.op->delta;
  const int K = cfg.op ? cfg.op->K : d.op->K;

  // Reference constant: averaging the explicit decaying-wave envelope of the
  // flat-wall subsolutions over one data period on the unit-depth slice gives
  // (e^{-1} - e^{-2}) / pi; the tilted-wall values must stay above it.
  const double c_ref = (std::exp(-1.0) - std::exp(-2.0)) / kPi;
  rec.results["gap-constant"] = c_ref;

  const MovingDomain dom = MovingDomain::rotating();

  // Flat side: three times before the turn; identical cell problems.
  const std::vector<double> t_flat{-0.75, -0.40, -0.15};
  std::vector<double> flat_vals;
  for (double t0 : t_flat) {
    const BoundaryPoint pt = classify_boundary_point(dom, Vec::d2(0.4, t0), t0);
    const GBarResult gb = homogenized_boundary_data(pt, op, g, cc);
    flat_vals.push_back(gb.tail.value);
  }
  double flat_spread = 0.0, flat_max = flat_vals.front();
  for (std::size_t i = 0; i < flat_vals.size(); ++i) {
    flat_max = std::max(flat_max, flat_vals[i]);
    for (std::size_t j = i + 1; j < flat_vals.size(); ++j)
      flat_spread = std::max(flat_spread, std::abs(flat_vals[i] - flat_vals[j]));
  }

  // Tilted side: small t0 > 0.  The classified normal is irrational; its
  // continued-fraction approximant fixes the wall angle.  Solving at that
  // angle directly would need a box ~|nu_hat| wide and ~1/angle deep, so use
  // the exact reduction instead: rotate the frame so the wall is flat (the
  // cone axis counter-rotates) and rescale so the wall trace has unit
  // frequency (the operator is 1-homogeneous, so the tail is unchanged).
  const std::vector<double> t_tilt{0.05, 0.10};
  std::vector<double> tilt_vals;
  json tilt_info = json::array();
  for (double t0 : t_tilt) {
    const Vec x0 = Vec::d2(0.0, t0);
    const BoundaryPoint pt = classify_boundary_point(dom, x0, t0);
    const Direction nu_hat = continued_fraction_approx(pt.nu.nu, cc.cf_order);
    const double angle = std::atan2(-nu_hat.nu.x, nu_hat.nu.y);  // tilt from e2

    HalfPlaneProblem p;
    p.nu = make_direction(Vec::d2(0.0, 1.0));
    p.op = EllipticOperator::cone_sup_operator(delta, K, -angle);
    p.bdata = sin_mode(1.0, 1.0);  // unit-frequency trace along the wall
    p.y_period = kTwoPi;
    p.s_period = cc.s_period;
    CellConfig cc1 = cc;
    cc1.h_target = kTwoPi / 32;
    cc1.probe_depths = {1.5 * kPi, 2 * kPi, 2.5 * kPi, 3 * kPi};
    cc1.depth_L = 6.5 * kPi;
    cc1.relax_time = 400.0;
    cc1.min_time = 60.0;
    const TailResult tail = halfplane_tail(p, cc1);
    tilt_vals.push_back(tail.value);

    json info;
    info["t0"] = t0;
    info["angle"] = angle;
    if (nu_hat.rational) info["nu-approximant"] = {nu_hat.rational->p, nu_hat.rational->q};
    info["value"] = tail.value;
    tilt_info.push_back(std::move(info));
  }
  const double tilt_min = std::min(tilt_vals[0], tilt_vals[1]);

  rec.results["flat-values"] = flat_vals;
  rec.results["tilted"] = std::move(tilt_info);
  rec.results["jump"] = tilt_min - flat_max;

  rec.assert_le("flat-agreement", flat_spread, cfg.tol_or("flat-agreement", 2e-3) * ts);
  rec.assert_le("flat-below-half-c", flat_max, c_ref / 2);
  rec.assert_ge("tilted-above-c-0.05", tilt_vals[0], c_ref);
  rec.assert_ge("tilted-above-c-0.10", tilt_vals[1], c_ref);
  rec.assert_ge("persistent-jump", tilt_min - flat_max, c_ref / 2);

  CsvTable csv("point,t0,value");
  for (std::size_t i = 0; i < t_flat.size(); ++i)
    csv.row("flat", {t_flat[i], flat_vals[i]});
  for (std::size_t i = 0; i < t_tilt.size(); ++i)
    csv.row("tilted", {t_tilt[i], tilt_vals[i]});
  rec.add_file("gap.csv", csv.str());
}

// ===========================================================================
// prop4.6-invariant-gap: the rotation/reflection invariant operator
// max{tr M, Lambda tr M} separates the moving-wall value from the lateral
// mean: L_xi = 0 while g-bar stays above the quadrature constant Q.
// ===========================================================================

inline ExperimentConfig prop46_default() {
  ExperimentConfig c;
  c.experiment = "prop4.6-invariant-gap";
  c.name = "prop4.6-invariant-gap";
  OperatorSpec op;
  op.kind = "max_trace";
  op.dim = 2;
  op.Lambda = 2.0;
  c.op = op;
  c.data = sin_mode(1.0, 0.0, 1.0);
  c.grid = exp_detail::wide_grid();
  c.tolerances = {{"L-xi-zero", 2e-3}, {"gbar-margin", 2e-3}};
  return c;
}

inline void prop46_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = prop46_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const TrigPoly g = cfg.data_or(*d.data);
  const CellConfig cc = cfg.grid_or(*d.grid);
  const double Lambda = cfg.op ? cfg.op->Lambda : d.op->Lambda;

  // Quadrature constant: the average over one period of the larger of the
  // two explicit decaying travelling waves on the unit-depth slice.
  const double k1 = 1.0 / std::sqrt(2.0 * Lambda);
  auto kappa = [&](double t) {
    const double w1 = std::sin(t - k1) * std::exp(-k1);
    const double w2 = std::sin(t - 1.0 / std::sqrt(2.0)) * std::exp(-0.5);
    return std::max(w1, w2);
  };
  const double q_quad = exp_detail::simpson(0.0, kTwoPi, 4096, kappa) / kTwoPi;
  // Closed form of the same average for Lambda = 2 (both waves then share
  // the amplitude e^{-1/2} and differ only in phase).
  const double q_closed =
      std::exp(-0.5) * (2.0 / kPi) * std::sin((1.0 / std::sqrt(2.0) - 0.5) / 2.0);

  const Direction xi = make_direction(Vec::d2(0.0, 1.0));
  const DirectionalMean dm = m_xi_and_L_xi(xi, Vec::d2(1.0, 0.0), op, g, cc);

  const MovingDomain dom =
      MovingDomain::flat(2, xi, 0.0, 1.0, 3.0);
  const BoundaryPoint pt = classify_boundary_point(dom, Vec::d2(0.4, 0.0), 0.0);
  const GBarResult gb = homogenized_boundary_data(pt, op, g, cc);

  rec.results["L-xi"] = dm.L_xi.value;
  rec.results["g-bar"] = gb.tail.value;
  rec.results["Q-quadrature"] = q_quad;
  rec.results["Q-closed-form"] = q_closed;

  rec.assert_le("L-xi-zero", std::abs(dm.L_xi.value), cfg.tol_or("L-xi-zero", 2e-3) * ts);
  rec.assert_ge("gbar-above-Q", gb.tail.value,
                q_quad - cfg.tol_or("gbar-margin", 2e-3) * ts);
  rec.assert_ge("Q-positive", q_quad, 0.02);
  if (Lambda == 2.0)
    rec.assert_le("Q-quadrature-vs-closed", std::abs(q_quad - q_closed), 1e-5);

  CsvTable csv("quantity,value");
  csv.row("L-xi", {dm.L_xi.value});
  csv.row("g-bar", {gb.tail.value});
  csv.row("Q", {q_quad});
  rec.add_file("gap.csv", csv.str());
}

// ===========================================================================
// lemma3.6-shift: effective-coefficient identities.  Constant coefficients
// are their own limit; the oscillating 1D coefficient 2 + sin(2*pi*y)
// averages to the harmonic mean sqrt(3); shifts do not move the constant.
// ===========================================================================

inline ExperimentConfig lemma36_default() {
  ExperimentConfig c;
  c.experiment = "lemma3.6-shift";
  c.name = "lemma3.6-shift";
  c.op = exp_detail::spec_sigma_1d();
  c.tolerances = {{"constant-coefficient", 1e-3},
                  {"harmonic-mean", 5e-3},
                  {"shift-invariance", 1e-3}};
  return c;
}

inline void lemma36_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = lemma36_default();
  const EllipticOperator sigma_op = cfg.op_or(d.op->build());
  const EffOptions opts;

  // Constant coefficients: the ergodic constant reproduces the operator.
  const EllipticOperator pucci = EllipticOperator::pucci_plus(2, 1.0, 2.0);
  const std::vector<SymMatrix> tests{
      SymMatrix::identity(2), SymMatrix::diag(1.0, -1.0), SymMatrix(2, 2.0, 1.0, 1.0),
      SymMatrix(2, -1.0, 0.0, -1.0)};
  double const_dev = 0.0;
  for (const auto& M : tests) {
    const ErgodicResult r = ergodic_constant(pucci, M, opts);
    const_dev = std::max(const_dev, std::abs(r.value - pucci.evaluate(M, Vec::d2(0, 0), 0.0)));
  }

  // Oscillating coefficient: F-bar coefficient is the harmonic mean.
  EffectiveOperator eff(sigma_op);
  const double v = eff.value(SymMatrix::d1(1.0));
  const double harmonic = std::sqrt(3.0);

  // Shifting the coefficient cell does not move the constant.
  const std::vector<std::pair<Vec, double>> shifts{
      {Vec::d1(0.0), 0.0}, {Vec::d1(0.3), 0.2}, {Vec::d1(0.77), 0.13}};
  const ShiftInvarianceReport rep =
      shift_invariance_check(sigma_op, SymMatrix::d1(1.0), shifts, opts);

  rec.results["constant-coefficient-deviation"] = const_dev;
  rec.results["oscillating-value"] = v;
  rec.results["harmonic-mean"] = harmonic;
  rec.results["shift-deviation"] = rep.max_deviation;
  rec.results["shift-values"] = rep.values;

  rec.assert_le("constant-coefficient", const_dev, cfg.tol_or("constant-coefficient", 1e-3) * ts);
  rec.assert_le("harmonic-mean", std::abs(v - harmonic), cfg.tol_or("harmonic-mean", 5e-3) * ts);
  rec.assert_le("shift-invariance", rep.max_deviation,
                cfg.tol_or("shift-invariance", 1e-3) * ts);

  CsvTable csv("case,value,reference");
  csv.row("constant-coefficient-deviation", {const_dev, 0.0});
  csv.row("oscillating-1d", {v, harmonic});
  csv.row("shift-deviation", {rep.max_deviation, 0.0});
  rec.add_file("effop.csv", csv.str());
}

// ===========================================================================
// barrier-certificates: the five barrier constructions certify nonnegative
// discrete supersolution residuals; the self-similar kernel satisfies its
// exact scaling identity; the aggregate obeys its two-sided bounds.
// ===========================================================================

inline ExperimentConfig barriers_default() {
  ExperimentConfig c;
  c.experiment = "barrier-certificates";
  c.name = "barrier-certificates";
  c.tolerances = {{"slab", 1e-8},    {"slab-drift", 1e-8}, {"bottom", 1e-10},
                  {"singular", 1e-4}, {"aggregate", 1e-4},  {"scaling", 1e-12}};
  return c;
}

inline void barriers_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const double lam = 1.0, Lam = 2.0;
  const int dim = 2;

  struct Case {
    const char* key;
    Barrier barrier;
  };
  const MassConstants mass = aggregate_mass_constants(lam, Lam, dim);
  const double d0 = dim * lam / Lam;
  std::vector<ParabolicCylinder> cyls{{Vec::d2(0.2, 0.2), 0.3, 0.10},
                                      {Vec::d2(0.6, 0.5), 0.5, 0.08},
                                      {Vec::d2(0.35, 0.7), 0.8, 0.12}};
  const double C0 = 1.0;
  std::vector<Case> cases;
  cases.push_back({"slab", make_slab_barrier(0.25, 1.0, 1.0, lam, Lam, dim)});
  cases.push_back({"slab-drift", make_drift_barrier(0.25, 1.0, 1.0, lam, Lam, dim,
                                                    0.015, 1.0, 1.0)});
  cases.push_back({"bottom", make_bottom_barrier(0.25, 1.0, 1.0, Lam, dim)});
  cases.push_back({"singular", make_singular(lam, Lam, dim)});
  Barrier agg = make_aggregate(cyls, C0, mass.m1, mass.m2, d0, lam, Lam, dim);
  cases.push_back({"aggregate", agg});

  CsvTable csv("kind,min_residual,tol,samples,skipped,pass");
  json certs = json::object();
  for (const auto& c : cases) {
    CertifyOptions opt;
    opt.tol = cfg.tol_or(c.key, 1e-4) * ts;
    const BarrierCertificate cert =
        certify_supersolution(c.barrier, default_certification_region(c.barrier), opt);
    rec.assert_ge(std::string(c.key) + "-residual", cert.min_residual, -opt.tol);
    certs[c.key] = {{"min_residual", cert.min_residual},
                    {"samples", cert.samples},
                    {"skipped", cert.skipped}};
    csv.row(c.key, {cert.min_residual, opt.tol, double(cert.samples), double(cert.skipped),
                    double(cert.pass)});
  }
  rec.results["certificates"] = std::move(certs);

  // Exact parabolic scaling of the self-similar kernel: for every k > 0,
  // value(k x, k^2 t) = k^{-d0} value(x, t) up to roundoff.
  const Barrier& sing = cases[3].barrier;
  double worst_rel = 0.0;
  for (double k : {2.0, 3.0, 10.0}) {
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        for (double t : {0.2, 0.5, 1.0}) {
          const Vec x = Vec::d2(0.25 * i, 0.2 * j);
          const double lhs = sing.value(Vec::d2(k * x.x, k * x.y), k * k * t);
          const double rhs = std::pow(k, -d0) * sing.value(x, t);
          const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
          worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / scale);
        }
  }
  rec.results["scaling-deviation"] = worst_rel;
  rec.assert_le("scaling-identity", worst_rel, cfg.tol_or("scaling", 1e-12) * ts);

  // Aggregate two-sided bounds: at least C0 on each covering cylinder, and
  // at most delta far away once sum r^{d0} <= delta^2 / (M m2).
  const double sum_r = [&] {
    double s = 0.0;
    for (const auto& cl : cyls) s += std::pow(cl.r, d0);
    return s;
  }();
  const double M_const = C0 * mass.m2 * std::pow(2.0, d0) / mass.m1;
  const double delta = std::sqrt(sum_r * M_const * mass.m2);
  double on_min = std::numeric_limits<double>::infinity();
  for (const auto& cl : cyls)
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (double f : {0.25, 0.6, 1.0}) {
          const Vec x = Vec::d2(cl.center.x + 0.7 * cl.r * i, cl.center.y + 0.7 * cl.r * j);
          on_min = std::min(on_min, agg.value(x, cl.t0 + f * cl.r * cl.r));
        }
  double far_max = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double ang = kTwoPi * (i + 0.5) / 8;
    const Vec x = Vec::d2(0.4 + 2.5 * std::cos(ang), 0.5 + 2.5 * std::sin(ang));
    far_max = std::max(far_max, agg.value(x, 1.2));
  }
  rec.results["aggregate"] = {{"delta", delta}, {"on-cylinder-min", on_min},
                              {"far-max", far_max}, {"mass-m1", mass.m1},
                              {"mass-m2", mass.m2}};
  rec.assert_ge("aggregate-on-cylinders", on_min, C0);
  rec.assert_le("aggregate-far-bound", far_max, delta);

  rec.add_file("certificates.csv", csv.str());
}

// ===========================================================================
// bottom-B: initial-layer values from the torus relaxation are independent
// of the data shift, and reproduce the data mean for the heat operator.
// ===========================================================================

inline ExperimentConfig bottomB_default() {
  ExperimentConfig c;
  c.experiment = "bottom-B";
  c.name = "bottom-B";
  c.op = exp_detail::spec_pucci("pucci_plus", 2, 1.0, 2.0);
  c.data = [] {
    TrigPoly g = exp_detail::product_mode(0.5, exp_detail::sin_factor(kTwoPi),
                                          exp_detail::cos_factor(0.0, kTwoPi));
    g.constant = 0.25;
    return g;
  }();
  CellConfig cc;
  cc.h_target = 1.0 / 32;
  cc.time_probes = {0.5, 1.0, 2.0, 4.0};
  c.grid = cc;
  c.tolerances = {{"shift-agreement", 1e-3}, {"heat-mean", 2e-3}};
  return c;
}

inline void bottomB_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = bottomB_default();
  const EllipticOperator op = cfg.op_or(d.op->build());
  const TrigPoly g = cfg.data_or(*d.data);
  CellConfig cc = cfg.grid_or(*d.grid);
  const Vec x0 = Vec::d2(0.0, 0.0);

  cc.z = Vec::d2(0.0, 0.0);
  const TailResult b0 = solve_bottom(x0, op, g, cc);
  cc.z = Vec::d2(0.41, 0.41);
  const TailResult b1 = solve_bottom(x0, op, g, cc);

  cc.z = Vec::d2(0.0, 0.0);
  const TailResult bh = solve_bottom(x0, EllipticOperator::heat(2), g, cc);
  const double mean = g.cell_mean(2, cc.y_period, cc.s_period);

  rec.results["value-zero-shift"] = b0.value;
  rec.results["value-with-shift"] = b1.value;
  rec.results["heat-value"] = bh.value;
  rec.results["data-mean"] = mean;

  rec.assert_le("shift-agreement", std::abs(b0.value - b1.value),
                cfg.tol_or("shift-agreement", 1e-3) * ts);
  rec.assert_le("heat-mean", std::abs(bh.value - mean), cfg.tol_or("heat-mean", 2e-3) * ts);

  CsvTable csv("case,value,lower,upper");
  csv.row("zero-shift", {b0.value, b0.lower, b0.upper});
  csv.row("shift-0.41", {b1.value, b1.lower, b1.upper});
  csv.row("heat", {bh.value, bh.lower, bh.upper});
  rec.add_file("tails.csv", csv.str());
}

// ===========================================================================
// sweep-gamma2: direct small-eps solves on the translating half-line; probe
// values at depth sqrt(eps) R converge to the two-stage limit.
// ===========================================================================

inline ExperimentConfig sweep_gamma2_default() {
  ExperimentConfig c;
  c.experiment = "sweep-gamma2";
  c.name = "sweep-gamma2";
  exp_detail::sweep_problem_defaults(c);
  SweepSettings s;
  s.eps_ladder = {0.25, 0.125, 0.0625};
  s.phase_samples = 8;
  ProbeSpec p;
  p.id = "sq";
  p.x0 = Vec::d1(0.3);
  p.t0 = 0.3;
  p.R = 1.0;
  p.scaling = DepthScaling::sqrt_eps_R;
  p.reference = 0.5;  // two-stage value: linear second stage averages the
                      // mean-1/2 wall trace exactly
  s.probes = {p};
  s.phase_period = 1.0;
  s.lateral_period = 1.0;
  c.sweep = s;
  c.tolerances = {{"final-deviation", 5e-3}};
  return c;
}

inline void sweep_gamma2_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = sweep_gamma2_default();
  SweepPlan plan = exp_detail::plan_from(cfg, d);
  const SweepResult res = run_sweep(plan);
  exp_detail::record_sweep(rec, res, plan.g);
  for (const auto& p : plan.probes)
    exp_detail::assert_ladder(rec, res, p.id, cfg.tol_or("final-deviation", 5e-3), ts);
}

// ===========================================================================
// sweep-bottom: direct small-eps solves probed at the initial-layer scale;
// values converge to the torus relaxation limit.
// ===========================================================================

inline ExperimentConfig sweep_bottom_default() {
  ExperimentConfig c;
  c.experiment = "sweep-bottom";
  c.name = "sweep-bottom";
  exp_detail::sweep_problem_defaults(c);
  SweepSettings s;
  s.eps_ladder = {0.25, 0.125, 0.0625};
  s.phase_samples = 8;
  ProbeSpec p;
  p.id = "bot";
  p.x0 = Vec::d1(0.7);
  p.t0 = 0.0;
  p.R = 1.0;
  p.scaling = DepthScaling::bottom;
  s.probes = {p};
  s.phase_period = 1.0;
  s.lateral_period = 1.0;
  c.sweep = s;
  c.tolerances = {{"final-deviation", 5e-3}};
  return c;
}

inline void sweep_bottom_run(const ExperimentConfig& cfg, double ts, ExperimentRecord& rec) {
  const ExperimentConfig d = sweep_bottom_default();
  SweepPlan plan = exp_detail::plan_from(cfg, d);
  const SweepResult res = run_sweep(plan);
  exp_detail::record_sweep(rec, res, plan.g);
  for (const auto& p : plan.probes)
    exp_detail::assert_ladder(rec, res, p.id, cfg.tol_or("final-deviation", 5e-3), ts);
}

}  // namespace experiments

// ---------------------------------------------------------------------------
// The registry.
// ---------------------------------------------------------------------------

inline const std::vector<Experiment>& experiment_registry() {
  static const std::vector<Experiment> registry = {
      {"linear-average", "half-plane tails of mean-zero data vanish under the heat operator",
       {"cell", "linear"}, &experiments::linear_average_default,
       &experiments::linear_average_run},
      {"prop3.4-shift", "boundary-layer tails ignore lattice shifts of the data",
       {"cell", "shift"}, &experiments::prop34_default, &experiments::prop34_run},
      {"prop3.7-profile", "moving-phase tails depend only on z.nu + c s, periodically",
       {"cell", "profile"}, &experiments::prop37_default, &experiments::prop37_run},
      {"prop3.9-trichotomy", "extremal tails bracket the linear tail with a convexity gap",
       {"cell", "extremal"}, &experiments::prop39_default, &experiments::prop39_run},
      {"prop4.4-linear-L", "linear operators: two-stage value equals the directional mean",
       {"cell", "linear", "invariant"}, &experiments::prop44_default, &experiments::prop44_run},
      {"prop4.5-discontinuity", "cone-sup operator jumps between flat and tilted walls",
       {"cell", "discontinuity"}, &experiments::prop45_default, &experiments::prop45_run},
      {"prop4.6-invariant-gap", "invariant convex operator separates g-bar from the lateral mean",
       {"cell", "invariant"}, &experiments::prop46_default, &experiments::prop46_run},
      {"lemma3.6-shift", "effective coefficients are shift-invariant and match closed forms",
       {"effop", "shift"}, &experiments::lemma36_default, &experiments::lemma36_run},
      {"barrier-certificates", "supersolution barriers certify nonnegative residuals",
       {"barriers"}, &experiments::barriers_default, &experiments::barriers_run},
      {"bottom-B", "initial-layer values are shift-invariant and average linear data",
       {"bottom", "cell", "shift"}, &experiments::bottomB_default, &experiments::bottomB_run},
      {"sweep-gamma2", "direct sweeps converge to the boundary-layer limit at depth sqrt(eps)R",
       {"sweep"}, &experiments::sweep_gamma2_default, &experiments::sweep_gamma2_run},
      {"sweep-bottom", "direct sweeps converge to the initial-layer limit at bottom scale",
       {"sweep", "bottom"}, &experiments::sweep_bottom_default, &experiments::sweep_bottom_run},
  };
  return registry;
}

}  // namespace homog
