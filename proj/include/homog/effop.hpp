#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "homog/scheme.hpp"

namespace homog {

struct EffOptions {
  int torus_res{32};
  double horizon{12.0};
  double period{1.0};      // coefficient cell period
  double cfl_safety{0.9};
};

// Result of one ergodic-constant computation: the long-time slope of the
// torus mean, with a slope-scale fit residual quantifying its flatness.
struct ErgodicResult {
  double value{0.0};
  double residual{0.0};   // max fit deviation over the fit span, in slope units
  double horizon{0.0};
  int torus_res{0};
};

// Ergodic constant of d_t w = F(D^2 w + M, y + z, t + tau) on the coefficient
// torus, from w = 0: the fitted slope of mean(w) over the second half of the
// run. The cited uniqueness of the constant guarantees the slope converges.
inline ErgodicResult ergodic_constant(const EllipticOperator& base, const SymMatrix& M,
                                      const EffOptions& opts = {}, const Vec& z = Vec{},
                                      double tau = 0.0) {
  if (opts.torus_res < 16) throw PreconditionError("ergodic torus resolution must be >= 16");
  for (const auto& m : base.members()) {
    if (!m.scale.has_period(base.dim(), opts.period, opts.period) ||
        !m.source.has_period(base.dim(), opts.period, opts.period))
      throw PreconditionError("ergodic constant requires cell-periodic coefficients");
  }

  EvolutionProblem prob;
  prob.lattice = Lattice::torus(base.dim(), opts.period, opts.torus_res);
  prob.op = base;
  if (z.norm() != 0.0 || tau != 0.0) {
    // Shift the coefficients: F(., y + z, t + tau).
    auto shifted = [&](TrigPoly p) { return p.shifted(z, tau); };
    if (base.kind() == OpKind::pucci_plus || base.kind() == OpKind::pucci_minus) {
      // No coefficients to shift.
    } else {
      std::vector<OperatorMember> ms;
      for (const auto& m : base.members())
        ms.push_back(OperatorMember{m.A, shifted(m.scale), shifted(m.source)});
      if (base.kind() == OpKind::linear_trace)
        prob.op = EllipticOperator::linear_trace(ms[0].A, ms[0].scale, ms[0].source,
                                                 base.label());
      else
        prob.op = EllipticOperator::bellman(base.kind(), base.dim(), std::move(ms), base.label());
    }
  }
  prob.hessian_offset = M;
  prob.initial = [](const Vec&) { return 0.0; };
  prob.start_time = tau;  // time shift enters through the coefficient clock
  prob.options.cfl_safety = opts.cfl_safety;

  Evolution ev(prob);
  std::vector<double> ts, ms;
  const double t_fit = tau + 0.5 * opts.horizon;
  const double t_end = tau + opts.horizon;
  // Sample the mean sparsely; the slope needs only a modest series.
  const long long total = (long long)std::ceil(opts.horizon / ev.dt());
  const long long stride = std::max(1ll, total / 512);
  long long k = 0;
  while (ev.time() < t_end - 0.5 * ev.dt()) {
    ev.step();
    if (++k % stride == 0 && ev.time() >= t_fit) {
      ts.push_back(ev.time());
      ms.push_back(ev.domain_mean());
    }
  }
  if (ts.size() < 8) throw PreconditionError("ergodic horizon too short for a slope fit");
  const LineFit fit = fit_line(ts, ms);
  ErgodicResult out;
  out.value = fit.slope;
  out.residual = fit.max_residual / (ts.back() - ts.front());
  out.horizon = opts.horizon;
  out.torus_res = opts.torus_res;
  return out;
}

struct ShiftInvarianceReport {
  std::vector<double> values;
  double max_deviation{0.0};
  double residual{0.0};
  bool pass{false};
};

// Recomputes the ergodic constant under coefficient shifts (z, tau); the
// constant must not depend on them.
inline ShiftInvarianceReport shift_invariance_check(const EllipticOperator& base,
                                                    const SymMatrix& M,
                                                    const std::vector<std::pair<Vec, double>>& shifts,
                                                    const EffOptions& opts = {}) {
  if (shifts.size() < 2) throw PreconditionError("shift check needs at least two shifts");
  ShiftInvarianceReport rep;
  for (const auto& [z, tau] : shifts) {
    ErgodicResult r = ergodic_constant(base, M, opts, z, tau);
    rep.values.push_back(r.value);
    rep.residual = std::max(rep.residual, r.residual);
  }
  for (std::size_t a = 0; a < rep.values.size(); ++a)
    for (std::size_t b = a + 1; b < rep.values.size(); ++b)
      rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.values[a] - rep.values[b]));
  rep.pass = rep.max_deviation <= 2.0 * rep.residual + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Homogenized interior operator. Operators without fast-variable dependence
// are their own homogenization (trivial); otherwise values are computed by
// the ergodic method and cached. The reduced problem needs only the ray
// through nu x nu, interpolated 1-homogeneously from the two signed rays.
// ---------------------------------------------------------------------------
class EffectiveOperator {
 public:
  explicit EffectiveOperator(EllipticOperator base, EffOptions opts = {})
      : base_(std::move(base)), opts_(opts), trivial_(!base_.depends_on_fast_variables()) {}

  const EllipticOperator& base() const { return base_; }
  bool trivial() const { return trivial_; }
  double max_residual() const { return max_residual_; }

  double value(const SymMatrix& M) {
    if (trivial_) return base_.evaluate(M);
    const ErgodicResult r = ergodic_constant(base_, M, opts_);
    max_residual_ = std::max(max_residual_, r.residual);
    return r.value;
  }

  // Signed coefficients of the 1d ray q -> eff(q nu x nu):
  //   eff = a_plus * q for q >= 0, eff = a_minus * q for q <= 0.
  std::pair<double, double> ray_coefficients(const Vec& nu) {
    const auto key = std::make_pair(quant(nu.x), quant(nu.y));
    auto it = ray_cache_.find(key);
    if (it != ray_cache_.end()) return it->second;
    const SymMatrix P = SymMatrix::outer(nu.unit());
    const double a_plus = value(P);
    const double a_minus = -value(-P);
    if (a_plus <= 0.0 || a_minus <= 0.0)
      throw InvalidOperatorError("effective ray coefficients must be positive");
    ray_cache_[key] = {a_plus, a_minus};
    return {a_plus, a_minus};
  }

 private:
  static long long quant(double v) { return llround(v * 1e12); }
  EllipticOperator base_;
  EffOptions opts_;
  bool trivial_{true};
  double max_residual_{0.0};
  std::map<std::pair<long long, long long>, std::pair<double, double>> ray_cache_;
};

}  // namespace homog
