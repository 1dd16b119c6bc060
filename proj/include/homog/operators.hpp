#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "homog/bdata.hpp"
#include "homog/matrix.hpp"

namespace homog {

enum class OpKind { pucci_plus, pucci_minus, bellman_max, bellman_min, linear_trace, custom };

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::pucci_plus: return "pucci_plus";
    case OpKind::pucci_minus: return "pucci_minus";
    case OpKind::bellman_max: return "bellman_max";
    case OpKind::bellman_min: return "bellman_min";
    case OpKind::linear_trace: return "linear_trace";
    default: return "custom";
  }
}

// One branch of a Bellman operator: scale(y, s) * tr(A M) + source(y, s).
// scale and source are periodic trigonometric data in the fast variables.
struct OperatorMember {
  SymMatrix A;
  TrigPoly scale = constant_data(1.0);
  TrigPoly source = constant_data(0.0);
};

// ---------------------------------------------------------------------------
// Degenerate/uniformly elliptic operator F(M, y, s), positively 1-homogeneous
// in M up to the additive sources. Pucci extremal operators are evaluated in
// closed form through eigenvalues; Bellman kinds through their member list.
// ---------------------------------------------------------------------------
class EllipticOperator {
 public:
  using CustomEval = std::function<double(const SymMatrix&, const Vec&, double)>;

  static EllipticOperator pucci_plus(int dim, double lambda, double Lambda) {
    return pucci(OpKind::pucci_plus, dim, lambda, Lambda);
  }
  static EllipticOperator pucci_minus(int dim, double lambda, double Lambda) {
    return pucci(OpKind::pucci_minus, dim, lambda, Lambda);
  }
  static EllipticOperator heat(int dim) {
    EllipticOperator op;
    op.kind_ = OpKind::linear_trace;
    op.dim_ = dim;
    op.members_ = {OperatorMember{SymMatrix::identity(dim)}};
    op.lambda_ = op.Lambda_ = 1.0;
    op.label_ = "heat";
    return op;
  }
  static EllipticOperator linear_trace(const SymMatrix& A, TrigPoly scale = constant_data(1.0),
                                       TrigPoly source = constant_data(0.0),
                                       std::string label = "linear") {
    EllipticOperator op;
    op.kind_ = OpKind::linear_trace;
    op.dim_ = A.dim();
    op.members_ = {OperatorMember{A, std::move(scale), std::move(source)}};
    op.label_ = std::move(label);
    op.derive_ellipticity();
    return op;
  }
  static EllipticOperator bellman(OpKind kind, int dim, std::vector<OperatorMember> members,
                                  std::string label) {
    if (kind != OpKind::bellman_max && kind != OpKind::bellman_min)
      throw InvalidOperatorError("bellman factory requires a bellman kind");
    if (members.empty()) throw InvalidOperatorError("bellman operator needs at least one member");
    EllipticOperator op;
    op.kind_ = kind;
    op.dim_ = dim;
    op.members_ = std::move(members);
    op.label_ = std::move(label);
    for (const auto& m : op.members_)
      if (m.A.dim() != dim) throw ShapeError("member dimension mismatch");
    op.derive_ellipticity();
    return op;
  }
  // sup over 0 <= A <= Lambda I of tr(A M) = Lambda tr(M_+); degenerate
  // (lambda = 0) majorant used for comparison arguments.
  // F(M) = max{tr M, Lambda tr M}: convex, rotation and reflection invariant,
  // and a function of the trace alone.
  static EllipticOperator max_trace_operator(int dim, double Lambda) {
    if (!(Lambda >= 1.0))
      throw InvalidOperatorError("max_trace_operator needs Lambda >= 1");
    EllipticOperator op =
        bellman(OpKind::bellman_max, dim,
                {OperatorMember{SymMatrix::identity(dim)},
                 OperatorMember{SymMatrix::identity(dim) * Lambda}},
                "max_trace");
    return op;
  }
  // sup over {Laplacian} and {4 d_eta^2 + d_nu^2 : eta in a closed angular
  // cone of half-width delta around axis_angle, nu = eta^perp}, sampled at K
  // equispaced directions inclusive of the cone edges. 4 eta x eta + nu x nu
  // = I + 3 eta x eta.
  static EllipticOperator cone_sup_operator(double delta, int K, double axis_angle = 0.0) {
    if (K < 2) throw InvalidOperatorError("cone_sup_operator needs K >= 2 directions");
    std::vector<OperatorMember> members;
    members.push_back(OperatorMember{SymMatrix::identity(2)});
    for (int k = 0; k < K; ++k) {
      const double theta = axis_angle - delta + 2.0 * delta * k / (K - 1);
      const Vec eta = Vec::d2(std::cos(theta), std::sin(theta));
      members.push_back(OperatorMember{SymMatrix::identity(2) + SymMatrix::outer(eta, 3.0)});
    }
    return bellman(OpKind::bellman_max, 2, std::move(members), "cone_sup");
  }
  static EllipticOperator custom(int dim, double lambda, double Lambda, CustomEval eval,
                                 std::string label) {
    if (!(lambda >= 0.0 && Lambda >= lambda && Lambda > 0.0))
      throw InvalidOperatorError("ellipticity constants must satisfy 0 <= lambda <= Lambda, Lambda > 0");
    EllipticOperator op;
    op.kind_ = OpKind::custom;
    op.dim_ = dim;
    op.lambda_ = lambda;
    op.Lambda_ = Lambda;
    op.custom_ = std::move(eval);
    op.label_ = std::move(label);
    return op;
  }

  OpKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  const std::string& label() const { return label_; }
  const std::vector<OperatorMember>& members() const { return members_; }

  bool depends_on_fast_variables() const {
    for (const auto& m : members_)
      if (!m.scale.terms.empty() || !m.source.terms.empty() || m.source.constant != 0.0)
        return true;
    return false;
  }

  double evaluate(const SymMatrix& M, const Vec& y = Vec::d2(0, 0), double s = 0.0) const {
    if (M.dim() != dim_) throw ShapeError("operator/matrix dimension mismatch");
    switch (kind_) {
      case OpKind::pucci_plus:
        return Lambda_ * M.trace_plus() - lambda_ * M.trace_minus();
      case OpKind::pucci_minus:
        return lambda_ * M.trace_plus() - Lambda_ * M.trace_minus();
      case OpKind::linear_trace: {
        const auto& m = members_[0];
        return m.scale.eval(y, s) * m.A.inner(M) + m.source.eval(y, s);
      }
      case OpKind::bellman_max: {
        double best = -1e300;
        for (const auto& m : members_)
          best = std::max(best, m.scale.eval(y, s) * m.A.inner(M) + m.source.eval(y, s));
        return best;
      }
      case OpKind::bellman_min: {
        double best = 1e300;
        for (const auto& m : members_)
          best = std::min(best, m.scale.eval(y, s) * m.A.inner(M) + m.source.eval(y, s));
        return best;
      }
      case OpKind::custom:
        return custom_(M, y, s);
    }
    throw InvalidOperatorError("unreachable operator kind");
  }

  // Recession operator F0(M) = lim_{k->inf} F(k M, y, s) / k: drops the
  // bounded sources and keeps the 1-homogeneous part. Opaque custom
  // evaluators carry no structural information to take this limit.
  EllipticOperator rescaled_limit() const {
    if (kind_ == OpKind::custom)
      throw UnsupportedLimitError("rescaled limit is undefined for opaque custom operators");
    EllipticOperator op = *this;
    op.label_ = label_ + "_rescaled";
    for (auto& m : op.members_) m.source = constant_data(0.0);
    return op;
  }

  // Dual operator F*(M) = -F(-M); swaps extremal branches and negates sources.
  EllipticOperator dual() const {
    EllipticOperator op = *this;
    op.label_ = label_ + "_dual";
    switch (kind_) {
      case OpKind::pucci_plus: op.kind_ = OpKind::pucci_minus; return op;
      case OpKind::pucci_minus: op.kind_ = OpKind::pucci_plus; return op;
      case OpKind::bellman_max: op.kind_ = OpKind::bellman_min; break;
      case OpKind::bellman_min: op.kind_ = OpKind::bellman_max; break;
      case OpKind::linear_trace: break;
      case OpKind::custom: {
        auto inner = custom_;
        op.custom_ = [inner](const SymMatrix& M, const Vec& y, double s) {
          return -inner(-M, y, s);
        };
        return op;
      }
    }
    for (auto& m : op.members_) {
      m.source.constant = -m.source.constant;
      for (auto& t : m.source.terms) t.amp = -t.amp;
    }
    return op;
  }

 private:
  static EllipticOperator pucci(OpKind kind, int dim, double lambda, double Lambda) {
    if (!(lambda >= 0.0 && Lambda >= lambda && Lambda > 0.0))
      throw InvalidOperatorError("ellipticity constants must satisfy 0 <= lambda <= Lambda, Lambda > 0");
    if (dim != 1 && dim != 2) throw ShapeError("operators support dimensions 1 and 2");
    EllipticOperator op;
    op.kind_ = kind;
    op.dim_ = dim;
    op.lambda_ = lambda;
    op.Lambda_ = Lambda;
    op.label_ = kind == OpKind::pucci_plus ? "pucci_plus" : "pucci_minus";
    return op;
  }

  void derive_ellipticity() {
    double lo = 1e300, hi = 0.0;
    for (const auto& m : members_) {
      const auto eig = m.A.eigenvalues();
      const double osc = m.scale.sup_bound() - std::abs(m.scale.constant);
      const double smin = m.scale.constant - osc;
      const double smax = m.scale.constant + osc;
      if (smin <= 0.0) throw InvalidOperatorError("member scale must stay strictly positive");
      if (eig[0] <= 0.0) throw InvalidOperatorError("member matrices must be positive definite");
      lo = std::min(lo, eig[0] * smin);
      hi = std::max(hi, eig[1] * smax);
    }
    lambda_ = lo;
    Lambda_ = hi;
  }

  OpKind kind_{OpKind::linear_trace};
  int dim_{2};
  double lambda_{1.0};
  double Lambda_{1.0};
  std::vector<OperatorMember> members_;
  CustomEval custom_;
  std::string label_{"operator"};
};

// Operator family over the slow space-time variables; freezing at a boundary
// point yields the cell-problem operator there.
struct UnfrozenOperator {
  std::function<EllipticOperator(const Vec&, double)> at;
};

// ---------------------------------------------------------------------------
// Randomized structural audit: degenerate ellipticity sandwich, monotonicity
// in M, positive 1-homogeneity of the recession part, and extremal duality.
// Violations are max over trials; all should sit at rounding level.
// ---------------------------------------------------------------------------
struct EllipticityAudit {
  double sandwich_violation{0.0};     // F(M+N)-F(M) outside [P-(N), P+(N)]
  double monotonicity_violation{0.0}; // F(M+N) < F(M) for N >= 0
  double homogeneity_violation{0.0};  // F0(cM) != c F0(M), c > 0
  double duality_violation{0.0};      // F*(M) != -F(-M)
  double max_violation() const {
    return std::max(std::max(sandwich_violation, monotonicity_violation),
                    std::max(homogeneity_violation, duality_violation));
  }
};

inline SymMatrix random_symmetric(std::mt19937_64& rng, int dim, double span = 2.0) {
  std::uniform_real_distribution<double> u(-span, span);
  if (dim == 1) return SymMatrix::d1(u(rng));
  const double a = u(rng), b = u(rng), c = u(rng);
  return SymMatrix(2, a, b, c);
}

inline SymMatrix random_psd(std::mt19937_64& rng, int dim, double span = 1.5) {
  std::uniform_real_distribution<double> u(-span, span);
  if (dim == 1) return SymMatrix::d1(sqr(u(rng)));
  const double r1 = u(rng), r2 = u(rng), r3 = u(rng), r4 = u(rng);
  return SymMatrix(2, r1 * r1 + r3 * r3, r1 * r2 + r3 * r4, r2 * r2 + r4 * r4);
}

inline EllipticityAudit ellipticity_audit(const EllipticOperator& op, int trials = 2000,
                                          unsigned long long seed = 0x9e3779b97f4a7c15ull) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  EllipticityAudit audit;
  const auto plus = EllipticOperator::pucci_plus(op.dim(), op.lambda(), op.Lambda());
  const auto minus = EllipticOperator::pucci_minus(op.dim(), op.lambda(), op.Lambda());
  const auto hom = op.kind() == OpKind::custom ? op : op.rescaled_limit();
  const auto dual = op.dual();
  for (int i = 0; i < trials; ++i) {
    const SymMatrix M = random_symmetric(rng, op.dim());
    const SymMatrix N = random_psd(rng, op.dim());
    const Vec y = op.dim() == 1 ? Vec::d1(u01(rng)) : Vec::d2(u01(rng), u01(rng));
    const double s = u01(rng);
    const double dF = op.evaluate(M + N, y, s) - op.evaluate(M, y, s);
    audit.sandwich_violation = std::max(
        audit.sandwich_violation,
        std::max(minus.evaluate(N) - dF, dF - plus.evaluate(N)));
    audit.monotonicity_violation = std::max(audit.monotonicity_violation, -dF);
    if (op.kind() != OpKind::custom) {
      const double c = 0.25 + 4.0 * u01(rng);
      audit.homogeneity_violation =
          std::max(audit.homogeneity_violation,
                   std::abs(hom.evaluate(M * c, y, s) - c * hom.evaluate(M, y, s)) /
                       std::max(1.0, std::abs(c * hom.evaluate(M, y, s))));
    }
    audit.duality_violation =
        std::max(audit.duality_violation,
                 std::abs(dual.evaluate(M, y, s) + op.evaluate(-M, y, s)));
  }
  return audit;
}

}  // namespace homog
