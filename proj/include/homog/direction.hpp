#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "homog/common.hpp"

namespace homog {

// Integer normal vector; (p, q) with q ignored in dimension 1.
struct IntVec {
  long long p{0};
  long long q{0};
  int dim{2};

  double norm() const { return std::sqrt(double(p) * p + double(q) * q); }
  Vec unit() const {
    const double n = norm();
    if (n == 0.0) throw GeometryError("zero integer vector");
    return dim == 2 ? Vec::d2(p / n, q / n) : Vec::d1(p < 0 ? -1.0 : 1.0);
  }
};

// ---------------------------------------------------------------------------
// Unit direction with optional rational representative nu_hat (an integer
// vector whose normalization reproduces nu to working precision). The
// rational representative controls the lateral period |nu_hat| of half-plane
// problems; directions without one are treated as irrational.
// ---------------------------------------------------------------------------
struct Direction {
  Vec nu;  // unit
  std::optional<IntVec> rational;

  int dim() const { return nu.dim; }
  // Lateral period of the trace of the unit lattice on the boundary.
  double lateral_period() const {
    if (!rational) throw PreconditionError("direction has no rational representative");
    return rational->norm();
  }
};

// Search for an integer representative of nu: the smallest-norm integer
// vector nu_hat with |nu_hat/|nu_hat| - nu| <= tol, among |nu_hat| <= cap.
// The cap keeps convergent-rich directions (tan slopes, sqrt(2) slopes)
// classified irrational at desk tolerances; raise it to push the search.
inline std::optional<IntVec> rationality(const Vec& nu_in, double tol = 1e-6, int cap = 250) {
  const Vec nu = nu_in.unit();
  if (nu.dim == 1) return IntVec{nu.x < 0 ? -1 : 1, 0, 1};
  const long long bound = std::min<long long>(cap, std::llround(std::floor(1.0 / tol)));
  std::optional<IntVec> best;
  double best_norm = 0.0;
  for (long long p = -bound; p <= bound; ++p) {
    for (long long q = -bound; q <= bound; ++q) {
      if (p == 0 && q == 0) continue;
      const double n = std::sqrt(double(p) * p + double(q) * q);
      if (n > bound) continue;
      if (best && n >= best_norm) continue;
      const double dx = p / n - nu.x, dy = q / n - nu.y;
      if (std::sqrt(dx * dx + dy * dy) <= tol) {
        best = IntVec{p, q, 2};
        best_norm = n;
      }
    }
  }
  return best;
}

inline Direction make_direction(const Vec& nu, double tol = 1e-6, int cap = 250) {
  Direction d;
  d.nu = nu.unit();
  d.rational = rationality(d.nu, tol, cap);
  return d;
}

// min over nonzero integer vectors |m| <= N of the distance |m . nu| to the
// boundary hyperplane; zero iff nu has a rational representative within N.
inline double lattice_normal_gap(const Vec& nu_in, int N) {
  if (N < 1) throw PreconditionError("lattice_normal_gap: N >= 1 required");
  const Vec nu = nu_in.unit();
  double best = std::abs(double(N)) * 10.0 + 1.0;
  if (nu.dim == 1) return 1.0;  // |m * (+-1)| >= 1
  for (long long p = -N; p <= N; ++p)
    for (long long q = -N; q <= N; ++q) {
      if (p == 0 && q == 0) continue;
      if (double(p) * p + double(q) * q > double(N) * N) continue;
      best = std::min(best, std::abs(p * nu.x + q * nu.y));
    }
  return best;
}

// Continued-fraction convergents p_k/q_k of a nonnegative real.
inline std::vector<std::array<long long, 2>> cf_convergents(double x, int count) {
  std::vector<std::array<long long, 2>> out;
  long long p0 = 1, q0 = 0;  // p_{-1}/q_{-1}
  long long p1 = 0, q1 = 1;  // p_{-2}/q_{-2} ... standard recurrence seeds
  double rem = x;
  for (int k = 0; k < count; ++k) {
    const double fa = std::floor(rem);
    const long long a = (long long)fa;
    const long long p = a * p0 + p1, q = a * q0 + q1;
    out.push_back({p, q});
    p1 = p0; q1 = q0; p0 = p; q0 = q;
    const double frac = rem - fa;
    if (frac < 1e-14) break;  // terminating expansion: rational input
    rem = 1.0 / frac;
    if (!(rem < 1e15)) break;
  }
  return out;
}

// Rational approximant of an irrational direction: the order-th continued-
// fraction convergent of the slope, returned as a Direction carrying the
// integer representative. order 0 yields the zeroth convergent.
inline Direction continued_fraction_approx(const Vec& nu_in, int order) {
  if (order < 0) throw PreconditionError("continued_fraction_approx: order >= 0");
  const Vec nu = nu_in.unit();
  if (nu.dim == 1) {
    Direction d;
    d.nu = nu;
    d.rational = IntVec{nu.x < 0 ? -1 : 1, 0, 1};
    return d;
  }
  const double ax = std::abs(nu.x), ay = std::abs(nu.y);
  IntVec rep{0, 0, 2};
  if (ay < 1e-15) {
    rep = IntVec{nu.x < 0 ? -1 : 1, 0, 2};
  } else if (ax < 1e-15) {
    rep = IntVec{0, nu.y < 0 ? -1 : 1, 2};
  } else {
    const double slope = ay / ax;  // |nu_y| / |nu_x|
    auto conv = cf_convergents(slope, order + 1);
    auto [num, den] = conv.size() > size_t(order) ? conv[order] : conv.back();
    if (num == 0) num = 0, den = 1;
    rep = IntVec{(nu.x < 0 ? -den : den), (nu.y < 0 ? -num : num), 2};
    if (rep.p == 0 && rep.q == 0) rep = IntVec{nu.x < 0 ? -1 : 1, 0, 2};
  }
  Direction d;
  d.rational = rep;
  d.nu = rep.unit();
  return d;
}

}  // namespace homog
