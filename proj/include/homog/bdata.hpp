#pragma once

#include <cmath>
#include <vector>

#include "homog/common.hpp"

namespace homog {

// ---------------------------------------------------------------------------
// Closed grammar for oscillating data: constants plus sums of amplitude-
// scaled products of sin/cos factors in (y, s). Everything the pipeline
// feeds to a solver (boundary data, coefficient fields, sources) is one of
// these, so hot loops can precompute phases instead of calling through
// std::function.
//
//   poly(y, s) = c0 + sum_t amp_t * prod_f trig_f(kx*y1 + ky*y2 + ks*s + phase)
// ---------------------------------------------------------------------------
struct TrigFactor {
  bool is_sin{true};
  double kx{0.0}, ky{0.0}, ks{0.0}, phase{0.0};

  double angle(const Vec& y, double s) const {
    return kx * y.x + (y.dim == 2 ? ky * y.y : 0.0) + ks * s + phase;
  }
  double eval(const Vec& y, double s) const {
    const double a = angle(y, s);
    return is_sin ? std::sin(a) : std::cos(a);
  }
};

struct TrigTerm {
  double amp{1.0};
  std::vector<TrigFactor> factors;
};

struct TrigPoly {
  double constant{0.0};
  std::vector<TrigTerm> terms;

  double eval(const Vec& y, double s) const {
    double out = constant;
    for (const auto& t : terms) {
      double p = t.amp;
      for (const auto& f : t.factors) p *= f.eval(y, s);
      out += p;
    }
    return out;
  }

  // poly(y + dz, s + dtau) as a new poly (phases absorb the shift).
  TrigPoly shifted(const Vec& dz, double dtau) const {
    TrigPoly out = *this;
    for (auto& t : out.terms)
      for (auto& f : t.factors)
        f.phase += f.kx * dz.x + (dz.dim == 2 ? f.ky * dz.y : 0.0) + f.ks * dtau;
    return out;
  }

  bool constant_in_time() const {
    for (const auto& t : terms)
      for (const auto& f : t.factors)
        if (f.ks != 0.0) return false;
    return true;
  }

  bool constant_in_space() const {
    for (const auto& t : terms)
      for (const auto& f : t.factors)
        if (f.kx != 0.0 || f.ky != 0.0) return false;
    return true;
  }

  double sup_bound() const {  // crude uniform bound |poly| <= bound
    double b = std::abs(constant);
    for (const auto& t : terms) b += std::abs(t.amp);
    return b;
  }

  // Mean over [0, Py1) x [0, Py2) x [0, Ps) by tensor midpoint sampling;
  // exact enough for trig content well below the sampling frequency.
  double cell_mean(int dim, double y_period = 1.0, double s_period = 1.0, int n = 64) const {
    double sum = 0.0;
    long count = 0;
    const int ny = dim == 2 ? n : 1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < n; ++k) {
          Vec y = dim == 2 ? Vec::d2((i + 0.5) * y_period / n, (j + 0.5) * y_period / n)
                           : Vec::d1((i + 0.5) * y_period / n);
          sum += eval(y, (k + 0.5) * s_period / n);
          ++count;
        }
    return sum / double(count);
  }

  // Spot check of declared periodicity: eval(y + P e_i, s + Ps) == eval(y, s).
  bool has_period(int dim, double y_period, double s_period, double tol = 1e-9) const {
    for (int trial = 0; trial < 32; ++trial) {
      const double a = 0.137 + 0.61 * trial, b = 0.389 + 0.23 * trial, c = 0.071 + 0.41 * trial;
      Vec y = dim == 2 ? Vec::d2(a, b) : Vec::d1(a);
      Vec ys = dim == 2 ? Vec::d2(a + y_period, b + y_period) : Vec::d1(a + y_period);
      if (std::abs(eval(ys, c + s_period) - eval(y, c)) > tol) return false;
    }
    return true;
  }
};

// Single sin/cos mode helpers used throughout the experiments.
inline TrigPoly sin_mode(double amp, double kx, double ky = 0.0, double ks = 0.0,
                         double phase = 0.0) {
  TrigPoly p;
  p.terms.push_back(TrigTerm{amp, {TrigFactor{true, kx, ky, ks, phase}}});
  return p;
}
inline TrigPoly cos_mode(double amp, double kx, double ky = 0.0, double ks = 0.0,
                         double phase = 0.0) {
  TrigPoly p;
  p.terms.push_back(TrigTerm{amp, {TrigFactor{false, kx, ky, ks, phase}}});
  return p;
}
inline TrigPoly constant_data(double c) {
  TrigPoly p;
  p.constant = c;
  return p;
}
inline TrigPoly operator+(TrigPoly a, const TrigPoly& b) {
  a.constant += b.constant;
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

}  // namespace homog
