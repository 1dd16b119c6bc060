#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure mode raised by the library derives from
// Error so callers can distinguish misuse (config, geometry, preconditions)
// from numerical refusals (CFL, smallness thresholds, stencil limits).
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error { using Error::Error; };
struct InvalidOperatorError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct StencilError : Error { using Error::Error; };
struct CflError : Error { using Error::Error; };
struct SmallnessError : Error { using Error::Error; };
struct UnsupportedLimitError : Error { using Error::Error; };
struct UnsupportedPointError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Small fixed-dimension vector (dim 1 or 2). The y coordinate is ignored in
// dimension 1; all geometry in the library flows through this type.
// ---------------------------------------------------------------------------
struct Vec {
  int dim{2};
  double x{0.0};
  double y{0.0};

  static Vec d1(double x) { return Vec{1, x, 0.0}; }
  static Vec d2(double x, double y) { return Vec{2, x, y}; }

  double dot(const Vec& o) const { return x * o.x + (dim == 2 ? y * o.y : 0.0); }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec unit() const {
    const double n = norm();
    if (n == 0.0) throw GeometryError("cannot normalize the zero vector");
    return Vec{dim, x / n, dim == 2 ? y / n : 0.0};
  }
  // Counterclockwise perpendicular (dimension 2 only).
  Vec perp() const {
    if (dim != 2) throw GeometryError("perp() requires dimension 2");
    return Vec{2, -y, x};
  }
  Vec operator+(const Vec& o) const { return Vec{dim, x + o.x, y + o.y}; }
  Vec operator-(const Vec& o) const { return Vec{dim, x - o.x, y - o.y}; }
  Vec operator*(double s) const { return Vec{dim, x * s, y * s}; }
};

inline double sqr(double v) { return v * v; }
inline double pos_part(double v) { return v > 0.0 ? v : 0.0; }
inline double neg_part(double v) { return v < 0.0 ? -v : 0.0; }  // >= 0

// Oscillation of a sampled set: max - min. Empty sets oscillate by 0.
inline double oscillation(const std::vector<double>& vals) {
  if (vals.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  return *hi - *lo;
}

// ---------------------------------------------------------------------------
// Composite Simpson quadrature on [a, b] with n subintervals (n made even).
// Used for reference averages of closed-form integrands.
// ---------------------------------------------------------------------------
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 512) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Least-squares line fit y ~ intercept + slope * x, with the max absolute
// residual reported so callers can judge how linear the data actually is.
struct LineFit {
  double slope{0.0};
  double intercept{0.0};
  double max_residual{0.0};
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw PreconditionError("fit_line needs >= 2 points with matching lengths");
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw PreconditionError("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  for (size_t i = 0; i < xs.size(); ++i)
    out.max_residual = std::max(out.max_residual, std::abs(ys[i] - (out.intercept + out.slope * xs[i])));
  return out;
}

// Aitken delta-squared extrapolation of a geometrically converging sequence
// from three consecutive probes. Returns nullopt when the ratio test says
// the data is not in the geometric regime.
inline std::optional<double> aitken(double m1, double m2, double m3) {
  const double d1 = m2 - m1, d2 = m3 - m2;
  if (std::abs(d1) < 1e-15) return m3;
  const double r = d2 / d1;
  if (!(r > 0.0) || r > 0.97) return std::nullopt;
  return m3 + d2 * r / (1.0 - r);
}

// FNV-1a 64-bit hash; stable fingerprint for configs and records.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace homog
