#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "homog/common.hpp"

namespace homog {

// ---------------------------------------------------------------------------
// Symmetric matrix in dimension 1 or 2, the Hessian currency of the library.
// Stored as (xx, xy, yy); xy and yy are unused in dimension 1. Eigenvalues
// are closed-form so extremal-operator evaluation is exact.
// ---------------------------------------------------------------------------
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(int dim, double xx, double xy, double yy) : dim_(dim), xx_(xx), xy_(xy), yy_(yy) {
    if (dim != 1 && dim != 2) throw ShapeError("SymMatrix: dimension must be 1 or 2");
    if (dim == 1) { xy_ = 0.0; yy_ = 0.0; }
  }

  static SymMatrix zero(int dim) { return SymMatrix(dim, 0.0, 0.0, 0.0); }
  static SymMatrix identity(int dim) { return SymMatrix(dim, 1.0, 0.0, dim == 2 ? 1.0 : 0.0); }
  static SymMatrix d1(double xx) { return SymMatrix(1, xx, 0.0, 0.0); }
  static SymMatrix diag(double xx, double yy) { return SymMatrix(2, xx, 0.0, yy); }

  // Full-entry constructor; refuses non-symmetric input.
  static SymMatrix from_entries(double m00, double m01, double m10, double m11,
                                double tol = 1e-12) {
    if (std::abs(m01 - m10) > tol * (1.0 + std::abs(m01) + std::abs(m10)))
      throw InvalidOperatorError("SymMatrix: entries are not symmetric");
    return SymMatrix(2, m00, 0.5 * (m01 + m10), m11);
  }

  // Rank-one e e^T scaled by w.
  static SymMatrix outer(const Vec& e, double w = 1.0) {
    if (e.dim == 1) return SymMatrix(1, w * e.x * e.x, 0.0, 0.0);
    return SymMatrix(2, w * e.x * e.x, w * e.x * e.y, w * e.y * e.y);
  }

  int dim() const { return dim_; }
  double xx() const { return xx_; }
  double xy() const { return xy_; }
  double yy() const { return yy_; }

  double trace() const { return dim_ == 1 ? xx_ : xx_ + yy_; }

  // e^T M e for a direction e.
  double quad(const Vec& e) const {
    if (dim_ == 1) return xx_ * e.x * e.x;
    return xx_ * e.x * e.x + 2.0 * xy_ * e.x * e.y + yy_ * e.y * e.y;
  }

  // u^T M v for a pair of directions.
  double bilinear(const Vec& u, const Vec& v) const {
    if (dim_ == 1) return xx_ * u.x * v.x;
    return xx_ * u.x * v.x + xy_ * (u.x * v.y + u.y * v.x) + yy_ * u.y * v.y;
  }

  // Frobenius inner product tr(A M).
  double inner(const SymMatrix& m) const {
    if (dim_ == 1) return xx_ * m.xx_;
    return xx_ * m.xx_ + 2.0 * xy_ * m.xy_ + yy_ * m.yy_;
  }

  std::array<double, 2> eigenvalues() const {
    if (dim_ == 1) return {xx_, 0.0};
    const double mid = 0.5 * (xx_ + yy_);
    const double rad = std::sqrt(sqr(0.5 * (xx_ - yy_)) + sqr(xy_));
    return {mid - rad, mid + rad};
  }

  double trace_plus() const {  // sum of positive eigenvalues
    if (dim_ == 1) return pos_part(xx_);
    auto [lo, hi] = eigenvalues();
    return pos_part(lo) + pos_part(hi);
  }
  double trace_minus() const {  // sum of |negative eigenvalues|
    if (dim_ == 1) return neg_part(xx_);
    auto [lo, hi] = eigenvalues();
    return neg_part(lo) + neg_part(hi);
  }

  double frobenius() const {
    if (dim_ == 1) return std::abs(xx_);
    return std::sqrt(sqr(xx_) + 2.0 * sqr(xy_) + sqr(yy_));
  }

  bool positive_semidefinite(double tol = 1e-12) const {
    return eigenvalues()[0] >= -tol * (1.0 + frobenius());
  }

  SymMatrix operator+(const SymMatrix& o) const {
    if (dim_ != o.dim_) throw ShapeError("SymMatrix: dimension mismatch");
    return SymMatrix(dim_, xx_ + o.xx_, xy_ + o.xy_, yy_ + o.yy_);
  }
  SymMatrix operator-(const SymMatrix& o) const {
    if (dim_ != o.dim_) throw ShapeError("SymMatrix: dimension mismatch");
    return SymMatrix(dim_, xx_ - o.xx_, xy_ - o.xy_, yy_ - o.yy_);
  }
  SymMatrix operator*(double s) const { return SymMatrix(dim_, xx_ * s, xy_ * s, yy_ * s); }
  SymMatrix operator-() const { return *this * -1.0; }

 private:
  int dim_{2};
  double xx_{0.0}, xy_{0.0}, yy_{0.0};
};

// ---------------------------------------------------------------------------
// Orthonormal frame of lattice-compatible directions. Schemes take second
// differences along frame axes only, so every frame member must map to an
// exact lattice offset of the grid in use.
// ---------------------------------------------------------------------------
struct DirectionFrame {
  std::string label;
  std::vector<Vec> axes;
  // Lattice offset (in grid steps) realizing each axis; spacing multiplier
  // is the Euclidean length of the offset.
  std::vector<std::array<int, 2>> offsets;

  int dim() const { return axes.empty() ? 0 : axes.front().dim; }

  void validate(double tol = 1e-12) const {
    if (axes.empty()) throw InvalidOperatorError("frame has no axes");
    for (const auto& a : axes)
      if (std::abs(a.norm() - 1.0) > tol) throw InvalidOperatorError("frame axis not unit length");
    if (axes.size() == 2 && std::abs(axes[0].dot(axes[1])) > tol)
      throw InvalidOperatorError("frame axes not orthogonal");
  }
};

inline DirectionFrame axis_frame(int dim) {
  if (dim == 1) return DirectionFrame{"axis", {Vec::d1(1.0)}, {{{1, 0}}}};
  return DirectionFrame{"axes", {Vec::d2(1, 0), Vec::d2(0, 1)}, {{{1, 0}}, {{0, 1}}}};
}

inline DirectionFrame diagonal_frame() {
  const double s = 1.0 / std::sqrt(2.0);
  return DirectionFrame{"diagonals", {Vec::d2(s, s), Vec::d2(s, -s)}, {{{1, 1}}, {{1, -1}}}};
}

// Default frame family used by extremal (Pucci) stencils.
inline std::vector<DirectionFrame> standard_frames(int dim) {
  if (dim == 1) return {axis_frame(1)};
  return {axis_frame(2), diagonal_frame()};
}

}  // namespace homog
