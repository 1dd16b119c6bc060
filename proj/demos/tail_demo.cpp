// Demo: half-plane boundary-layer tails for oscillating wall data.
//
// Solves the stationary-wall cell problem on {y2 >= 0} with wall data
// sin(2 pi y1) for three operators (extremal upper, linear, extremal lower)
// and prints the probed averages at increasing depth together with the final
// tail estimate.  The linear tail vanishes by symmetry; the extremal tails
// bracket it with a strictly positive gap.

#include <cstdio>

#include "homog/cell.hpp"

using namespace homog;

int main() {
  CellConfig cc;
  cc.h_target = 1.0 / 32;
  cc.probe_depths = {0.5, 1.0, 1.5, 2.0};
  cc.depth_L = 4.5;
  cc.relax_time = 8.0;
  cc.stop_tol = 1e-7;
  cc.min_time = 3.0;

  struct Row {
    const char* label;
    EllipticOperator op;
  };
  const Row rows[] = {
      {"extremal-upper", EllipticOperator::pucci_plus(2, 1.0, 2.0)},
      {"heat", EllipticOperator::heat(2)},
      {"extremal-lower", EllipticOperator::pucci_minus(2, 1.0, 2.0)},
  };

  std::printf("operator,depth,oscillation\n");
  double upper = 0.0, lower = 0.0;
  for (const auto& r : rows) {
    HalfPlaneProblem p;
    p.nu = make_direction(Vec::d2(0.0, 1.0));
    p.op = r.op;
    p.bdata = sin_mode(1.0, kTwoPi);
    const TailResult tail = halfplane_tail(p, cc);
    for (const auto& probe : tail.osc_table)
      std::printf("%s,%g,%.3e\n", r.label, probe.depth, probe.osc);
    std::printf("# %-14s tail = %+.6f  (bracket %.2e, decay exponent %.2f)\n",
                r.label, tail.value, tail.bracket(), tail.fitted_decay);
    if (r.label[0] == 'e' && tail.value > 0) upper = tail.value;
    if (r.label[0] == 'e' && tail.value < 0) lower = tail.value;
  }
  std::printf("# convexity gap = %.6f\n", upper - lower);
  return 0;
}
