#pragma once

#include <vector>

#include "dlse/lse.hpp"

namespace dlse {

// Continuous piecewise-affine function of one variable in hinge form:
//   phi(x) = slope*x + intercept + sum_i jumps[i] * max(0, x - breakpoints[i])
// jumps[i] is the derivative jump at breakpoints[i] and must be nonzero;
// breakpoints are strictly increasing. Zero breakpoints means plain affine.
struct PwaSpec {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> jumps;

  std::size_t kinks() const { return breakpoints.size(); }
};

void validate(const PwaSpec& s);

double eval_pwa(const PwaSpec& s, double x);

// Smoothed model with a certified uniform sandwich:
//   eval_dlse(x) - err_below <= eval_pwa(x) <= eval_dlse(x) + err_above
// for every real x. Positive jumps populate the plus component, negative
// jumps the minus component; each side carries running-sum affine pieces
// plus the zero piece that the hinge form implies below its first
// breakpoint, so the slack on each side is T*log(1 + #jumps on the side
// opposing it). The global affine part folds into the plus component
// exactly.
struct PwaDlse {
  DlseModel model;
  double err_above = 0.0;
  double err_below = 0.0;
};

// Requires at least one breakpoint and T > 0.
PwaDlse pwa_to_dlse(const PwaSpec& s, double temperature);

}  // namespace dlse
