#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dlse/lse.hpp"
#include "dlse/rng.hpp"

namespace dlse {

// Axis-aligned box {lower <= x <= upper}.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Scaled simplex {x >= 0, sum_j x_j = total}.
struct ScaledSimplex {
  double total = 1.0;
  Eigen::Index dim = 1;
};

using FeasibleSet = std::variant<Box, ScaledSimplex>;

void validate(const FeasibleSet& s);
Eigen::Index set_dim(const FeasibleSet& s);

// Euclidean projection: componentwise clamp for boxes, sort-and-threshold
// for the simplex.
Eigen::VectorXd project(const FeasibleSet& s, const Eigen::VectorXd& x);

bool contains(const FeasibleSet& s, const Eigen::VectorXd& x, double tol);

// Box midpoint / uniform simplex point.
Eigen::VectorXd default_start(const FeasibleSet& s);

// Uniform draw for boxes; flat Dirichlet (normalized exponentials) scaled to
// the total for the simplex.
Eigen::VectorXd random_feasible(const FeasibleSet& s, Rng& rng);

struct DcaConfig {
  double tol = 1e-6;        // relative-step stopping tolerance
  int max_outer = 200;
  double inner_tol = 1e-8;  // projected-gradient residual tolerance
  int inner_max_iter = 10000;
  std::optional<Eigen::VectorXd> start;  // empty = default_start
};

struct InnerSolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = true;
};

// Minimizes the convex F(x) = g(x) - <x, v> over s by projected gradient
// descent with Armijo backtracking, warm-started; never increases F.
InnerSolveResult solve_inner(const LseParams& g, const Eigen::VectorXd& v,
                             const FeasibleSet& s, const DcaConfig& cfg,
                             const Eigen::VectorXd& warm_start);

// Gradient of the concave part at the current iterate (the linearization
// used by the convex subproblem); identical to grad_x_lse.
Eigen::VectorXd linearization_point(const LseParams& h,
                                    const Eigen::VectorXd& chi);

struct DcaTrace {
  std::vector<Eigen::VectorXd> iterates;  // includes the start point
  std::vector<double> objectives;         // model value at each iterate
  std::vector<int> inner_iterations;      // per outer step
  std::vector<bool> inner_converged;      // per outer step
  int outer_iterations = 0;
  std::string termination;                // tol | max_outer
};

struct DcaResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  DcaTrace trace;
};

// Difference-of-convex iteration: linearize the subtracted component at the
// current iterate, solve the convex subproblem, repeat until the relative
// step ||x_next - x|| / (1 + ||x||) falls below tol. The objective sequence
// is nonincreasing up to the inner tolerance.
DcaResult dlsea(const DlseModel& m, const FeasibleSet& s, const DcaConfig& cfg);

// Runs dlsea from `starts` feasible points (the configured/default start
// first, then seeded draws) and returns the lowest-objective result.
DcaResult multistart(const DlseModel& m, const FeasibleSet& s,
                     const DcaConfig& cfg, int starts, std::uint64_t seed);

}  // namespace dlse
