#include "dlse/dca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlse/errors.hpp"

namespace dlse {

void validate(const FeasibleSet& s) {
  if (const auto* box = std::get_if<Box>(&s)) {
    if (box->lower.size() != box->upper.size() || box->lower.size() < 1) {
      throw data_error("box: bound vectors must share a positive dimension");
    }
    if (!box->lower.allFinite() || !box->upper.allFinite()) {
      throw data_error("box: non-finite bounds");
    }
    if ((box->lower.array() > box->upper.array()).any()) {
      throw data_error("box: lower bound exceeds upper bound");
    }
  } else {
    const auto& simplex = std::get<ScaledSimplex>(s);
    if (!(simplex.total > 0.0) || !std::isfinite(simplex.total)) {
      throw data_error("simplex: total must be positive and finite");
    }
    if (simplex.dim < 1) throw data_error("simplex: dimension must be >= 1");
  }
}

Eigen::Index set_dim(const FeasibleSet& s) {
  if (const auto* box = std::get_if<Box>(&s)) return box->lower.size();
  return std::get<ScaledSimplex>(s).dim;
}

Eigen::VectorXd project(const FeasibleSet& s, const Eigen::VectorXd& x) {
  validate(s);
  if (x.size() != set_dim(s)) throw data_error("project: dimension mismatch");
  if (!x.allFinite()) throw data_error("project: non-finite point");
  if (const auto* box = std::get_if<Box>(&s)) {
    return x.cwiseMax(box->lower).cwiseMin(box->upper);
  }
  const auto& simplex = std::get<ScaledSimplex>(s);
  // Sort-and-threshold simplex projection.
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate =
        (cumulative - simplex.total) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) threshold = candidate;
  }
  return (x.array() - threshold).max(0.0);
}

bool contains(const FeasibleSet& s, const Eigen::VectorXd& x, double tol) {
  validate(s);
  if (x.size() != set_dim(s) || !x.allFinite()) return false;
  if (const auto* box = std::get_if<Box>(&s)) {
    return (x.array() >= box->lower.array() - tol).all() &&
           (x.array() <= box->upper.array() + tol).all();
  }
  const auto& simplex = std::get<ScaledSimplex>(s);
  return (x.array() >= -tol).all() &&
         std::abs(x.sum() - simplex.total) <= tol * std::max(1.0, simplex.total);
}

Eigen::VectorXd default_start(const FeasibleSet& s) {
  validate(s);
  if (const auto* box = std::get_if<Box>(&s)) {
    return 0.5 * (box->lower + box->upper);
  }
  const auto& simplex = std::get<ScaledSimplex>(s);
  return Eigen::VectorXd::Constant(
      simplex.dim, simplex.total / static_cast<double>(simplex.dim));
}

Eigen::VectorXd random_feasible(const FeasibleSet& s, Rng& rng) {
  validate(s);
  if (const auto* box = std::get_if<Box>(&s)) {
    Eigen::VectorXd x(box->lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) = rng.uniform(box->lower(i), box->upper(i));
    }
    return x;
  }
  const auto& simplex = std::get<ScaledSimplex>(s);
  Eigen::VectorXd e(simplex.dim);
  double sum = 0.0;
  while (sum <= 0.0) {
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      e(i) = -std::log(1.0 - rng.uniform01());
    }
    sum = e.sum();
  }
  return simplex.total * e / sum;
}

Eigen::VectorXd linearization_point(const LseParams& h,
                                    const Eigen::VectorXd& chi) {
  return grad_x_lse(h, chi);
}

InnerSolveResult solve_inner(const LseParams& g, const Eigen::VectorXd& v,
                             const FeasibleSet& s, const DcaConfig& cfg,
                             const Eigen::VectorXd& warm_start) {
  validate(g);
  validate(s);
  if (v.size() != g.dim() || warm_start.size() != g.dim() ||
      set_dim(s) != g.dim()) {
    throw data_error("solve_inner: dimension mismatch");
  }
  constexpr double kArmijo = 1e-4;

  auto objective = [&](const Eigen::VectorXd& x) {
    return eval_lse(g, x) - x.dot(v);
  };

  InnerSolveResult result;
  result.x = project(s, warm_start);
  double f = objective(result.x);
  double step = 1.0;
  result.converged = false;
  while (result.iterations < cfg.inner_max_iter) {
    const Eigen::VectorXd grad = grad_x_lse(g, result.x) - v;
    const double residual = (result.x - project(s, result.x - grad)).norm();
    if (residual <= cfg.inner_tol) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    // Backtracking from a step that grows again after each success.
    step = std::min(step * 2.0, 1e8);
    bool moved = false;
    while (step > 1e-18) {
      const Eigen::VectorXd candidate = project(s, result.x - step * grad);
      const double f_cand = objective(candidate);
      // <grad, candidate - x> <= 0 by the projection property, so accepted
      // candidates never increase the objective.
      if (f_cand <= f + kArmijo * grad.dot(candidate - result.x)) {
        result.x = candidate;
        f = f_cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // step vanished; residual already near floor
  }
  return result;
}

DcaResult dlsea(const DlseModel& m, const FeasibleSet& s, const DcaConfig& cfg) {
  validate(m);
  validate(s);
  if (set_dim(s) != m.dim()) throw data_error("dlsea: dimension mismatch");
  if (cfg.max_outer < 1) throw data_error("dlsea: max_outer must be >= 1");

  Eigen::VectorXd chi = cfg.start ? *cfg.start : default_start(s);
  if (!contains(s, chi, 1e-9)) {
    throw data_error("dlsea: start point is not feasible");
  }

  DcaResult result;
  auto record = [&](const Eigen::VectorXd& x) {
    const double value = eval_dlse(m, x);
    if (!std::isfinite(value)) {
      throw numeric_error("dlsea: non-finite objective at iteration " +
                          std::to_string(result.trace.outer_iterations));
    }
    result.trace.iterates.push_back(x);
    result.trace.objectives.push_back(value);
    return value;
  };
  record(chi);

  result.trace.termination = "max_outer";
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    const Eigen::VectorXd v = linearization_point(m.minus, chi);
    const InnerSolveResult inner = solve_inner(m.plus, v, s, cfg, chi);
    result.trace.inner_iterations.push_back(inner.iterations);
    result.trace.inner_converged.push_back(inner.converged);
    result.trace.outer_iterations = outer + 1;
    record(inner.x);
    const double rel_step = (inner.x - chi).norm() / (1.0 + chi.norm());
    chi = inner.x;
    if (rel_step <= cfg.tol) {
      result.trace.termination = "tol";
      break;
    }
  }

  result.x = chi;
  result.objective = result.trace.objectives.back();
  return result;
}

DcaResult multistart(const DlseModel& m, const FeasibleSet& s,
                     const DcaConfig& cfg, int starts, std::uint64_t seed) {
  if (starts < 1) throw data_error("multistart: need at least one start");
  Rng rng(seed);
  DcaResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int i = 0; i < starts; ++i) {
    DcaConfig run = cfg;
    if (i > 0) run.start = random_feasible(s, rng);
    const DcaResult result = dlsea(m, s, run);
    if (result.objective < best.objective) best = result;
  }
  return best;
}

}  // namespace dlse
