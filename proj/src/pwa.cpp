#include "dlse/pwa.hpp"

#include <cmath>
#include <string>

#include "dlse/errors.hpp"

namespace dlse {

void validate(const PwaSpec& s) {
  if (!std::isfinite(s.slope) || !std::isfinite(s.intercept)) {
    throw data_error("pwa: non-finite affine part");
  }
  if (s.breakpoints.size() != s.jumps.size()) {
    throw data_error("pwa: breakpoints and jumps must have equal length");
  }
  for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
    if (!std::isfinite(s.breakpoints[i]) || !std::isfinite(s.jumps[i])) {
      throw data_error("pwa: non-finite breakpoint or jump");
    }
    if (s.jumps[i] == 0.0) throw data_error("pwa: zero derivative jump");
    if (i > 0 && !(s.breakpoints[i - 1] < s.breakpoints[i])) {
      throw data_error("pwa: breakpoints must be strictly increasing");
    }
  }
}

double eval_pwa(const PwaSpec& s, double x) {
  validate(s);
  if (!std::isfinite(x)) throw data_error("pwa: non-finite input");
  double y = s.slope * x + s.intercept;
  for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
    y += s.jumps[i] * std::max(0.0, x - s.breakpoints[i]);
  }
  return y;
}

namespace {

// Max-affine pieces of sum_{i in side} |jump_i| * max(0, x - gamma_i): the
// running-sum lines (a_i x - b_i) plus the zero piece active below the first
// breakpoint of the side.
LseParams side_component(const PwaSpec& s, double temperature, bool positive) {
  std::vector<double> slopes{0.0};
  std::vector<double> offsets{0.0};
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
    const bool take = positive ? s.jumps[i] > 0.0 : s.jumps[i] < 0.0;
    if (!take) continue;
    a += std::abs(s.jumps[i]);
    b += std::abs(s.jumps[i]) * s.breakpoints[i];
    slopes.push_back(a);
    offsets.push_back(-b);
  }
  LseParams p;
  p.temperature = temperature;
  p.alphas.resize(static_cast<Eigen::Index>(slopes.size()), 1);
  p.betas.resize(static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    p.alphas(static_cast<Eigen::Index>(k), 0) = slopes[k];
    p.betas(static_cast<Eigen::Index>(k)) = offsets[k];
  }
  return p;
}

}  // namespace

PwaDlse pwa_to_dlse(const PwaSpec& s, double temperature) {
  validate(s);
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw data_error("pwa: temperature must be positive and finite");
  }
  if (s.kinks() == 0) {
    throw data_error("pwa: need at least one breakpoint to smooth");
  }

  PwaDlse out;
  out.model.plus = side_component(s, temperature, true);
  out.model.minus = side_component(s, temperature, false);

  // Fold the global affine part into every plus term; exact, no added error.
  out.model.plus.alphas.array() += s.slope;
  out.model.plus.betas.array() += s.intercept;

  // Each side's smoothing overshoots its max-affine limit by at most
  // T*log(term count); the minus side's overshoot lifts the difference
  // from below, the plus side's from above.
  const auto count_plus = static_cast<double>(out.model.plus.terms());
  const auto count_minus = static_cast<double>(out.model.minus.terms());
  out.err_above = temperature * std::log(count_minus);
  out.err_below = temperature * std::log(count_plus);
  return out;
}

}  // namespace dlse
