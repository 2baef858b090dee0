#include "dlse/lse.hpp"

#include <cmath>
#include <string>

#include "dlse/errors.hpp"

namespace dlse {
namespace {

// Largest accepted |<alpha,x> + beta|. Beyond this the scaled exponents lose
// enough precision that gradients would be garbage; reject instead of clamp.
constexpr double kMaxAffineMagnitude = 1e8;

void check_input(const LseParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.dim()) {
    throw data_error("lse: input has dimension " + std::to_string(x.size()) +
                     ", parameters expect " + std::to_string(p.dim()));
  }
  if (!x.allFinite()) throw data_error("lse: non-finite input");
}

}  // namespace

void validate(const LseParams& p) {
  if (!(p.temperature > 0.0) || !std::isfinite(p.temperature)) {
    throw data_error("lse: temperature must be positive and finite");
  }
  if (p.alphas.rows() < 1 || p.alphas.cols() < 1) {
    throw data_error("lse: need at least one term and one input dimension");
  }
  if (p.betas.size() != p.alphas.rows()) {
    throw data_error("lse: offsets count " + std::to_string(p.betas.size()) +
                     " does not match term count " +
                     std::to_string(p.alphas.rows()));
  }
  if (!p.alphas.allFinite() || !p.betas.allFinite()) {
    throw data_error("lse: non-finite parameters");
  }
}

void validate(const DlseModel& m) {
  validate(m.plus);
  validate(m.minus);
  if (m.plus.dim() != m.minus.dim()) {
    throw data_error("dlse: components disagree on input dimension");
  }
  if (m.plus.temperature != m.minus.temperature) {
    throw data_error("dlse: components must share the temperature");
  }
}

Eigen::VectorXd affine_terms(const LseParams& p, const Eigen::VectorXd& x) {
  check_input(p, x);
  Eigen::VectorXd z = p.alphas * x + p.betas;
  if (!z.allFinite()) throw numeric_error("lse: non-finite affine term");
  if (z.array().abs().maxCoeff() > kMaxAffineMagnitude) {
    throw numeric_error("lse: affine term exceeds 1e8 in magnitude");
  }
  return z;
}

double eval_lse(const LseParams& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = affine_terms(p, x);
  const double t = p.temperature;
  const double m = z.maxCoeff() / t;
  const double s = ((z.array() / t) - m).exp().sum();
  return t * (m + std::log(s));
}

Eigen::VectorXd softmax_weights(const LseParams& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = affine_terms(p, x);
  const double t = p.temperature;
  const double m = z.maxCoeff() / t;
  Eigen::VectorXd w = ((z.array() / t) - m).exp();
  return w / w.sum();
}

Eigen::VectorXd grad_x_lse(const LseParams& p, const Eigen::VectorXd& x) {
  return p.alphas.transpose() * softmax_weights(p, x);
}

double eval_dlse(const DlseModel& m, const Eigen::VectorXd& x) {
  return eval_lse(m.plus, x) - eval_lse(m.minus, x);
}

Eigen::VectorXd grad_x_dlse(const DlseModel& m, const Eigen::VectorXd& x) {
  return grad_x_lse(m.plus, x) - grad_x_lse(m.minus, x);
}

LseParams rescale_to_unit_T(const LseParams& p) {
  validate(p);
  return LseParams{1.0, p.alphas, p.betas / p.temperature};
}

LseParams rescale_from_unit_T(const LseParams& unit, double temperature) {
  validate(unit);
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw data_error("rescale: temperature must be positive and finite");
  }
  return LseParams{temperature, unit.alphas, unit.betas * temperature};
}

double eval_tropical_limit(const LseParams& p, const Eigen::VectorXd& x) {
  return affine_terms(p, x).maxCoeff();
}

}  // namespace dlse
