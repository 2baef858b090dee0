#include "dlse/gpos.hpp"

#include <cmath>

#include "dlse/errors.hpp"

namespace dlse {

void validate(const GposParams& g) {
  if (!(g.temperature > 0.0) || !std::isfinite(g.temperature)) {
    throw data_error("gpos: temperature must be positive and finite");
  }
  if (g.exponents.rows() < 1 || g.exponents.cols() < 1) {
    throw data_error("gpos: need at least one monomial and one variable");
  }
  if (g.coeffs.size() != g.exponents.rows()) {
    throw data_error("gpos: coefficient count does not match monomial count");
  }
  if (!g.coeffs.allFinite() || !g.exponents.allFinite()) {
    throw data_error("gpos: non-finite parameters");
  }
  if ((g.coeffs.array() <= 0.0).any()) {
    throw data_error("gpos: coefficients must be strictly positive");
  }
}

GposParams lse_to_gpos(const LseParams& p) {
  validate(p);
  GposParams g;
  g.temperature = p.temperature;
  g.exponents = p.alphas;
  g.coeffs = p.betas.array().exp();
  if (!g.coeffs.allFinite()) {
    throw numeric_error("gpos: offset exponentiation overflowed");
  }
  return g;
}

LseParams gpos_to_lse(const GposParams& g) {
  validate(g);
  LseParams p;
  p.temperature = g.temperature;
  p.alphas = g.exponents;
  p.betas = g.coeffs.array().log();
  return p;
}

double eval_gpos(const GposParams& g, const Eigen::VectorXd& z) {
  validate(g);
  if (z.size() != g.dim()) throw data_error("gpos: input dimension mismatch");
  if (!z.allFinite() || (z.array() <= 0.0).any()) {
    throw data_error("gpos: input must be strictly positive and finite");
  }
  const double value = std::exp(eval_lse(gpos_to_lse(g), z.array().log()));
  if (!std::isfinite(value) || value <= 0.0) {
    throw numeric_error("gpos: evaluation left the positive double range");
  }
  return value;
}

double relative_error(double reference, double approx) {
  if (!std::isfinite(reference) || !std::isfinite(approx) ||
      reference <= 0.0 || approx <= 0.0) {
    throw data_error("relative_error: arguments must be positive and finite");
  }
  return std::abs(reference - approx) / std::min(reference, approx);
}

PositiveFit fit_positive(const Dataset& positive_data, const TrainConfig& cfg) {
  validate(positive_data);
  if ((positive_data.points.array() <= 0.0).any() ||
      (positive_data.targets.array() <= 0.0).any()) {
    throw data_error("fit_positive: data must be strictly positive");
  }
  Dataset logd;
  logd.points = positive_data.points.array().log();
  logd.targets = positive_data.targets.array().log();
  PositiveFit out;
  out.report = fit(logd, cfg);
  out.numerator = lse_to_gpos(out.report.model.plus);
  out.denominator = lse_to_gpos(out.report.model.minus);
  return out;
}

}  // namespace dlse
