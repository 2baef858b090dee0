#pragma once

#include "dlse/dataset.hpp"
#include "dlse/lse.hpp"
#include "dlse/training.hpp"

namespace dlse {

// Generalized posynomial on the positive orthant, stored in log-offset form:
//   value(z) = exp(T * log sum_k exp((<exponents.row(k), log z> + log coeffs(k)) / T))
// i.e. the image of the matching log-sum-exp function under the log-log
// change of variables. coeffs(k) = exp(offset_k) of that function.
struct GposParams {
  double temperature = 1.0;
  Eigen::VectorXd coeffs;     // K, strictly positive
  Eigen::MatrixXd exponents;  // K x n

  Eigen::Index terms() const { return exponents.rows(); }
  Eigen::Index dim() const { return exponents.cols(); }
};

void validate(const GposParams& g);

// Log-log correspondence: eval_gpos(lse_to_gpos(p), z) == exp(eval_lse(p, log z)).
GposParams lse_to_gpos(const LseParams& p);
LseParams gpos_to_lse(const GposParams& g);

// Evaluated in the log domain and exponentiated once at the end; requires
// z > 0 componentwise.
double eval_gpos(const GposParams& g, const Eigen::VectorXd& z);

// Symmetric relative deviation |reference - approx| / min(reference, approx);
// both arguments must be strictly positive.
double relative_error(double reference, double approx);

// Fits positive data (z_i, w_i) by training on (log z_i, log w_i) and maps
// the two components back to posynomial form; the fitted predictor is
// numerator(z) / denominator(z).
struct PositiveFit {
  TrainReport report;        // model lives in the log domain
  GposParams numerator;      // from the plus component
  GposParams denominator;    // from the minus component
};
PositiveFit fit_positive(const Dataset& positive_data, const TrainConfig& cfg);

}  // namespace dlse
