#pragma once

#include <Eigen/Core>

namespace dlse {

// One temperature-scaled log-sum-exp component:
//   f(x) = T * log(sum_k exp((<alphas.row(k), x> + betas(k)) / T))
// Smooth and convex for any T > 0.
struct LseParams {
  double temperature = 1.0;  // T > 0
  Eigen::MatrixXd alphas;    // K x n, row k is the exponent vector of term k
  Eigen::VectorXd betas;     // K offsets, unrestricted in sign

  Eigen::Index terms() const { return alphas.rows(); }
  Eigen::Index dim() const { return alphas.cols(); }
};

// Difference surrogate d(x) = plus(x) - minus(x). Both components share the
// temperature and input dimension; term counts may differ.
struct DlseModel {
  LseParams plus;
  LseParams minus;

  Eigen::Index dim() const { return plus.dim(); }
};

// Throw data_error on violated invariants (T <= 0, K < 1, shape mismatch,
// non-finite entries).
void validate(const LseParams& p);
void validate(const DlseModel& m);

// Affine term values z_k = <alphas.row(k), x> + betas(k). Rejects non-finite
// inputs and |z_k| > 1e8 (numeric_error) instead of silently clamping.
Eigen::VectorXd affine_terms(const LseParams& p, const Eigen::VectorXd& x);

// Computed in shifted form T*(m + log sum exp(z_k/T - m)) with m the max;
// no overflow regardless of term magnitudes.
double eval_lse(const LseParams& p, const Eigen::VectorXd& x);

// Softmax weights w_k proportional to exp(z_k / T); sum to 1.
Eigen::VectorXd softmax_weights(const LseParams& p, const Eigen::VectorXd& x);

// Gradient sum_k w_k * alphas.row(k); lies in the convex hull of the rows.
Eigen::VectorXd grad_x_lse(const LseParams& p, const Eigen::VectorXd& x);

double eval_dlse(const DlseModel& m, const Eigen::VectorXd& x);
Eigen::VectorXd grad_x_dlse(const DlseModel& m, const Eigen::VectorXd& x);

// Scaling identity: f_T^{(a,b)}(x) = T * f_1^{(a,b/T)}(x/T). Returns the
// unit-temperature parameters (T'=1, alphas unchanged, betas/T).
LseParams rescale_to_unit_T(const LseParams& p);

// Inverse of rescale_to_unit_T given the recorded temperature.
LseParams rescale_from_unit_T(const LseParams& unit, double temperature);

// Max-affine limit max_k z_k; satisfies
//   tropical(x) <= eval_lse(x) <= T*log(K) + tropical(x).
double eval_tropical_limit(const LseParams& p, const Eigen::VectorXd& x);

}  // namespace dlse
