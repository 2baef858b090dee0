#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlse/dataset.hpp"
#include "dlse/lse.hpp"

namespace dlse {

struct TrainConfig {
  int terms = 10;                        // K per component
  std::optional<double> temperature;     // empty = 2 / target range
  int max_epochs = 500;
  double damping_init = 1e-2;
  double damping_up = 4.0;               // > 1, applied on rejected steps
  double damping_down = 0.1;             // < 1, applied on accepted steps
  double tol_loss = 1e-12;
  double holdout_fraction = 0.0;         // in [0, 1)
  std::uint64_t rng_seed = 0;
  bool train_temperature = false;        // adds a finite-difference column
  std::optional<DlseModel> init;         // overrides init_params when set

  // Warm-start continuation: stages - 1 preliminary solves at temperatures
  // T * 2^(stages-1), .., T * 2, each seeding the next, before the reported
  // solve at T. Raw starts at the target temperature get trapped in poor
  // local minima; the smoothed problems hand over much better basins.
  // 1 disables continuation; ignored when an explicit init is given.
  int anneal_stages = 4;
};

struct TrainReport {
  DlseModel model;
  std::vector<double> train_loss;        // MSE after each epoch
  double final_train_loss = 0.0;
  std::optional<double> holdout_loss;
  int epochs = 0;
  std::string termination;               // tol_loss | max_epochs | damping_limit
};

// 2 / (max target - min target). Throws data_error for constant targets
// (caller must then supply the temperature explicitly).
double default_temperature(const Dataset& d);

// Partial derivatives of eval_dlse(m, x) with respect to every parameter.
// Rows of dalpha/dgamma are the per-term exponent-vector gradients; dbeta
// and ddelta are the offset gradients. dbeta sums to 1 and ddelta to -1
// exactly up to rounding (softmax normalization).
struct ParamGradients {
  Eigen::MatrixXd dalpha;  // K+ x n, row i = w_i * x
  Eigen::VectorXd dbeta;   // K+,    entry i = w_i
  Eigen::MatrixXd dgamma;  // K- x n, row j = -v_j * x
  Eigen::VectorXd ddelta;  // K-,    entry j = -v_j
};
ParamGradients param_gradients(const DlseModel& m, const Eigen::VectorXd& x);

// Deterministic given rng_seed: exponent vectors uniform in [-s, s] with
// s = (target spread) / (max per-coordinate input spread); offsets chosen so
// every affine term vanishes at the data centroid. Throws data_error when
// all inputs coincide.
DlseModel init_params(const Dataset& d, const TrainConfig& cfg);

// Damped Gauss-Newton (Levenberg-Marquardt) least squares on the mean
// squared error. Accepted steps never increase the training loss; damping
// beyond 1e12 terminates.
TrainReport fit(const Dataset& d, const TrainConfig& cfg);

}  // namespace dlse
