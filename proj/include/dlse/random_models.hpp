#pragma once

#include "dlse/lse.hpp"
#include "dlse/rng.hpp"

namespace dlse {

// Seeded random instances for property checks and tests.
struct RandomModelSpec {
  Eigen::Index dim = 2;
  Eigen::Index terms = 4;
  double temperature = 0.25;
  double alpha_scale = 2.0;  // entries uniform in [-scale, scale]
  double beta_scale = 1.0;
};

LseParams random_lse(Rng& rng, const RandomModelSpec& spec);
DlseModel random_dlse(Rng& rng, const RandomModelSpec& spec);

}  // namespace dlse
