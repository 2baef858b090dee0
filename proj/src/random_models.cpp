#include "dlse/random_models.hpp"

namespace dlse {

LseParams random_lse(Rng& rng, const RandomModelSpec& spec) {
  LseParams p;
  p.temperature = spec.temperature;
  p.alphas.resize(spec.terms, spec.dim);
  p.betas.resize(spec.terms);
  for (Eigen::Index k = 0; k < spec.terms; ++k) {
    for (Eigen::Index j = 0; j < spec.dim; ++j) {
      p.alphas(k, j) = rng.uniform(-spec.alpha_scale, spec.alpha_scale);
    }
    p.betas(k) = rng.uniform(-spec.beta_scale, spec.beta_scale);
  }
  return p;
}

DlseModel random_dlse(Rng& rng, const RandomModelSpec& spec) {
  DlseModel m;
  m.plus = random_lse(rng, spec);
  m.minus = random_lse(rng, spec);
  return m;
}

}  // namespace dlse
