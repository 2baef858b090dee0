#include "dlse/oracles.hpp"

#include <cmath>
#include <numbers>

#include "dlse/dca.hpp"
#include "dlse/errors.hpp"
#include "dlse/rng.hpp"

namespace dlse {

double example1_value(double x) {
  return x * x + std::sin(2.0 * std::numbers::pi * x);
}

Dataset gen_example1(int count, std::uint64_t seed) {
  if (count < 1) throw data_error("gen: sample count must be >= 1");
  Dataset d;
  d.points.resize(count, 1);
  d.targets.resize(count);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(-2.0, 2.0);
    d.points(i, 0) = x;
    d.targets(i) = example1_value(x);
  }
  return d;
}

double diet5_value(const Eigen::VectorXd& x) {
  if (x.size() != kDiet5Dim) throw data_error("diet5: expects 5 inputs");
  static const Eigen::VectorXd center = Eigen::VectorXd::Constant(kDiet5Dim, 37.0);
  static const Eigen::VectorXd u = (Eigen::VectorXd(kDiet5Dim) << 2.0, 1.0, -1.0, 0.5, -1.5).finished();
  static const Eigen::VectorXd w = (Eigen::VectorXd(kDiet5Dim) << -1.0, 2.0, 0.5, -2.0, 1.0).finished();
  return 160.0 + (x - center).squaredNorm() / 40.0 +
         25.0 * std::sin(u.dot(x) / 30.0) + 10.0 * std::cos(w.dot(x) / 22.0);
}

Dataset gen_diet5(int count, std::uint64_t seed) {
  if (count < 1) throw data_error("gen: sample count must be >= 1");
  Dataset d;
  d.points.resize(count, kDiet5Dim);
  d.targets.resize(count);
  Rng rng(seed);
  const FeasibleSet simplex = ScaledSimplex{kDiet5Total, kDiet5Dim};
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd x = random_feasible(simplex, rng);
    d.points.row(i) = x.transpose();
    d.targets(i) = diet5_value(x);
  }
  return d;
}

}  // namespace dlse
