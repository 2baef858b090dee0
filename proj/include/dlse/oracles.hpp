#pragma once

#include <cstdint>

#include "dlse/dataset.hpp"

namespace dlse {

// 1-d benchmark target x^2 + sin(2 pi x), sampled uniformly on [-2, 2].
double example1_value(double x);
Dataset gen_example1(int count, std::uint64_t seed);

// Synthetic 5-d benchmark on the scaled simplex {x >= 0, sum x = 185}:
// a quadratic bowl centered at the uniform point plus two sinusoidal ridges.
// Smooth, nonconvex, with a handful of local minima:
//   y(x) = 160 + ||x - c||^2 / 40 + 25 sin(<u, x> / 30) + 10 cos(<w, x> / 22)
//   c = (37, 37, 37, 37, 37)
//   u = (2, 1, -1, 0.5, -1.5)
//   w = (-1, 2, 0.5, -2, 1)
// Inputs are flat-Dirichlet draws scaled to the total.
inline constexpr double kDiet5Total = 185.0;
inline constexpr int kDiet5Dim = 5;
double diet5_value(const Eigen::VectorXd& x);
Dataset gen_diet5(int count, std::uint64_t seed);

}  // namespace dlse
