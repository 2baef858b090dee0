#pragma once

#include <Eigen/Core>

namespace dlse {

// Supervised sample: points.row(i) -> targets(i).
struct Dataset {
  Eigen::MatrixXd points;   // m x n
  Eigen::VectorXd targets;  // m

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

void validate(const Dataset& d);

}  // namespace dlse
