#pragma once

#include <Eigen/Dense>

namespace jumpresp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point in the K-dimensional state space.
using StateVector = Eigen::VectorXd;

}  // namespace jumpresp
