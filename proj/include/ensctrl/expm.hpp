#pragma once

#include <Eigen/Core>

namespace ensctrl {

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant. Intended for the small dense blocks this project works with.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Integral of the exponential, int_0^t exp(a s) ds, via the augmented-block
/// exponential.
Eigen::MatrixXd expm_integral(const Eigen::MatrixXd& a, double t);

}  // namespace ensctrl
