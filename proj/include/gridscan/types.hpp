#pragma once

#include <Eigen/Dense>

#include <complex>

namespace gridscan {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

}  // namespace gridscan
