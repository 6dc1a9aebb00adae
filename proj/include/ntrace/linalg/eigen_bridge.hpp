#pragma once

#include <Eigen/Core>

#include "ntrace/linalg/dense.hpp"

namespace ntrace::linalg {

Eigen::MatrixXcd to_eigen(const ApproxMatrix& m);
ApproxMatrix from_eigen(const Eigen::MatrixXcd& e);

}  // namespace ntrace::linalg
