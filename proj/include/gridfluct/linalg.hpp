#pragma once

#include <Eigen/Dense>

namespace gridfluct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry; 0 for empty matrices.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace gridfluct
