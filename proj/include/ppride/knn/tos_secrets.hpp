#pragma once

#include <Eigen/Dense>

namespace ppride::knn {

/// The organizing server's masking matrices. X and Y mask NRS rider and driver
/// indices (m x m); W and Z mask TRS rider and driver indices (n x n).
/// Inverses are kept alongside so neither side recomputes them.
struct TosSecrets {
  Eigen::MatrixXd x, y, w, z;
  Eigen::MatrixXd x_inv, y_inv, w_inv, z_inv;

  std::size_t nrs_dim() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t trs_dim() const { return static_cast<std::size_t>(w.rows()); }
};

}  // namespace ppride::knn
