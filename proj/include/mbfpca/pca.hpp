#pragma once

#include <Eigen/Dense>

#include "mbfpca/objective.hpp"
#include "mbfpca/stiefel.hpp"

namespace mbfpca {

/// Top-d eigenvectors of the covariance, ordered by decreasing eigenvalue.
/// Each column's sign is fixed so its largest-magnitude entry is positive.
StiefelPoint vanilla_pca(const Covariance& cov, Eigen::Index d);

/// Eigenvalues of the covariance in decreasing order.
Eigen::VectorXd eigenvalues_descending(const Covariance& cov);

}  // namespace mbfpca
