#include "mbfpca/pca.hpp"

#include <string>

#include "mbfpca/errors.hpp"

namespace mbfpca {

StiefelPoint vanilla_pca(const Covariance& cov, Eigen::Index d) {
  const Eigen::Index p = cov.dim();
  if (d < 1 || d >= p) {
    throw InvalidArgument("vanilla_pca: need 1 <= d < p, got d=" + std::to_string(d) +
                          ", p=" + std::to_string(p));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.matrix());
  // Eigen returns ascending eigenvalues.
  Eigen::MatrixXd v(p, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd col = eig.eigenvectors().col(p - 1 - j);
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0) col = -col;
    v.col(j) = col;
  }
  return StiefelPoint::from_qr(v);
}

Eigen::VectorXd eigenvalues_descending(const Covariance& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.matrix(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

}  // namespace mbfpca
