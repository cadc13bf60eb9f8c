#include "mbfpca/stiefel.hpp"

#include <string>

#include "mbfpca/errors.hpp"

namespace mbfpca {

namespace {

void require_same_shape(const StiefelPoint& v, const Eigen::MatrixXd& g, const char* op) {
  if (g.rows() != v.p() || g.cols() != v.d()) {
    throw InvalidArgument(std::string(op) + ": expected a " + std::to_string(v.p()) + "x" +
                          std::to_string(v.d()) + " matrix, got " + std::to_string(g.rows()) +
                          "x" + std::to_string(g.cols()));
  }
}

// Relative to the largest column norm; below this R is treated as singular.
constexpr double kRankTolerance = 1e-12;

}  // namespace

StiefelPoint::StiefelPoint(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.cols() < 1 || matrix_.rows() <= matrix_.cols()) {
    throw InvalidArgument("StiefelPoint: need p > d >= 1, got " + std::to_string(matrix_.rows()) +
                          "x" + std::to_string(matrix_.cols()));
  }
  if (!matrix_.allFinite()) {
    throw InvalidArgument("StiefelPoint: non-finite entries");
  }
  const double err = orthonormality_error();
  if (!(err <= kStiefelTolerance)) {
    throw InvalidArgument("StiefelPoint: columns not orthonormal (||V^T V - I||_F = " +
                          std::to_string(err) + ")");
  }
}

StiefelPoint StiefelPoint::from_qr(const Eigen::MatrixXd& matrix) {
  const Eigen::Index p = matrix.rows();
  const Eigen::Index d = matrix.cols();
  if (d < 1 || p <= d) {
    throw InvalidArgument("from_qr: need p > d >= 1");
  }
  if (!matrix.allFinite()) {
    throw RetractionFailure("from_qr: non-finite matrix");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
  const auto r_diag = qr.matrixQR().diagonal();
  const double scale = matrix.colwise().norm().maxCoeff();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(std::abs(r_diag(j)) > kRankTolerance * scale)) {
      throw RetractionFailure("from_qr: rank-deficient matrix (column " + std::to_string(j) + ")");
    }
    if (r_diag(j) < 0) q.col(j) = -q.col(j);
  }
  return StiefelPoint(std::move(q), Unchecked{});
}

StiefelPoint StiefelPoint::identity(Eigen::Index p, Eigen::Index d) {
  return StiefelPoint(Eigen::MatrixXd::Identity(p, d));
}

double StiefelPoint::orthonormality_error() const {
  const Eigen::Index d = matrix_.cols();
  return (matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(d, d)).norm();
}

double TangentVector::tangency_residual(const StiefelPoint& base) const {
  return sym(base.matrix().transpose() * matrix).norm();
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

TangentVector tangent_project(const StiefelPoint& v, const Eigen::MatrixXd& g) {
  require_same_shape(v, g, "tangent_project");
  const Eigen::MatrixXd& vm = v.matrix();
  return TangentVector{g - vm * sym(vm.transpose() * g)};
}

StiefelPoint retract(const StiefelPoint& v, const TangentVector& xi, double t) {
  require_same_shape(v, xi.matrix, "retract");
  if (!std::isfinite(t)) throw InvalidArgument("retract: non-finite step");
  if (t == 0.0) return v;
  return StiefelPoint::from_qr(v.matrix() + t * xi.matrix);
}

TangentVector riemannian_gradient(const StiefelPoint& v, const Eigen::MatrixXd& euclidean_grad) {
  return tangent_project(v, euclidean_grad);
}

}  // namespace mbfpca
