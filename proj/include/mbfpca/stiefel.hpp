#pragma once

#include <Eigen/Dense>

namespace mbfpca {

/// Orthonormality tolerance enforced when a point is constructed.
inline constexpr double kStiefelTolerance = 1e-10;
/// Tolerance on ||sym(V^T xi)||_F for a tangent vector.
inline constexpr double kTangencyTolerance = 1e-8;

/// A p x d matrix with orthonormal columns, p > d >= 1.
class StiefelPoint {
 public:
  /// Validates p > d >= 1, finiteness and ||V^T V - I||_F <= 1e-10.
  /// Throws InvalidArgument otherwise.
  explicit StiefelPoint(Eigen::MatrixXd matrix);

  /// Orthonormalizes an arbitrary full-rank p x d matrix by thin QR with a
  /// positive diagonal on R. Throws RetractionFailure on rank deficiency.
  static StiefelPoint from_qr(const Eigen::MatrixXd& matrix);

  /// First d columns of the p x p identity.
  static StiefelPoint identity(Eigen::Index p, Eigen::Index d);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::Index p() const { return matrix_.rows(); }
  Eigen::Index d() const { return matrix_.cols(); }

  /// ||V^T V - I||_F.
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  StiefelPoint(Eigen::MatrixXd matrix, Unchecked) : matrix_(std::move(matrix)) {}

  Eigen::MatrixXd matrix_;
};

/// A p x d matrix tangent to St(p, d) at the point it was projected at.
struct TangentVector {
  Eigen::MatrixXd matrix;

  /// ||sym(V^T xi)||_F at the given base point.
  double tangency_residual(const StiefelPoint& base) const;
};

/// sym(A) = (A + A^T) / 2.
Eigen::MatrixXd sym(const Eigen::MatrixXd& a);

/// Orthogonal projection onto T_V St(p, d): G - V sym(V^T G).
TangentVector tangent_project(const StiefelPoint& v, const Eigen::MatrixXd& g);

/// QR retraction qf(V + t xi). Returns V unchanged for t == 0.
/// Throws RetractionFailure if V + t xi is rank deficient.
StiefelPoint retract(const StiefelPoint& v, const TangentVector& xi, double t);

/// Riemannian gradient of a function restricted to St(p, d) from its
/// Euclidean gradient.
TangentVector riemannian_gradient(const StiefelPoint& v, const Eigen::MatrixXd& euclidean_grad);

}  // namespace mbfpca
