#pragma once

#include <Eigen/Dense>

#include "mbfpca/kernel.hpp"
#include "mbfpca/stiefel.hpp"

namespace mbfpca {

/// Sample covariance of a (standardized) data matrix, 1/(n-1) normalization.
class Covariance {
 public:
  /// Validates symmetry (1e-12, relative to the largest entry) and numerical
  /// PSD (eigenvalues >= -1e-10).
  explicit Covariance(Eigen::MatrixXd matrix);

  /// Covariance of the rows of `data` about their column means.
  static Covariance from_data(const Eigen::MatrixXd& data);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double trace() const { return trace_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Eigen::MatrixXd matrix_;
  double trace_;
};

/// f(V) = -tr(V^T Sigma V) subject to h(V) = MMD^2(data0 V, data1 V).
struct PenaltyProblem {
  Covariance covariance;
  Eigen::MatrixXd data0;
  Eigen::MatrixXd data1;
  KernelConfig kernel;

  PenaltyProblem(Covariance covariance, Eigen::MatrixXd data0, Eigen::MatrixXd data1,
                 KernelConfig kernel);

  Eigen::Index p() const { return covariance.dim(); }
};

double objective_f(const PenaltyProblem& prob, const StiefelPoint& v);
double objective_f(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings);

/// -2 Sigma V.
Eigen::MatrixXd objective_f_gradient(const PenaltyProblem& prob, const StiefelPoint& v);
Eigen::MatrixXd objective_f_gradient(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings);

double constraint_h(const PenaltyProblem& prob, const StiefelPoint& v);
double constraint_h(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings);

/// Q(V, rho) = f(V) + rho h(V). Throws InvalidArgument unless rho > 0.
double penalty_Q(const PenaltyProblem& prob, const StiefelPoint& v, double rho);

/// Everything the solver needs at one point, sharing the kernel matrices.
struct PenaltyEvaluation {
  double f;
  double h;
  double q;
  Eigen::MatrixXd euclidean_gradient;
};

PenaltyEvaluation evaluate_penalty(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings,
                                   double rho);

/// Tangent projection of grad f + rho grad h.
TangentVector penalty_riemannian_gradient(const PenaltyProblem& prob, const StiefelPoint& v,
                                          double rho);

}  // namespace mbfpca
