#include "mbfpca/objective.hpp"

#include <cmath>
#include <string>

#include "mbfpca/errors.hpp"

namespace mbfpca {

namespace {

void check_loadings(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings, const char* op) {
  if (loadings.rows() != prob.p() || loadings.cols() < 1) {
    throw InvalidArgument(std::string(op) + ": loadings have " + std::to_string(loadings.rows()) +
                          " rows, covariance is " + std::to_string(prob.p()) + "x" +
                          std::to_string(prob.p()));
  }
}

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument("penalty weight rho must be positive and finite, got " +
                          std::to_string(rho));
  }
}

}  // namespace

Covariance::Covariance(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
    throw InvalidArgument("Covariance: matrix must be square and non-empty");
  }
  if (!matrix_.allFinite()) throw InvalidArgument("Covariance: non-finite entries");
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("Covariance: matrix is not symmetric");
  }
  matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InvalidArgument("Covariance: matrix is not positive semi-definite");
  }
  trace_ = matrix_.trace();
}

Covariance Covariance::from_data(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw InvalidArgument("Covariance: need at least two rows");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  return Covariance(0.5 * (cov + cov.transpose()));
}

PenaltyProblem::PenaltyProblem(Covariance covariance_, Eigen::MatrixXd data0_,
                               Eigen::MatrixXd data1_, KernelConfig kernel_)
    : covariance(std::move(covariance_)),
      data0(std::move(data0_)),
      data1(std::move(data1_)),
      kernel(kernel_) {
  kernel.validate();
  if (data0.cols() != p() || data1.cols() != p()) {
    throw InvalidArgument("PenaltyProblem: group data must have " + std::to_string(p()) +
                          " columns");
  }
  if (data0.rows() < 1 || data1.rows() < 1) {
    throw InvalidArgument("PenaltyProblem: both groups must be non-empty");
  }
}

double objective_f(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings) {
  check_loadings(prob, loadings, "objective_f");
  return -(loadings.transpose() * prob.covariance.matrix() * loadings).trace();
}

double objective_f(const PenaltyProblem& prob, const StiefelPoint& v) {
  return objective_f(prob, v.matrix());
}

Eigen::MatrixXd objective_f_gradient(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings) {
  check_loadings(prob, loadings, "objective_f_gradient");
  return -2.0 * prob.covariance.matrix() * loadings;
}

Eigen::MatrixXd objective_f_gradient(const PenaltyProblem& prob, const StiefelPoint& v) {
  return objective_f_gradient(prob, v.matrix());
}

double constraint_h(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings) {
  check_loadings(prob, loadings, "constraint_h");
  return mmd_squared(GroupedSamples{prob.data0 * loadings, prob.data1 * loadings}, prob.kernel);
}

double constraint_h(const PenaltyProblem& prob, const StiefelPoint& v) {
  return constraint_h(prob, v.matrix());
}

double penalty_Q(const PenaltyProblem& prob, const StiefelPoint& v, double rho) {
  check_rho(rho);
  return objective_f(prob, v) + rho * constraint_h(prob, v);
}

PenaltyEvaluation evaluate_penalty(const PenaltyProblem& prob, const Eigen::MatrixXd& loadings,
                                   double rho) {
  check_rho(rho);
  check_loadings(prob, loadings, "evaluate_penalty");
  const Eigen::MatrixXd sigma_v = prob.covariance.matrix() * loadings;
  const double f = -(loadings.cwiseProduct(sigma_v)).sum();
  auto mmd = mmd_squared_value_and_gradient(loadings, prob.data0, prob.data1, prob.kernel);
  return {f, mmd.value, f + rho * mmd.value, -2.0 * sigma_v + rho * mmd.gradient};
}

TangentVector penalty_riemannian_gradient(const PenaltyProblem& prob, const StiefelPoint& v,
                                          double rho) {
  return riemannian_gradient(v, evaluate_penalty(prob, v.matrix(), rho).euclidean_gradient);
}

}  // namespace mbfpca
