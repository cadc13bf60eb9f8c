#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mbfpca/data.hpp"
#include "mbfpca/kernel.hpp"
#include "mbfpca/objective.hpp"
#include "mbfpca/stiefel.hpp"

namespace mbfpca {

/// 100 * tr(V^T Sigma V) / tr(Sigma). Throws DegenerateData if tr(Sigma) = 0.
double explained_variance(const Covariance& sigma, const StiefelPoint& v);

/// MMD^2 between the projected protected groups of ds.
double fairness_mmd2(const DataSet& ds, const StiefelPoint& v, const KernelConfig& cfg);

/// Per-feature sum of squared loadings.
Eigen::VectorXd communalities(const StiefelPoint& v);

struct ClassifierParams {
  double ridge = 1e-2;
  double tolerance = 1e-6;
  int max_iters = 5000;
};

/// RBF kernel logistic regression: score(x) = sum_i alpha_i k(x_i, x) + bias.
struct Classifier {
  Eigen::MatrixXd support;  // training points
  Eigen::VectorXd alpha;
  double bias = 0.0;
  KernelConfig kernel;
  int iterations = 0;
  double grad_norm = 0.0;

  Eigen::VectorXd scores(const Eigen::MatrixXd& x) const;
  /// 1 where the predicted probability is >= 0.5.
  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const;
};

/// Fits the classifier by gradient descent with Armijo backtracking on the
/// ridge-penalized mean logistic loss. Without a kernel, the bandwidth is the
/// median heuristic on the training points. Throws DegenerateData if the
/// labels contain a single class.
Classifier train_downstream_classifier(const Eigen::MatrixXd& train_projected,
                                       const Eigen::VectorXi& labels,
                                       std::optional<KernelConfig> kernel = std::nullopt,
                                       const ClassifierParams& params = {});

/// Percentage of correctly predicted labels.
double classifier_accuracy(const Classifier& clf, const Eigen::MatrixXd& x,
                           const Eigen::VectorXi& labels);

/// |mean prediction on protected = 0 - mean prediction on protected = 1|.
double delta_dp(const Eigen::VectorXi& predictions, const Eigen::VectorXi& protected_attr);
double delta_dp(const Eigen::MatrixXd& test_projected, const Eigen::VectorXi& protected_attr,
                const Classifier& clf);

/// Evaluation of one fitted loading matrix.
struct FitReport {
  std::string method;
  double explained_variance_pct = 0.0;
  double mmd2_train = 0.0;
  std::optional<double> mmd2_test;
  std::optional<double> accuracy_pct;
  std::optional<double> delta_dp;
  Eigen::VectorXd communalities;
  std::string status;
  int outer_iterations = 0;
  double runtime_seconds = 0.0;
  /// Hyperparameters and conventions in insertion order.
  std::vector<std::pair<std::string, std::string>> config_echo;

  /// Throws InvalidArgument if %Var or a communality is out of range.
  void validate() const;

  /// "key=value" lines; doubles at full precision.
  std::string to_key_value() const;
  static std::string csv_header();
  /// One row matching csv_header(); empty cells for absent values.
  std::string csv_row(int split_index) const;
};

}  // namespace mbfpca
