#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mbfpca/data.hpp"
#include "mbfpca/metrics.hpp"
#include "mbfpca/objective.hpp"
#include "mbfpca/solver.hpp"
#include "mbfpca/stiefel.hpp"

namespace mbfpca {

/// Everything fixed before optimization starts: covariance of the pooled
/// training rows, the vanilla-PCA loadings and the frozen kernel bandwidth.
struct PreparedProblem {
  StiefelPoint v_pca;
  PenaltyProblem problem;
};

/// train must already be standardized. Without a sigma override, the
/// bandwidth is the median heuristic on the vanilla-PCA projection of all
/// training rows.
PreparedProblem prepare_problem(const DataSet& train, Eigen::Index d,
                                std::optional<double> sigma = std::nullopt);

enum class Method { VanillaPca, MbfPca };

struct MethodRun {
  StiefelPoint v;
  FitReport report;
  std::optional<FitOutcome> outcome;  // MbfPca only
};

/// Fits one method on the prepared training problem and evaluates it. test
/// must be standardized with the training parameters. Explained variance is
/// measured on the training covariance; MMD^2 on both sides with the training
/// bandwidth; accuracy and Delta_DP only when an outcome column is present.
MethodRun run_method(const PreparedProblem& prepared, const DataSet& train, const DataSet* test,
                     Method method, const RepmsConfig& cfg);

std::string method_label(Method method, double tau);

}  // namespace mbfpca
