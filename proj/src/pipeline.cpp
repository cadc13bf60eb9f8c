#include "mbfpca/pipeline.hpp"

#include <chrono>
#include <charconv>

#include "mbfpca/errors.hpp"
#include "mbfpca/kernel.hpp"
#include "mbfpca/pca.hpp"

namespace mbfpca {

namespace {

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

PreparedProblem prepare_problem(const DataSet& train, Eigen::Index d, std::optional<double> sigma) {
  train.validate();
  Covariance cov = Covariance::from_data(train.features);
  StiefelPoint v_pca = vanilla_pca(cov, d);
  KernelConfig kernel = sigma ? KernelConfig{*sigma, BandwidthSelection::Manual}
                              : KernelConfig{median_heuristic(train.features * v_pca.matrix()),
                                             BandwidthSelection::MedianHeuristic};
  kernel.validate();
  return {std::move(v_pca),
          PenaltyProblem(std::move(cov), train.group(0), train.group(1), kernel)};
}

std::string method_label(Method method, double tau) {
  if (method == Method::VanillaPca) return "PCA";
  return "MbF-PCA(" + num(tau) + ")";
}

MethodRun run_method(const PreparedProblem& prepared, const DataSet& train, const DataSet* test,
                     Method method, const RepmsConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const PenaltyProblem& prob = prepared.problem;

  std::optional<FitOutcome> outcome;
  StiefelPoint v = prepared.v_pca;
  if (method == Method::MbfPca) {
    outcome = repms_fit(prob, prepared.v_pca, cfg);
    v = outcome->v;
  }

  FitReport report;
  report.method = method_label(method, cfg.tau);
  report.status = outcome ? to_string(outcome->status) : "Closed-form";
  report.outer_iterations = outcome ? static_cast<int>(outcome->history.size()) : 0;
  report.explained_variance_pct = explained_variance(prob.covariance, v);
  report.mmd2_train = constraint_h(prob, v);
  report.communalities = communalities(v);

  if (test != nullptr) {
    report.mmd2_test = fairness_mmd2(*test, v, prob.kernel);
    if (train.outcome && test->outcome) {
      const Eigen::MatrixXd train_proj = train.features * v.matrix();
      const Eigen::MatrixXd test_proj = test->features * v.matrix();
      const Classifier clf = train_downstream_classifier(train_proj, *train.outcome);
      report.accuracy_pct = classifier_accuracy(clf, test_proj, *test->outcome);
      report.delta_dp = delta_dp(test_proj, test->protected_attr, clf);
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto& echo = report.config_echo;
  echo.emplace_back("dim", std::to_string(v.d()));
  echo.emplace_back("sigma", num(prob.kernel.sigma));
  echo.emplace_back("sigma_selection", prob.kernel.selection == BandwidthSelection::MedianHeuristic
                                           ? "median_heuristic_on_pca_projection"
                                           : "manual");
  echo.emplace_back("covariance_divisor", "n-1");
  echo.emplace_back("explained_variance_basis", "train_covariance");
  echo.emplace_back("mmd_estimator", "biased_v_statistic");
  if (method == Method::MbfPca) {
    echo.emplace_back("K", std::to_string(cfg.max_outer_iters));
    echo.emplace_back("eps0", num(cfg.eps0));
    echo.emplace_back("eps_min", num(cfg.eps_min));
    echo.emplace_back("theta_eps", num(cfg.theta_eps));
    echo.emplace_back("rho0", num(cfg.rho0));
    echo.emplace_back("theta_rho", num(cfg.theta_rho));
    echo.emplace_back("rho_max", num(cfg.rho_max));
    echo.emplace_back("tau", num(cfg.tau));
    echo.emplace_back("d_min", num(cfg.d_min));
    echo.emplace_back("inner_max_iters", std::to_string(cfg.inner_max_iters));
    echo.emplace_back("inner_solver", "riemannian_gradient_descent_bb_armijo");
    echo.emplace_back("initialization", "vanilla_pca");
  }
  echo.emplace_back("seed", std::to_string(cfg.seed));
  if (report.accuracy_pct) {
    echo.emplace_back("classifier", "rbf_kernel_logistic_regression(ridge=0.01,threshold=0.5)");
  }
  report.validate();
  return {std::move(v), std::move(report), std::move(outcome)};
}

}  // namespace mbfpca
