#include "mbfpca/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mbfpca/errors.hpp"

namespace mbfpca {

namespace {

std::string full_precision(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? full_precision(*v) : std::string();
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = std::exp(scale * (a.row(i) - b.row(j)).squaredNorm());
    }
  }
  return k;
}

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double explained_variance(const Covariance& sigma, const StiefelPoint& v) {
  if (v.p() != sigma.dim()) throw InvalidArgument("explained_variance: dimension mismatch");
  if (!(sigma.trace() > 0.0)) throw DegenerateData("explained_variance: covariance has zero trace");
  const double captured = (v.matrix().transpose() * sigma.matrix() * v.matrix()).trace();
  return std::clamp(100.0 * captured / sigma.trace(), 0.0, 100.0);
}

double fairness_mmd2(const DataSet& ds, const StiefelPoint& v, const KernelConfig& cfg) {
  if (ds.dim() != v.p()) throw InvalidArgument("fairness_mmd2: dimension mismatch");
  return mmd_squared(GroupedSamples{ds.group(0) * v.matrix(), ds.group(1) * v.matrix()}, cfg);
}

Eigen::VectorXd communalities(const StiefelPoint& v) {
  return v.matrix().rowwise().squaredNorm();
}

Eigen::VectorXd Classifier::scores(const Eigen::MatrixXd& x) const {
  return (rbf_gram(x, support, kernel.sigma) * alpha).array() + bias;
}

Eigen::VectorXi Classifier::predict(const Eigen::MatrixXd& x) const {
  return (scores(x).array() >= 0.0).cast<int>();
}

Classifier train_downstream_classifier(const Eigen::MatrixXd& train_projected,
                                       const Eigen::VectorXi& labels,
                                       std::optional<KernelConfig> kernel,
                                       const ClassifierParams& params) {
  const Eigen::Index n = train_projected.rows();
  if (labels.size() != n) throw InvalidArgument("classifier: label count does not match rows");
  if (((labels.array() != 0) && (labels.array() != 1)).any()) {
    throw InvalidArgument("classifier: labels must be 0/1");
  }
  const Eigen::Index positives = labels.sum();
  if (positives == 0 || positives == n) {
    throw DegenerateData("classifier: training labels contain a single class");
  }

  Classifier clf;
  clf.support = train_projected;
  clf.kernel = kernel ? *kernel
                      : KernelConfig{median_heuristic(train_projected),
                                     BandwidthSelection::MedianHeuristic};
  clf.kernel.validate();

  const Eigen::MatrixXd k = rbf_gram(train_projected, train_projected, clf.kernel.sigma);
  const Eigen::ArrayXd y = 2.0 * labels.cast<double>().array() - 1.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lambda = params.ridge;

  // Parameters theta = (alpha, bias); returns loss and fills the gradient.
  auto loss_and_grad = [&](const Eigen::VectorXd& alpha, double bias, const Eigen::VectorXd& ka,
                           Eigen::VectorXd* g_alpha, double* g_bias) {
    const Eigen::ArrayXd margin = y * (ka.array() + bias);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += softplus_neg(margin(i));
    loss = loss * inv_n + 0.5 * lambda * alpha.dot(ka);
    if (g_alpha != nullptr) {
      Eigen::VectorXd r(n);
      for (Eigen::Index i = 0; i < n; ++i) r(i) = -y(i) * sigmoid(-margin(i)) * inv_n;
      *g_alpha = k * r + lambda * ka;
      *g_bias = r.sum();
    }
    return loss;
  };

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  double bias = 0.0;
  Eigen::VectorXd ka = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g_alpha;
  double g_bias = 0.0;
  double loss = loss_and_grad(alpha, bias, ka, &g_alpha, &g_bias);
  double step = 1.0;
  Eigen::VectorXd prev_alpha;
  Eigen::VectorXd prev_g;
  double prev_bias = 0.0;
  double prev_gb = 0.0;

  int it = 0;
  double gnorm = std::sqrt(g_alpha.squaredNorm() + g_bias * g_bias);
  for (; it < params.max_iters && gnorm > params.tolerance; ++it) {
    if (it > 0) {
      const double ss = (alpha - prev_alpha).squaredNorm() + (bias - prev_bias) * (bias - prev_bias);
      const double sy = (alpha - prev_alpha).dot(g_alpha - prev_g) + (bias - prev_bias) * (g_bias - prev_gb);
      if (sy > 0.0) step = std::clamp(ss / sy, 1e-10, 1e10);
    }
    bool accepted = false;
    for (int b = 0; b < 50; ++b, step *= 0.5) {
      const Eigen::VectorXd trial_alpha = alpha - step * g_alpha;
      const double trial_bias = bias - step * g_bias;
      const Eigen::VectorXd trial_ka = k * trial_alpha;
      const double trial_loss = loss_and_grad(trial_alpha, trial_bias, trial_ka, nullptr, nullptr);
      if (trial_loss <= loss - 1e-4 * step * gnorm * gnorm) {
        prev_alpha = alpha;
        prev_bias = bias;
        prev_g = g_alpha;
        prev_gb = g_bias;
        alpha = trial_alpha;
        bias = trial_bias;
        ka = trial_ka;
        loss = loss_and_grad(alpha, bias, ka, &g_alpha, &g_bias);
        accepted = true;
        break;
      }
    }
    gnorm = std::sqrt(g_alpha.squaredNorm() + g_bias * g_bias);
    if (!accepted) break;
  }

  clf.alpha = std::move(alpha);
  clf.bias = bias;
  clf.iterations = it;
  clf.grad_norm = gnorm;
  return clf;
}

double classifier_accuracy(const Classifier& clf, const Eigen::MatrixXd& x,
                           const Eigen::VectorXi& labels) {
  if (labels.size() != x.rows() || x.rows() == 0) {
    throw InvalidArgument("classifier_accuracy: label count does not match rows");
  }
  const Eigen::VectorXi pred = clf.predict(x);
  return 100.0 * static_cast<double>((pred.array() == labels.array()).count()) /
         static_cast<double>(labels.size());
}

double delta_dp(const Eigen::VectorXi& predictions, const Eigen::VectorXi& protected_attr) {
  if (predictions.size() != protected_attr.size()) {
    throw InvalidArgument("delta_dp: prediction and protected lengths differ");
  }
  double sum[2] = {0.0, 0.0};
  double count[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const int g = protected_attr(i);
    if (g != 0 && g != 1) throw InvalidArgument("delta_dp: protected attribute must be 0/1");
    sum[g] += predictions(i);
    count[g] += 1.0;
  }
  if (count[0] == 0.0 || count[1] == 0.0) {
    throw InvalidArgument("delta_dp: both protected groups must be present");
  }
  return std::abs(sum[0] / count[0] - sum[1] / count[1]);
}

double delta_dp(const Eigen::MatrixXd& test_projected, const Eigen::VectorXi& protected_attr,
                const Classifier& clf) {
  return delta_dp(clf.predict(test_projected), protected_attr);
}

void FitReport::validate() const {
  if (!(explained_variance_pct >= 0.0 && explained_variance_pct <= 100.0)) {
    throw InvalidArgument("FitReport: explained variance outside [0, 100]");
  }
  if ((communalities.array() < 0.0).any() || (communalities.array() > 1.0 + 1e-10).any()) {
    throw InvalidArgument("FitReport: communality outside [0, 1]");
  }
}

std::string FitReport::to_key_value() const {
  std::ostringstream out;
  out << "method=" << method << '\n';
  out << "status=" << status << '\n';
  out << "explained_variance_pct=" << full_precision(explained_variance_pct) << '\n';
  out << "mmd2_train=" << full_precision(mmd2_train) << '\n';
  if (mmd2_test) out << "mmd2_test=" << full_precision(*mmd2_test) << '\n';
  if (accuracy_pct) out << "accuracy_pct=" << full_precision(*accuracy_pct) << '\n';
  if (delta_dp) out << "delta_dp=" << full_precision(*delta_dp) << '\n';
  out << "outer_iterations=" << outer_iterations << '\n';
  out << "runtime_seconds=" << full_precision(runtime_seconds) << '\n';
  for (Eigen::Index j = 0; j < communalities.size(); ++j) {
    out << "communality." << j + 1 << '=' << full_precision(communalities(j)) << '\n';
  }
  for (const auto& [key, value] : config_echo) out << "config." << key << '=' << value << '\n';
  return out.str();
}

std::string FitReport::csv_header() {
  return "split,method,status,explained_variance_pct,mmd2_train,mmd2_test,accuracy_pct,delta_dp,"
         "outer_iterations";
}

std::string FitReport::csv_row(int split_index) const {
  std::ostringstream out;
  out << split_index << ',' << method << ',' << status << ',' << full_precision(explained_variance_pct)
      << ',' << full_precision(mmd2_train) << ',' << optional_cell(mmd2_test) << ','
      << optional_cell(accuracy_pct) << ',' << optional_cell(delta_dp) << ',' << outer_iterations;
  return out.str();
}

}  // namespace mbfpca
