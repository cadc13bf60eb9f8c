#include "mbfpca/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mbfpca/errors.hpp"

namespace mbfpca {

namespace {

// Gram matrix of the RBF kernel between the rows of a and b.
Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = std::exp(scale * (a.row(i) - b.row(j)).squaredNorm());
    }
  }
  return k;
}

// Symmetric Gram matrix; fills the upper triangle and mirrors it.
Eigen::MatrixXd gram_self(const Eigen::MatrixXd& a, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::exp(scale * (a.row(i) - a.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void check_data(const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& data0,
                const Eigen::MatrixXd& data1) {
  if (data0.rows() < 1 || data1.rows() < 1) {
    throw InvalidArgument("mmd gradient: both groups must be non-empty");
  }
  if (data0.cols() != loadings.rows() || data1.cols() != loadings.rows()) {
    throw InvalidArgument("mmd gradient: data has " + std::to_string(data0.cols()) + "/" +
                          std::to_string(data1.cols()) + " columns but loadings have " +
                          std::to_string(loadings.rows()) + " rows");
  }
  if (!loadings.allFinite() || !data0.allFinite() || !data1.allFinite()) {
    throw InvalidArgument("mmd gradient: non-finite input");
  }
}

}  // namespace

void KernelConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("KernelConfig: sigma must be positive and finite, got " +
                          std::to_string(sigma));
  }
}

void GroupedSamples::validate() const {
  if (group0.rows() < 1 || group1.rows() < 1) {
    throw InvalidArgument("GroupedSamples: both groups must be non-empty");
  }
  if (group0.cols() != group1.cols()) {
    throw InvalidArgument("GroupedSamples: groups have different column counts");
  }
  if (!group0.allFinite() || !group1.allFinite()) {
    throw InvalidArgument("GroupedSamples: non-finite sample");
  }
}

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y, const KernelConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size()) throw InvalidArgument("rbf_kernel: dimension mismatch");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("rbf_kernel: non-finite input");
  return std::exp(-(x - y).squaredNorm() / (2.0 * cfg.sigma * cfg.sigma));
}

double median_heuristic(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw InvalidArgument("median_heuristic: need at least two samples");
  if (!samples.allFinite()) throw InvalidArgument("median_heuristic: non-finite sample");

  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dists.push_back((samples.row(i) - samples.row(j)).norm());
    }
  }
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  const double median = *mid;
  if (!(median > 0.0)) {
    throw DegenerateData("median_heuristic: median pairwise distance is zero");
  }
  return median;
}

double mmd_squared(const GroupedSamples& s, const KernelConfig& cfg) {
  s.validate();
  cfg.validate();
  const double m = static_cast<double>(s.group0.rows());
  const double n = static_cast<double>(s.group1.rows());
  const double kxx = gram_self(s.group0, cfg.sigma).sum() / (m * m);
  const double kyy = gram_self(s.group1, cfg.sigma).sum() / (n * n);
  const double kxy = gram(s.group0, s.group1, cfg.sigma).sum() / (m * n);
  // Non-negative in exact arithmetic; clamp round-off.
  return std::max(0.0, kxx + kyy - 2.0 * kxy);
}

MmdValueAndGradient mmd_squared_value_and_gradient(const Eigen::MatrixXd& loadings,
                                                   const Eigen::MatrixXd& data0,
                                                   const Eigen::MatrixXd& data1,
                                                   const KernelConfig& cfg) {
  cfg.validate();
  check_data(loadings, data0, data1);

  const double m = static_cast<double>(data0.rows());
  const double n = static_cast<double>(data1.rows());
  const double s2 = cfg.sigma * cfg.sigma;

  const Eigen::MatrixXd proj0 = data0 * loadings;
  const Eigen::MatrixXd proj1 = data1 * loadings;
  const Eigen::MatrixXd k00 = gram_self(proj0, cfg.sigma);
  const Eigen::MatrixXd k11 = gram_self(proj1, cfg.sigma);
  const Eigen::MatrixXd k01 = gram(proj0, proj1, cfg.sigma);

  const double value = std::max(0.0, k00.sum() / (m * m) + k11.sum() / (n * n) -
                                         2.0 * k01.sum() / (m * n));

  // (H - K) P with H the row-sum diagonal, i.e. Laplacian of the kernel graph.
  const Eigen::MatrixXd lap0 =
      k00.rowwise().sum().asDiagonal() * proj0 - k00 * proj0;
  const Eigen::MatrixXd lap1 =
      k11.rowwise().sum().asDiagonal() * proj1 - k11 * proj1;
  const Eigen::MatrixXd grad_h1 = (-2.0 / (m * m * s2)) * (data0.transpose() * lap0);
  const Eigen::MatrixXd grad_h2 = (-2.0 / (n * n * s2)) * (data1.transpose() * lap1);

  const Eigen::MatrixXd cross0 = k01.rowwise().sum().asDiagonal() * proj0 - k01 * proj1;
  const Eigen::MatrixXd cross1 =
      k01.colwise().sum().transpose().asDiagonal() * proj1 - k01.transpose() * proj0;
  const Eigen::MatrixXd grad_h3 =
      (-1.0 / (m * n * s2)) * (data0.transpose() * cross0 + data1.transpose() * cross1);

  return {value, grad_h1 + grad_h2 - 2.0 * grad_h3};
}

Eigen::MatrixXd mmd_squared_gradient(const StiefelPoint& v, const Eigen::MatrixXd& data0,
                                     const Eigen::MatrixXd& data1, const KernelConfig& cfg) {
  return mmd_squared_value_and_gradient(v.matrix(), data0, data1, cfg).gradient;
}

}  // namespace mbfpca
