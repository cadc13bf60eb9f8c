#pragma once

#include <Eigen/Dense>

#include "mbfpca/stiefel.hpp"

namespace mbfpca {

enum class BandwidthSelection { Manual, MedianHeuristic };

/// RBF kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
struct KernelConfig {
  double sigma = 1.0;
  BandwidthSelection selection = BandwidthSelection::Manual;

  /// Throws InvalidArgument unless sigma is positive and finite.
  void validate() const;
};

/// Projected samples of the two protected groups (rows are samples).
struct GroupedSamples {
  Eigen::MatrixXd group0;
  Eigen::MatrixXd group1;

  /// Throws InvalidArgument if a group is empty or column counts differ.
  void validate() const;
};

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y, const KernelConfig& cfg);

/// Median of the n(n-1)/2 unsquared pairwise distances between rows. For an
/// even number of pairs the lower middle order statistic is returned.
/// Throws DegenerateData if every distance is zero.
double median_heuristic(const Eigen::MatrixXd& samples);

/// Biased (V-statistic) estimate of MMD^2 between the two groups.
double mmd_squared(const GroupedSamples& s, const KernelConfig& cfg);

/// Value and Euclidean gradient of h(V) = mmd_squared(data0 V, data1 V) with
/// respect to the loading matrix.
struct MmdValueAndGradient {
  double value;
  Eigen::MatrixXd gradient;
};

/// Closed-form gradient, valid for any p x d loading matrix (orthonormality
/// is not used), so it can be checked against finite differences in the
/// ambient space.
MmdValueAndGradient mmd_squared_value_and_gradient(const Eigen::MatrixXd& loadings,
                                                   const Eigen::MatrixXd& data0,
                                                   const Eigen::MatrixXd& data1,
                                                   const KernelConfig& cfg);

Eigen::MatrixXd mmd_squared_gradient(const StiefelPoint& v, const Eigen::MatrixXd& data0,
                                     const Eigen::MatrixXd& data1, const KernelConfig& cfg);

}  // namespace mbfpca
