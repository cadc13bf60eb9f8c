#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mbfpca {

/// Per-feature z-scoring parameters.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // sample standard deviation, 1/(n-1)
};

/// Feature matrix with a binary protected attribute and an optional binary
/// outcome.
struct DataSet {
  Eigen::MatrixXd features;  // n x p
  Eigen::VectorXi protected_attr;
  std::optional<Eigen::VectorXi> outcome;
  std::vector<std::string> feature_names;
  std::string protected_name = "protected";
  std::string outcome_name = "outcome";
  std::optional<Standardization> standardization;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Rows belonging to protected group g (0 or 1), in original order.
  Eigen::MatrixXd group(int g) const;
  Eigen::Index group_size(int g) const;

  /// Dataset with only the given rows, in the given order.
  DataSet subset(const std::vector<Eigen::Index>& rows) const;

  /// Throws InvalidArgument on inconsistent shapes, non-binary labels or an
  /// empty protected group.
  void validate() const;
};

/// Reads a header-first, comma-separated numeric file. The protected (and
/// optional outcome) columns must hold 0/1 and are removed from the features.
/// Throws ParseError with 1-based row/column locations, IoError if unreadable.
DataSet load_csv(const std::filesystem::path& path, const std::string& protected_column,
                 const std::optional<std::string>& outcome_column = std::nullopt);

/// Writes features followed by the protected and outcome columns, with full
/// round-trip precision.
void write_csv(const DataSet& ds, const std::filesystem::path& path);

/// Z-scores each column with parameters fitted on ds. Throws DegenerateData
/// naming any constant column.
DataSet standardize(const DataSet& ds);

/// Applies previously fitted parameters (e.g. train parameters to test rows).
DataSet apply_standardization(const DataSet& ds, const Standardization& params);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

/// Deterministic split stratified by the protected attribute. The training
/// side gets round(train_fraction * n) rows. Throws StratificationError if a
/// group would be missing from either side.
std::pair<DataSet, DataSet> split(const DataSet& ds, const SplitSpec& spec);

/// Two groups of 150 in R^3: N(0, 0.1 I + 11^T) and an equal mixture of
/// N(1, 0.1 I) and N(-1, 0.1 I). Same mean and covariance, different laws.
DataSet synth1(std::uint64_t seed);

/// Covariance of a stationary AR(1) process: r^|i-j| / (1 - r^2).
Eigen::MatrixXd ar1_covariance(Eigen::Index size, double r);

/// Population parameters of the high-dimensional generator, built at the
/// ambient dimension before random projection.
struct Synth2Population {
  Eigen::VectorXd mean0;
  Eigen::VectorXd mean1;
  Eigen::MatrixXd cov0;
  Eigen::MatrixXd cov1;
  double raw_cov_diff_norm;  // ||A1 - A0||_2 before rescaling
};

inline constexpr Eigen::Index kSynth2AmbientDim = 1000;
inline constexpr Eigen::Index kSynth2GroupSize = 250;

/// Block-diagonal AR(1) covariances with block parameters
/// (0.99, 0.98, 0.97, 0.98, 0.95) vs (0.99, 0.98, 0.97, 0.98, 0.99), both
/// divided by the spectral norm of their difference; mean difference
/// 2 * 1 / ||1||. ambient_dim must be a positive multiple of 5.
Synth2Population synth2_population(Eigen::Index ambient_dim = kSynth2AmbientDim);

/// Samples n_per_group points per group at the ambient dimension and projects
/// them to dimension p with an i.i.d. N(0, 1/ambient_dim) matrix.
/// p must be one of 20, 30, ..., 100.
DataSet synth2(Eigen::Index p, std::uint64_t seed, Eigen::Index n_per_group = kSynth2GroupSize,
               Eigen::Index ambient_dim = kSynth2AmbientDim);

bool synth2_dimension_supported(Eigen::Index p);

}  // namespace mbfpca
