#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbfpca/metrics.hpp"
#include "mbfpca/solver.hpp"

namespace mbfpca::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Flat "key = value" file; blank lines and lines starting with '#' are
/// skipped. Throws ConfigError on a malformed line.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

/// Applies recognised solver keys (K, eps0, eps_min, theta_eps, rho0,
/// theta_rho, rho_max, tau, d_min, inner_max_iters, seed) and returns the
/// keys it did not consume.
std::map<std::string, std::string> apply_solver_overrides(
    const std::map<std::string, std::string>& values, RepmsConfig& cfg);

/// Writes "key=value" lines next to an output file.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

struct SynthOptions {
  int kind = 1;
  std::optional<Eigen::Index> p;
  std::uint64_t seed = 0;
  Eigen::Index n_per_group = 0;  // 0 = generator default
  std::filesystem::path out;
};

/// Writes the dataset CSV to out and a manifest to out + ".manifest".
void run_synth(const SynthOptions& opts);

struct FitOptions {
  std::filesystem::path data;
  std::string protected_column = "protected";
  std::optional<std::string> outcome_column;
  Eigen::Index dim = 2;
  RepmsConfig repms = default_config();
  double train_fraction = 0.7;  // 1 fits on every row and skips test metrics
  std::optional<double> sigma;
  std::filesystem::path out;
};

struct FitResult {
  FitReport report;
  Eigen::MatrixXd loadings;
};

/// Standardize, vanilla PCA, penalty loop, evaluation. Writes the p x d
/// loadings CSV to out, the report to out + ".report" and a manifest.
FitResult run_fit(const FitOptions& opts);

struct CompareOptions {
  std::filesystem::path data;
  std::string protected_column = "protected";
  std::optional<std::string> outcome_column;
  Eigen::Index dim = 2;
  int splits = 10;
  std::uint64_t seed = 0;
  std::vector<double> taus = {1e-3, 1e-6};
  double train_fraction = 0.7;
  std::optional<double> sigma;
  RepmsConfig repms = default_config();
  std::filesystem::path out;
};

/// Aggregate of one method across splits: mean and sample std per metric.
struct SummaryRow {
  std::string method;
  int splits = 0;
  int proper_terminations = 0;
  std::map<std::string, std::pair<double, double>> stats;
};

struct CompareResult {
  /// per_split[s][m]: split s, method m (PCA first, then each tau).
  std::vector<std::vector<FitReport>> per_split;
  std::vector<SummaryRow> summary;
};

/// Writes the mean/std table to out, per-split rows to out + ".splits.csv",
/// communalities to out + ".communalities.csv" and a manifest.
CompareResult run_compare(const CompareOptions& opts);

}  // namespace mbfpca::cli
