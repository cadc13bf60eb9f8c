#include "mbfpca/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbfpca/errors.hpp"
#include "mbfpca/random.hpp"

namespace mbfpca {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("non-numeric cell '" + std::string(field) + "' at row " +
                         std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

int parse_binary(std::string_view field, std::size_t row, std::size_t col, const std::string& name) {
  const double v = parse_number(field, row, col);
  if (v != 0.0 && v != 1.0) {
    throw ParseError("column '" + name + "' must be 0/1 but row " + std::to_string(row) +
                         " holds '" + std::string(field) + "'",
                     row, col);
  }
  return static_cast<int>(v);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

Eigen::MatrixXd sample_gaussian(CounterRng& rng, Eigen::Index n, const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& chol_lower) {
  const Eigen::Index p = mean.size();
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  Eigen::MatrixXd x = z * chol_lower.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw DegenerateData("covariance is not positive definite");
  }
  return llt.matrixL();
}

std::vector<std::string> default_names(Eigen::Index p) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

}  // namespace

Eigen::MatrixXd DataSet::group(int g) const {
  const Eigen::Index count = group_size(g);
  Eigen::MatrixXd out(count, features.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (protected_attr(i) == g) out.row(r++) = features.row(i);
  }
  return out;
}

Eigen::Index DataSet::group_size(int g) const { return (protected_attr.array() == g).count(); }

DataSet DataSet::subset(const std::vector<Eigen::Index>& rows) const {
  DataSet out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.protected_attr.resize(static_cast<Eigen::Index>(rows.size()));
  if (outcome) out.outcome = Eigen::VectorXi(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out.features.row(i) = features.row(rows[k]);
    out.protected_attr(i) = protected_attr(rows[k]);
    if (outcome) (*out.outcome)(i) = (*outcome)(rows[k]);
  }
  out.feature_names = feature_names;
  out.protected_name = protected_name;
  out.outcome_name = outcome_name;
  out.standardization = standardization;
  return out;
}

void DataSet::validate() const {
  if (protected_attr.size() != features.rows()) {
    throw InvalidArgument("DataSet: protected attribute length does not match row count");
  }
  if (outcome && outcome->size() != features.rows()) {
    throw InvalidArgument("DataSet: outcome length does not match row count");
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw InvalidArgument("DataSet: feature name count does not match column count");
  }
  if (((protected_attr.array() != 0) && (protected_attr.array() != 1)).any()) {
    throw InvalidArgument("DataSet: protected attribute must be binary");
  }
  if (outcome && (((outcome->array() != 0) && (outcome->array() != 1)).any())) {
    throw InvalidArgument("DataSet: outcome must be binary");
  }
  if (group_size(0) == 0 || group_size(1) == 0) {
    throw InvalidArgument("DataSet: both protected groups must be non-empty");
  }
}

DataSet load_csv(const std::filesystem::path& path, const std::string& protected_column,
                 const std::optional<std::string>& outcome_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path.string() + "' is empty", 1, 0);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_fields(line);

  std::optional<std::size_t> prot_idx;
  std::optional<std::size_t> out_idx;
  DataSet ds;
  ds.protected_name = protected_column;
  if (outcome_column) ds.outcome_name = *outcome_column;
  std::vector<std::size_t> feature_idx;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == protected_column) {
      prot_idx = c;
    } else if (outcome_column && header[c] == *outcome_column) {
      out_idx = c;
    } else {
      feature_idx.push_back(c);
      ds.feature_names.emplace_back(header[c]);
    }
  }
  if (!prot_idx) throw ParseError("missing protected column '" + protected_column + "'", 1, 0);
  if (outcome_column && !out_idx) {
    throw ParseError("missing outcome column '" + *outcome_column + "'", 1, 0);
  }

  std::vector<double> values;
  std::vector<int> prot;
  std::vector<int> outcome;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                           " fields, header has " + std::to_string(header.size()),
                       row, 0);
    }
    for (const auto c : feature_idx) values.push_back(parse_number(fields[c], row, c + 1));
    prot.push_back(parse_binary(fields[*prot_idx], row, *prot_idx + 1, protected_column));
    if (out_idx) outcome.push_back(parse_binary(fields[*out_idx], row, *out_idx + 1, ds.outcome_name));
  }

  const auto n = static_cast<Eigen::Index>(prot.size());
  const auto p = static_cast<Eigen::Index>(feature_idx.size());
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>(values.data(), n, p);
  ds.protected_attr = Eigen::Map<const Eigen::VectorXi>(prot.data(), n);
  if (out_idx) ds.outcome = Eigen::Map<const Eigen::VectorXi>(outcome.data(), n);
  return ds;
}

void write_csv(const DataSet& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.protected_name;
  if (ds.outcome) out << ',' << ds.outcome_name;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << format_double(ds.features(i, j)) << ',';
    out << ds.protected_attr(i);
    if (ds.outcome) out << ',' << (*ds.outcome)(i);
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

DataSet standardize(const DataSet& ds) {
  if (ds.rows() < 2) throw DegenerateData("standardize: need at least two rows");
  Standardization params;
  params.mean = ds.features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = ds.features.rowwise() - params.mean.transpose();
  params.scale = (centered.colwise().squaredNorm() / static_cast<double>(ds.rows() - 1))
                     .cwiseSqrt()
                     .transpose();
  for (Eigen::Index j = 0; j < ds.dim(); ++j) {
    if (!(params.scale(j) > 0.0)) {
      const std::string name = j < static_cast<Eigen::Index>(ds.feature_names.size())
                                   ? ds.feature_names[static_cast<std::size_t>(j)]
                                   : std::to_string(j + 1);
      throw DegenerateData("standardize: column '" + name + "' is constant");
    }
  }
  return apply_standardization(ds, params);
}

DataSet apply_standardization(const DataSet& ds, const Standardization& params) {
  if (params.mean.size() != ds.dim() || params.scale.size() != ds.dim()) {
    throw InvalidArgument("apply_standardization: parameter dimension mismatch");
  }
  DataSet out = ds;
  out.features = (ds.features.rowwise() - params.mean.transpose()).array().rowwise() /
                 params.scale.transpose().array();
  out.standardization = params;
  return out;
}

std::pair<DataSet, DataSet> split(const DataSet& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("split: train_fraction must lie in (0, 1)");
  }
  const auto n = ds.rows();
  const auto n0 = ds.group_size(0);
  const auto total_train = static_cast<Eigen::Index>(std::llround(spec.train_fraction * n));
  const auto train0 = static_cast<Eigen::Index>(std::llround(spec.train_fraction * n0));
  const Eigen::Index counts[2] = {train0, total_train - train0};

  CounterRng rng(spec.seed);
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
  for (int g = 0; g < 2; ++g) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ds.protected_attr(i) == g) idx.push_back(i);
    }
    const auto size = static_cast<Eigen::Index>(idx.size());
    if (counts[g] < 1 || counts[g] >= size) {
      throw StratificationError("split: protected group " + std::to_string(g) + " (" +
                                std::to_string(size) + " rows) cannot appear in both splits");
    }
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.below(i + 1)]);
    }
    train_rows.insert(train_rows.end(), idx.begin(), idx.begin() + counts[g]);
    test_rows.insert(test_rows.end(), idx.begin() + counts[g], idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

DataSet synth1(std::uint64_t seed) {
  constexpr Eigen::Index kGroup = 150;
  constexpr Eigen::Index kDim = 3;
  CounterRng rng(seed);

  const Eigen::MatrixXd cov0 =
      0.1 * Eigen::MatrixXd::Identity(kDim, kDim) + Eigen::MatrixXd::Ones(kDim, kDim);
  const Eigen::MatrixXd g0 = sample_gaussian(rng, kGroup, Eigen::VectorXd::Zero(kDim),
                                             cholesky_lower(cov0));
  Eigen::MatrixXd g1 = sample_gaussian(rng, kGroup, Eigen::VectorXd::Zero(kDim),
                                       std::sqrt(0.1) * Eigen::MatrixXd::Identity(kDim, kDim));
  // Alternate mixture components so the mixture is exactly balanced.
  for (Eigen::Index i = 0; i < kGroup; ++i) g1.row(i).array() += (i % 2 == 0) ? 1.0 : -1.0;

  DataSet ds;
  ds.features.resize(2 * kGroup, kDim);
  ds.features << g0, g1;
  ds.protected_attr.resize(2 * kGroup);
  ds.protected_attr << Eigen::VectorXi::Zero(kGroup), Eigen::VectorXi::Ones(kGroup);
  ds.feature_names = default_names(kDim);
  return ds;
}

Eigen::MatrixXd ar1_covariance(Eigen::Index size, double r) {
  if (size < 1 || !(std::abs(r) < 1.0)) throw InvalidArgument("ar1_covariance: need |r| < 1");
  Eigen::MatrixXd a(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      a(i, j) = std::pow(r, static_cast<double>(std::abs(i - j))) / (1.0 - r * r);
    }
  }
  return a;
}

Synth2Population synth2_population(Eigen::Index ambient_dim) {
  if (ambient_dim < 5 || ambient_dim % 5 != 0) {
    throw InvalidArgument("synth2_population: ambient dimension must be a positive multiple of 5");
  }
  const Eigen::Index block = ambient_dim / 5;
  constexpr double kBlocks0[5] = {0.99, 0.98, 0.97, 0.98, 0.95};
  constexpr double kBlocks1[5] = {0.99, 0.98, 0.97, 0.98, 0.99};

  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(ambient_dim, ambient_dim);
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(ambient_dim, ambient_dim);
  for (int b = 0; b < 5; ++b) {
    a0.block(b * block, b * block, block, block) = ar1_covariance(block, kBlocks0[b]);
    a1.block(b * block, b * block, block, block) = ar1_covariance(block, kBlocks1[b]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a1 - a0, Eigen::EigenvaluesOnly);
  const double q_norm = eig.eigenvalues().cwiseAbs().maxCoeff();

  Synth2Population pop;
  pop.raw_cov_diff_norm = q_norm;
  pop.cov0 = a0 / q_norm;
  pop.cov1 = a1 / q_norm;
  pop.mean0 = Eigen::VectorXd::Zero(ambient_dim);
  const Eigen::VectorXd f_raw = Eigen::VectorXd::Ones(ambient_dim);
  pop.mean1 = pop.mean0 + 2.0 * f_raw / f_raw.norm();
  return pop;
}

bool synth2_dimension_supported(Eigen::Index p) { return p >= 20 && p <= 100 && p % 10 == 0; }

DataSet synth2(Eigen::Index p, std::uint64_t seed, Eigen::Index n_per_group,
               Eigen::Index ambient_dim) {
  if (!synth2_dimension_supported(p)) {
    throw InvalidArgument("synth2: p must be one of 20, 30, ..., 100, got " + std::to_string(p));
  }
  if (n_per_group < 2) throw InvalidArgument("synth2: need at least two rows per group");
  const Synth2Population pop = synth2_population(ambient_dim);

  CounterRng rng(seed);
  const Eigen::MatrixXd x0 = sample_gaussian(rng, n_per_group, pop.mean0, cholesky_lower(pop.cov0));
  const Eigen::MatrixXd x1 = sample_gaussian(rng, n_per_group, pop.mean1, cholesky_lower(pop.cov1));
  Eigen::MatrixXd projection(ambient_dim, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ambient_dim));
  for (Eigen::Index i = 0; i < ambient_dim; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) projection(i, j) = scale * rng.normal();
  }

  DataSet ds;
  ds.features.resize(2 * n_per_group, p);
  ds.features << x0 * projection, x1 * projection;
  ds.protected_attr.resize(2 * n_per_group);
  ds.protected_attr << Eigen::VectorXi::Zero(n_per_group), Eigen::VectorXi::Ones(n_per_group);
  ds.feature_names = default_names(p);
  return ds;
}

}  // namespace mbfpca
