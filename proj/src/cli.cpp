#include "mbfpca/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbfpca/data.hpp"
#include "mbfpca/errors.hpp"
#include "mbfpca/pipeline.hpp"

namespace mbfpca::cli {

namespace {

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not an integer");
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  return std::filesystem::path(p.string() + suffix);
}

void append_config(std::vector<std::pair<std::string, std::string>>& entries,
                   const RepmsConfig& cfg) {
  entries.emplace_back("config.K", std::to_string(cfg.max_outer_iters));
  entries.emplace_back("config.eps0", num(cfg.eps0));
  entries.emplace_back("config.eps_min", num(cfg.eps_min));
  entries.emplace_back("config.theta_eps", num(cfg.theta_eps));
  entries.emplace_back("config.rho0", num(cfg.rho0));
  entries.emplace_back("config.theta_rho", num(cfg.theta_rho));
  entries.emplace_back("config.rho_max", num(cfg.rho_max));
  entries.emplace_back("config.tau", num(cfg.tau));
  entries.emplace_back("config.d_min", num(cfg.d_min));
  entries.emplace_back("config.inner_max_iters", std::to_string(cfg.inner_max_iters));
}

struct PreparedSplit {
  DataSet train;
  std::optional<DataSet> test;
};

PreparedSplit standardized_split(const DataSet& raw, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1]");
  }
  if (train_fraction == 1.0) return {standardize(raw), std::nullopt};
  auto [train, test] = split(raw, SplitSpec{train_fraction, seed});
  DataSet train_std = standardize(train);
  DataSet test_std = apply_standardization(test, *train_std.standardization);
  return {std::move(train_std), std::move(test_std)};
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    values[key] = trim(t.substr(eq + 1));
  }
  return values;
}

std::map<std::string, std::string> apply_solver_overrides(
    const std::map<std::string, std::string>& values, RepmsConfig& cfg) {
  std::map<std::string, std::string> rest;
  for (const auto& [key, value] : values) {
    if (key == "K") {
      cfg.max_outer_iters = static_cast<int>(to_integer(key, value));
    } else if (key == "eps0") {
      cfg.eps0 = to_double(key, value);
    } else if (key == "eps_min") {
      cfg.eps_min = to_double(key, value);
    } else if (key == "theta_eps") {
      cfg.theta_eps = to_double(key, value);
    } else if (key == "rho0") {
      cfg.rho0 = to_double(key, value);
    } else if (key == "theta_rho") {
      cfg.theta_rho = to_double(key, value);
    } else if (key == "rho_max") {
      cfg.rho_max = to_double(key, value);
    } else if (key == "tau") {
      cfg.tau = to_double(key, value);
    } else if (key == "d_min") {
      cfg.d_min = to_double(key, value);
    } else if (key == "inner_max_iters") {
      cfg.inner_max_iters = static_cast<int>(to_integer(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_integer(key, value));
    } else {
      rest.emplace(key, value);
    }
  }
  return rest;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void run_synth(const SynthOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  DataSet ds;
  if (opts.kind == 1) {
    if (opts.p && *opts.p != 3) throw ConfigError("synth kind 1 is three-dimensional");
    ds = synth1(opts.seed);
  } else if (opts.kind == 2) {
    if (!opts.p) throw ConfigError("synth kind 2 needs --p");
    if (!synth2_dimension_supported(*opts.p)) {
      throw ConfigError("synth kind 2: p must be one of 20, 30, ..., 100, got " +
                        std::to_string(*opts.p));
    }
    ds = opts.n_per_group > 0 ? synth2(*opts.p, opts.seed, opts.n_per_group)
                              : synth2(*opts.p, opts.seed);
  } else {
    throw ConfigError("synth kind must be 1 or 2");
  }
  write_csv(ds, opts.out);

  std::vector<std::pair<std::string, std::string>> entries = {
      {"command", "synth"},
      {"kind", std::to_string(opts.kind)},
      {"seed", std::to_string(opts.seed)},
      {"rows", std::to_string(ds.rows())},
      {"dim", std::to_string(ds.dim())},
      {"output", opts.out.string()},
  };
  if (opts.kind == 2) {
    entries.emplace_back("ambient_dim", std::to_string(kSynth2AmbientDim));
    entries.emplace_back("projection_scale", "1/sqrt(ambient_dim)");
    entries.emplace_back("covariance_scaling", "block_ar1_divided_by_spectral_norm_of_difference");
  }
  entries.emplace_back("version", kVersion);
  entries.emplace_back("runtime_seconds", num(seconds_since(start)));
  write_manifest(with_suffix(opts.out, ".manifest"), entries);
}

FitResult run_fit(const FitOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  opts.repms.validate();
  const DataSet raw = load_csv(opts.data, opts.protected_column, opts.outcome_column);
  raw.validate();
  if (opts.dim < 1 || opts.dim >= raw.dim()) {
    throw ConfigError("--dim must satisfy 1 <= d < p (p = " + std::to_string(raw.dim()) + ")");
  }

  const PreparedSplit data = standardized_split(raw, opts.train_fraction, opts.repms.seed);
  const PreparedProblem prepared = prepare_problem(data.train, opts.dim, opts.sigma);
  MethodRun run = run_method(prepared, data.train, data.test ? &*data.test : nullptr,
                             Method::MbfPca, opts.repms);
  run.report.config_echo.emplace_back("train_fraction", num(opts.train_fraction));

  {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + opts.out.string() + "' for writing");
    for (Eigen::Index j = 0; j < run.v.d(); ++j) out << (j ? "," : "") << "pc" << j + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < run.v.p(); ++i) {
      for (Eigen::Index j = 0; j < run.v.d(); ++j) {
        out << (j ? "," : "") << num(run.v.matrix()(i, j));
      }
      out << '\n';
    }
    if (!out) throw IoError("write to '" + opts.out.string() + "' failed");
  }
  const auto report_path = with_suffix(opts.out, ".report");
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + report_path.string() + "' for writing");
    out << run.report.to_key_value();
  }

  std::vector<std::pair<std::string, std::string>> entries = {
      {"command", "fit"},
      {"input", opts.data.string()},
      {"protected", opts.protected_column},
      {"outcome", opts.outcome_column.value_or("")},
      {"dim", std::to_string(opts.dim)},
      {"train_fraction", num(opts.train_fraction)},
      {"seed", std::to_string(opts.repms.seed)},
      {"sigma", num(prepared.problem.kernel.sigma)},
  };
  append_config(entries, opts.repms);
  entries.emplace_back("output.loadings", opts.out.string());
  entries.emplace_back("output.report", report_path.string());
  entries.emplace_back("version", kVersion);
  entries.emplace_back("runtime_seconds", num(seconds_since(start)));
  write_manifest(with_suffix(opts.out, ".manifest"), entries);

  return {std::move(run.report), run.v.matrix()};
}

CompareResult run_compare(const CompareOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  opts.repms.validate();
  if (opts.splits < 1) throw ConfigError("--splits must be >= 1");
  if (!(opts.train_fraction > 0.0 && opts.train_fraction < 1.0)) {
    throw ConfigError("compare needs a train fraction in (0, 1)");
  }
  const DataSet raw = load_csv(opts.data, opts.protected_column, opts.outcome_column);
  raw.validate();
  if (opts.dim < 1 || opts.dim >= raw.dim()) {
    throw ConfigError("--dim must satisfy 1 <= d < p (p = " + std::to_string(raw.dim()) + ")");
  }

  CompareResult result;
  for (int s = 0; s < opts.splits; ++s) {
    const std::uint64_t split_seed = opts.seed + static_cast<std::uint64_t>(s);
    const PreparedSplit data = standardized_split(raw, opts.train_fraction, split_seed);
    const PreparedProblem prepared = prepare_problem(data.train, opts.dim, opts.sigma);

    std::vector<FitReport> reports;
    RepmsConfig cfg = opts.repms;
    cfg.seed = split_seed;
    reports.push_back(
        run_method(prepared, data.train, &*data.test, Method::VanillaPca, cfg).report);
    for (const double tau : opts.taus) {
      cfg.tau = tau;
      reports.push_back(run_method(prepared, data.train, &*data.test, Method::MbfPca, cfg).report);
    }
    result.per_split.push_back(std::move(reports));
  }

  const std::size_t methods = result.per_split.front().size();
  for (std::size_t m = 0; m < methods; ++m) {
    SummaryRow row;
    row.method = result.per_split.front()[m].method;
    row.splits = opts.splits;
    std::map<std::string, std::vector<double>> samples;
    for (const auto& split_reports : result.per_split) {
      const FitReport& r = split_reports[m];
      if (r.status == "ProperTermination") ++row.proper_terminations;
      samples["explained_variance_pct"].push_back(r.explained_variance_pct);
      samples["mmd2_train"].push_back(r.mmd2_train);
      if (r.mmd2_test) samples["mmd2_test"].push_back(*r.mmd2_test);
      if (r.accuracy_pct) samples["accuracy_pct"].push_back(*r.accuracy_pct);
      if (r.delta_dp) samples["delta_dp"].push_back(*r.delta_dp);
    }
    for (const auto& [key, xs] : samples) {
      const auto n = static_cast<double>(xs.size());
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= n;
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      row.stats[key] = {mean, xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
    }
    result.summary.push_back(std::move(row));
  }

  static const char* kColumns[] = {"explained_variance_pct", "accuracy_pct", "mmd2_test",
                                   "delta_dp", "mmd2_train"};
  {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + opts.out.string() + "' for writing");
    out << "method,splits,proper_terminations";
    for (const char* c : kColumns) out << ',' << c << "_mean," << c << "_std";
    out << '\n';
    for (const auto& row : result.summary) {
      out << row.method << ',' << row.splits << ',' << row.proper_terminations;
      for (const char* c : kColumns) {
        const auto it = row.stats.find(c);
        if (it == row.stats.end()) {
          out << ",,";
        } else {
          out << ',' << num(it->second.first) << ',' << num(it->second.second);
        }
      }
      out << '\n';
    }
    if (!out) throw IoError("write to '" + opts.out.string() + "' failed");
  }
  const auto splits_path = with_suffix(opts.out, ".splits.csv");
  const auto comm_path = with_suffix(opts.out, ".communalities.csv");
  {
    std::ofstream out(splits_path, std::ios::binary);
    std::ofstream comm(comm_path, std::ios::binary);
    if (!out || !comm) throw IoError("cannot write per-split outputs next to " + opts.out.string());
    out << FitReport::csv_header() << '\n';
    comm << "split,method";
    for (const auto& name : raw.feature_names) comm << ',' << name;
    comm << '\n';
    for (std::size_t s = 0; s < result.per_split.size(); ++s) {
      for (const auto& r : result.per_split[s]) {
        out << r.csv_row(static_cast<int>(s)) << '\n';
        comm << s << ',' << r.method;
        for (Eigen::Index j = 0; j < r.communalities.size(); ++j) {
          comm << ',' << num(r.communalities(j));
        }
        comm << '\n';
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> entries = {
      {"command", "compare"},
      {"input", opts.data.string()},
      {"protected", opts.protected_column},
      {"outcome", opts.outcome_column.value_or("")},
      {"dim", std::to_string(opts.dim)},
      {"splits", std::to_string(opts.splits)},
      {"train_fraction", num(opts.train_fraction)},
      {"seed", std::to_string(opts.seed)},
      {"split_seeds", "seed+split_index"},
  };
  std::string taus;
  for (const double t : opts.taus) taus += (taus.empty() ? "" : ",") + num(t);
  entries.emplace_back("taus", taus);
  append_config(entries, opts.repms);
  entries.emplace_back("output.table", opts.out.string());
  entries.emplace_back("output.splits", splits_path.string());
  entries.emplace_back("output.communalities", comm_path.string());
  entries.emplace_back("version", kVersion);
  entries.emplace_back("runtime_seconds", num(seconds_since(start)));
  write_manifest(with_suffix(opts.out, ".manifest"), entries);
  return result;
}

}  // namespace mbfpca::cli
