// Command-line front end: synth, fit and compare.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mbfpca/cli.hpp"
#include "mbfpca/errors.hpp"

namespace {

using mbfpca::cli::CompareOptions;
using mbfpca::cli::FitOptions;
using mbfpca::cli::SynthOptions;

// Values shared by fit and compare, collected before they are resolved
// against an optional config file.
struct CommonFlags {
  std::string data;
  std::string protected_column = "protected";
  std::string outcome_column;
  std::string config;
  std::string out;
  long long dim = 2;
  double tau = 1e-5;
  unsigned long long seed = 0;
  double train_frac = 0.7;
  double sigma = 0.0;
  int max_outer = 100;
  int inner_max_iters = 2000;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--data", f.data, "Input CSV (header row, 0/1 protected column)")->required();
  app->add_option("--protected", f.protected_column, "Protected attribute column");
  app->add_option("--outcome", f.outcome_column, "Binary outcome column (enables %Acc and Delta_DP)");
  app->add_option("--dim", f.dim, "Target dimension d");
  app->add_option("--seed", f.seed, "Seed for splits");
  app->add_option("--train-frac", f.train_frac, "Training fraction");
  app->add_option("--sigma", f.sigma, "RBF bandwidth (overrides the median heuristic)");
  app->add_option("--max-outer", f.max_outer, "Outer iteration cap K");
  app->add_option("--inner-max-iters", f.inner_max_iters, "Inner iteration cap");
  app->add_option("--config", f.config, "key=value file; flags take precedence");
  app->add_option("-o,--out", f.out, "Output path")->required();
}

bool given(const CLI::App* app, const std::string& flag) { return app->count(flag) > 0; }

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw mbfpca::ConfigError("config key '" + key + "' is not a number");
  return v;
}

// Layering: defaults < config file < explicit flags.
template <typename Options>
void resolve_common(const CLI::App* app, const CommonFlags& f, Options& o,
                    std::map<std::string, std::string>* leftovers) {
  o.data = f.data;
  o.out = f.out;
  o.protected_column = f.protected_column;
  if (!f.outcome_column.empty()) o.outcome_column = f.outcome_column;

  std::map<std::string, std::string> rest;
  if (!f.config.empty()) {
    rest = mbfpca::cli::apply_solver_overrides(mbfpca::cli::parse_config_file(f.config), o.repms);
  }
  for (auto it = rest.begin(); it != rest.end();) {
    const auto& [key, value] = *it;
    if (key == "dim") {
      o.dim = std::stoll(value);
    } else if (key == "train_frac") {
      o.train_fraction = to_double(key, value);
    } else if (key == "sigma") {
      o.sigma = to_double(key, value);
    } else if (key == "protected" && !given(app, "--protected")) {
      o.protected_column = value;
    } else if (key == "outcome" && !given(app, "--outcome")) {
      o.outcome_column = value;
    } else {
      ++it;
      continue;
    }
    it = rest.erase(it);
  }

  if (given(app, "--dim")) o.dim = f.dim;
  if (given(app, "--tau")) o.repms.tau = f.tau;
  if (given(app, "--seed")) o.repms.seed = f.seed;
  if (given(app, "--train-frac")) o.train_fraction = f.train_frac;
  if (given(app, "--sigma")) o.sigma = f.sigma;
  if (given(app, "--max-outer")) o.repms.max_outer_iters = f.max_outer;
  if (given(app, "--inner-max-iters")) o.repms.inner_max_iters = f.inner_max_iters;
  if (leftovers != nullptr) *leftovers = std::move(rest);
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_report(const mbfpca::FitReport& r) {
  std::cout << r.method << "  status=" << r.status << "  %Var=" << g6(r.explained_variance_pct)
            << "  MMD2(train)=" << g6(r.mmd2_train);
  if (r.mmd2_test) std::cout << "  MMD2(test)=" << g6(*r.mmd2_test);
  if (r.accuracy_pct) std::cout << "  %Acc=" << g6(*r.accuracy_pct);
  if (r.delta_dp) std::cout << "  DeltaDP=" << g6(*r.delta_dp);
  std::cout << "  outer_iters=" << r.outer_iterations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair PCA with an MMD constraint, solved on the Stiefel manifold"};
  app.require_subcommand(1);

  SynthOptions synth;
  long long synth_p = 0;
  unsigned long long synth_seed = 0;
  long long synth_n = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--kind", synth.kind, "1 (three-dimensional) or 2 (AR(1) blocks)")
      ->required();
  synth_cmd->add_option("--p", synth_p, "Dimension for kind 2 (20, 30, ..., 100)");
  synth_cmd->add_option("--seed", synth_seed, "RNG seed");
  synth_cmd->add_option("--n-per-group", synth_n, "Rows per group for kind 2 (default 250)");
  synth_cmd->add_option("-o,--out", synth.out, "Output CSV")->required();

  CommonFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Fit fair PCA loadings on one train/test split");
  add_common(fit_cmd, fit_flags);
  fit_cmd->add_option("--tau", fit_flags.tau, "Fairness tolerance on MMD^2");

  CommonFlags cmp_flags;
  std::vector<double> taus = {1e-3, 1e-6};
  int splits = 10;
  auto* cmp_cmd = app.add_subcommand("compare", "PCA vs fair PCA over repeated splits");
  add_common(cmp_cmd, cmp_flags);
  cmp_cmd->add_option("--tau", taus, "Fairness tolerances (one MbF-PCA row each)");
  cmp_cmd->add_option("--splits", splits, "Number of train/test splits");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      if (given(synth_cmd, "--p")) synth.p = synth_p;
      synth.seed = synth_seed;
      synth.n_per_group = synth_n;
      mbfpca::cli::run_synth(synth);
      std::cout << "wrote " << synth.out.string() << '\n';
    } else if (*fit_cmd) {
      FitOptions opts;
      resolve_common(fit_cmd, fit_flags, opts, nullptr);
      const auto result = mbfpca::cli::run_fit(opts);
      print_report(result.report);
      std::cout << "wrote " << opts.out.string() << '\n';
    } else if (*cmp_cmd) {
      CompareOptions opts;
      std::map<std::string, std::string> rest;
      resolve_common(cmp_cmd, cmp_flags, opts, &rest);
      opts.seed = opts.repms.seed;
      if (auto it = rest.find("splits"); it != rest.end()) opts.splits = std::stoi(it->second);
      if (given(cmp_cmd, "--splits")) opts.splits = splits;
      opts.taus = taus;
      const auto result = mbfpca::cli::run_compare(opts);
      for (const auto& row : result.summary) {
        std::cout << row.method << "  proper=" << row.proper_terminations << "/" << row.splits;
        for (const auto& [key, ms] : row.stats) {
          std::cout << "  " << key << "=" << g6(ms.first) << "(" << g6(ms.second) << ")";
        }
        std::cout << '\n';
      }
      std::cout << "wrote " << opts.out.string() << '\n';
    }
  } catch (const mbfpca::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
