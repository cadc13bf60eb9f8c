// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "mbfpca/data.hpp"
#include "mbfpca/kernel.hpp"
#include "mbfpca/metrics.hpp"
#include "mbfpca/objective.hpp"
#include "mbfpca/pca.hpp"
#include "mbfpca/pipeline.hpp"
#include "mbfpca/solver.hpp"
#include "mbfpca/stiefel.hpp"
#include "oracles.hpp"

using namespace mbfpca;
using testing::gaussian_matrix;
using testing::random_orthonormal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Everything later criteria need from the fits.
struct FitRecord {
  std::string label;
  double pca_var = 0.0;
  double fair_var = 0.0;
  FitOutcome outcome;
  double reported_h = 0.0;
  RepmsConfig cfg;
};
std::vector<FitRecord> fits;

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst_orth = 0.0, worst_tan = 0.0, worst_idem = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const int p = uniform_int(rng, 2, 50);
    const int d = uniform_int(rng, 1, std::min(10, p - 1));
    const StiefelPoint v(random_orthonormal(rng, p, d));
    const Eigen::MatrixXd g = gaussian_matrix(rng, p, d, 1.0);
    const TangentVector xi = tangent_project(v, g);
    const TangentVector again = tangent_project(v, xi.matrix);
    worst_tan = std::max(worst_tan, xi.tangency_residual(v));
    worst_idem = std::max(worst_idem, (again.matrix - xi.matrix).norm());
    const double t = uniform_real(rng, 0.0, 2.0);
    const StiefelPoint w = retract(v, xi, t);
    worst_orth = std::max(worst_orth, w.orthonormality_error());
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_orth <= 1e-10 && worst_tan <= 1e-12 && worst_idem <= 1e-12 && secs < 5.0;
  report(1, ok,
         "manifold invariants, 1000 cases: max |V'V-I|_F=" + fmt("%.2e", worst_orth) +
             " (<=1e-10), tangency=" + fmt("%.2e", worst_tan) + " idempotence=" +
             fmt("%.2e", worst_idem) + " (<=1e-12), " + fmt("%.2f", secs) + " s (<5)");
}

void criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const int dim = uniform_int(rng, 1, 5);
    const Eigen::MatrixXd x = gaussian_matrix(rng, uniform_int(rng, 1, 30), dim, 1.0);
    Eigen::MatrixXd y = gaussian_matrix(rng, uniform_int(rng, 1, 30), dim, 1.5);
    y.array() += uniform_real(rng, -1.0, 1.0);
    const double sigma = uniform_real(rng, 0.3, 3.0);
    const double got = mmd_squared(GroupedSamples{x, y}, KernelConfig{sigma, BandwidthSelection::Manual});
    worst = std::max(worst, std::abs(got - testing::naive_mmd2(x, y, sigma)));
  }
  const double secs = seconds_since(t0);
  report(2, worst <= 1e-12 && secs < 5.0,
         "MMD^2 vs double-loop oracle, 200 instances: max abs diff=" + fmt("%.2e", worst) +
             " (<=1e-12), " + fmt("%.2f", secs) + " s (<5)");
}

void criterion3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  double worst_h = 0.0, worst_f = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int p = uniform_int(rng, 2, 10);
    const int d = uniform_int(rng, 1, std::min(3, p - 1));
    const Eigen::MatrixXd x = gaussian_matrix(rng, uniform_int(rng, 2, 20), p, 1.0);
    Eigen::MatrixXd y = gaussian_matrix(rng, uniform_int(rng, 2, 20), p, 1.3);
    y.array() += 0.5;
    const double sigma = uniform_real(rng, 0.5, 2.0);
    const KernelConfig kcfg{sigma, BandwidthSelection::Manual};
    const Eigen::MatrixXd v = random_orthonormal(rng, p, d);

    const Eigen::MatrixXd grad_h = mmd_squared_value_and_gradient(v, x, y, kcfg).gradient;
    const Eigen::MatrixXd fd_h = testing::finite_difference(
        [&](const Eigen::MatrixXd& w) { return testing::naive_mmd2(x * w, y * w, sigma); }, v, 1e-5);
    worst_h = std::max(worst_h, testing::relative_error(grad_h, fd_h));

    Eigen::MatrixXd pooled(x.rows() + y.rows(), p);
    pooled << x, y;
    const PenaltyProblem prob(Covariance::from_data(pooled), x, y, kcfg);
    const Eigen::MatrixXd grad_f = objective_f_gradient(prob, v);
    const Eigen::MatrixXd s = prob.covariance.matrix();
    const Eigen::MatrixXd fd_f = testing::finite_difference(
        [&](const Eigen::MatrixXd& w) { return -testing::naive_trace_form(s, w); }, v, 1e-5);
    worst_f = std::max(worst_f, testing::relative_error(grad_f, fd_f));
  }
  const double secs = seconds_since(t0);
  report(3, worst_h <= 1e-5 && worst_f <= 1e-6 && secs < 30.0,
         "gradients vs central differences, 50 instances: grad h rel err=" + fmt("%.2e", worst_h) +
             " (<=1e-5), grad f rel err=" + fmt("%.2e", worst_f) + " (<=1e-6), " +
             fmt("%.2f", secs) + " s (<30)");
}

void criterion4() {
  const Covariance diag(Eigen::Vector3d(3, 2, 1).asDiagonal().toDenseMatrix());
  const double var = explained_variance(diag, vanilla_pca(diag, 2));
  const double diag_err = std::abs(var - 250.0 / 3.0);

  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int p = uniform_int(rng, 2, 30);
    const int d = uniform_int(rng, 1, p - 1);
    const Eigen::MatrixXd a = gaussian_matrix(rng, p + 5, p, 1.0);
    const Covariance sigma(a.transpose() * a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.matrix());
    const Eigen::VectorXd ev = es.eigenvalues().reverse();
    const double want = 100.0 * ev.head(d).sum() / ev.sum();
    worst = std::max(worst, std::abs(explained_variance(sigma, vanilla_pca(sigma, d)) - want));
  }
  report(4, diag_err <= 1e-6 && worst <= 1e-8,
         "PCA on diag(3,2,1), d=2: %Var=" + fmt("%.9f", var) + " (83.333333 +- 1e-6); random PSD " +
             "top-d mass max diff=" + fmt("%.2e", worst) + " (<=1e-8)");
}

struct SplitRun {
  MethodRun pca;
  MethodRun fair;
  double fair_seconds;
};

SplitRun fit_split(const DataSet& raw, std::uint64_t seed, const RepmsConfig& cfg,
                   const std::string& label) {
  auto [train, test] = split(raw, SplitSpec{0.7, seed});
  const DataSet train_z = standardize(train);
  const DataSet test_z = apply_standardization(test, *train_z.standardization);
  const PreparedProblem prep = prepare_problem(train_z, 2);
  RepmsConfig c = cfg;
  c.seed = seed;
  MethodRun pca = run_method(prep, train_z, &test_z, Method::VanillaPca, c);
  const auto t0 = Clock::now();
  MethodRun fair = run_method(prep, train_z, &test_z, Method::MbfPca, c);
  const double secs = seconds_since(t0);
  fits.push_back({label, pca.report.explained_variance_pct, fair.report.explained_variance_pct,
                  *fair.outcome, fair.report.mmd2_train, c});
  return {std::move(pca), std::move(fair), secs};
}

void criterion5() {
  const auto t0 = Clock::now();
  const RepmsConfig cfg = default_config();
  int successes = 0;
  bool reduction_ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SplitRun r = fit_split(synth1(seed), seed, cfg, "synth1 seed " + std::to_string(seed));
    const bool proper = r.fair.outcome->status == FitStatus::ProperTermination;
    const bool success = proper && r.fair.report.mmd2_train <= 1e-5;
    const double ratio = *r.fair.report.mmd2_test / *r.pca.report.mmd2_test;
    if (success) {
      ++successes;
      if (ratio > 0.1) reduction_ok = false;
    }
    std::printf("  synth1 seed %d: %s, train MMD^2 %.3e (PCA %.3e), test MMD^2 ratio %.3f\n",
                static_cast<int>(seed), to_string(r.fair.outcome->status), r.fair.report.mmd2_train,
                r.pca.report.mmd2_train, ratio);
  }
  const double secs = seconds_since(t0);
  report(5, successes >= 8 && reduction_ok && secs < 120.0,
         "synthetic #1, 10 runs, tau=1e-5: " + std::to_string(successes) +
             "/10 ProperTermination with train MMD^2<=1e-5 (need >=8); test MMD^2 <= 0.1 x PCA in "
             "every success: " +
             (reduction_ok ? "yes" : "no") + ", " + fmt("%.1f", secs) + " s (<120)");
}

void criterion6() {
  const RepmsConfig cfg = default_config();
  bool ok = true;
  std::string detail = "synthetic #2, n=240/group, 10 splits:";
  double slowest40 = 0.0;
  for (const Eigen::Index p : {20, 40}) {
    const DataSet raw = synth2(p, static_cast<std::uint64_t>(p), 240);
    int wins = 0;
    bool var_ok = true;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const SplitRun r = fit_split(raw, s, cfg, "synth2 p=" + std::to_string(p) + " split " + std::to_string(s));
      if (*r.fair.report.mmd2_test < *r.pca.report.mmd2_test) ++wins;
      if (!(r.fair.report.explained_variance_pct > 0.0)) var_ok = false;
      if (p == 40) slowest40 = std::max(slowest40, r.fair_seconds);
      std::printf("  synth2 p=%d split %d: %s, test MMD^2 %.3e vs PCA %.3e, %%Var %.2f vs %.2f, %.1f s\n",
                  static_cast<int>(p), static_cast<int>(s), to_string(r.fair.outcome->status),
                  *r.fair.report.mmd2_test, *r.pca.report.mmd2_test,
                  r.fair.report.explained_variance_pct, r.pca.report.explained_variance_pct,
                  r.fair_seconds);
    }
    ok = ok && wins >= 8 && var_ok;
    detail += " p=" + std::to_string(p) + " wins " + std::to_string(wins) + "/10 (need >=8), %Var>0 " +
              (var_ok ? "yes" : "no") + ";";
  }
  ok = ok && slowest40 < 60.0;
  report(6, ok, detail + " slowest p=40 fit " + fmt("%.1f", slowest40) + " s (<60)");
}

void criterion7() {
  // (a) and (c) over every fit so far.
  int var_bad = 0, proper_bad = 0;
  for (const auto& f : fits) {
    if (f.fair_var > f.pca_var + 1e-8) ++var_bad;
    if (f.outcome.status == FitStatus::ProperTermination && !(f.reported_h <= f.cfg.tau)) ++proper_bad;
  }

  // (b) same split, same initialization, two tolerances.
  int monotone_bad = 0, pairs = 0;
  auto check_pair = [&](const DataSet& raw, std::uint64_t seed) {
    auto [train, test] = split(raw, SplitSpec{0.7, seed});
    const DataSet train_z = standardize(train);
    const PreparedProblem prep = prepare_problem(train_z, 2);
    RepmsConfig loose = default_config();
    loose.tau = 1e-3;
    RepmsConfig tight = loose;
    tight.tau = 1e-6;
    const MethodRun a = run_method(prep, train_z, nullptr, Method::MbfPca, loose);
    const MethodRun b = run_method(prep, train_z, nullptr, Method::MbfPca, tight);
    fits.push_back({"tau 1e-3", 0, 0, *a.outcome, a.report.mmd2_train, loose});
    fits.push_back({"tau 1e-6", 0, 0, *b.outcome, b.report.mmd2_train, tight});
    for (const auto* r : {&a, &b}) {
      const auto& cfg = r == &a ? loose : tight;
      if (r->outcome->status == FitStatus::ProperTermination && !(r->report.mmd2_train <= cfg.tau)) {
        ++proper_bad;
      }
    }
    ++pairs;
    if (b.report.mmd2_train > a.report.mmd2_train) ++monotone_bad;
    std::printf("  tau pair %d: train MMD^2 %.3e (1e-3) -> %.3e (1e-6)\n", pairs, a.report.mmd2_train,
                b.report.mmd2_train);
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) check_pair(synth1(seed), seed);
  const DataSet s2 = synth2(20, 20, 240);
  for (std::uint64_t seed = 0; seed < 2; ++seed) check_pair(s2, seed);

  report(7, var_bad == 0 && monotone_bad == 0 && proper_bad == 0,
         "(a) %Var above PCA in " + std::to_string(var_bad) + " fits; (b) tau 1e-3 -> 1e-6 raised train " +
             "MMD^2 in " + std::to_string(monotone_bad) + "/" + std::to_string(pairs) +
             " pairs; (c) ProperTermination with h > tau in " + std::to_string(proper_bad) + " fits");
}

void criterion8() {
  int violations = 0;
  std::size_t records = 0;
  for (const auto& f : fits) {
    const auto& h = f.outcome.history;
    const auto& cfg = f.cfg;
    if (h.empty() || h.front().rho != cfg.rho0 || h.front().eps != cfg.eps0) ++violations;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      const double want_eps = std::max(cfg.eps_min, cfg.theta_eps * h[k].eps);
      const double want_rho = h[k].h > cfg.tau ? std::min(cfg.theta_rho * h[k].rho, cfg.rho_max) : h[k].rho;
      if (h[k + 1].eps != want_eps || h[k + 1].rho != want_rho) ++violations;
    }
    records += h.size();
  }
  report(8, violations == 0 && !fits.empty(),
         "schedule replay over " + std::to_string(fits.size()) + " fits / " + std::to_string(records) +
             " outer iterations: " + std::to_string(violations) + " exact-equality violations");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  void (*const criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                                criterion5, criterion6, criterion7, criterion8};
  for (int i = 0; i < 8; ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(i + 1, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of 8 criteria failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
