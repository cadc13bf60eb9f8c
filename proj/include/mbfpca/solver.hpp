#pragma once

#include <cstdint>
#include <vector>

#include "mbfpca/objective.hpp"
#include "mbfpca/stiefel.hpp"

namespace mbfpca {

/// Hyperparameters of the exact penalty loop and its inner solver.
struct RepmsConfig {
  int max_outer_iters = 100;  // K; the loop runs k = 0..K
  double eps0 = 1e-1;
  double eps_min = 1e-6;
  double theta_eps = 1e-1;
  double rho0 = 1.0;
  double theta_rho = 2.0;
  double rho_max = 1e10;
  double tau = 1e-5;
  double d_min = 1e-6;
  int inner_max_iters = 2000;
  std::uint64_t seed = 0;

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// K=100, eps_min=1e-6, eps0=1e-1, theta_eps=(eps_min/eps0)^(1/5),
/// rho_max=1e10, theta_rho=2, d_min=1e-6, rho0=1, tau=1e-5.
RepmsConfig default_config();

/// Line-search constants of the inner Riemannian gradient descent.
struct LineSearchParams {
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double min_step = 1e-14;
  double max_step = 1e12;
  /// First trial step; 0 means 1 / ||grad Q|| at the warm start.
  double initial_step = 0.0;
};

struct InnerResult {
  StiefelPoint v;
  double grad_norm;
  double q;
  int iterations;
  bool converged;  // grad_norm <= eps
  /// Q at every accepted iterate, starting with the warm start.
  std::vector<double> q_trace;
};

/// Riemannian gradient descent on Q(., rho) from v_warm until
/// ||grad Q||_F <= eps or cfg.inner_max_iters steps. Steps are chosen by a
/// Barzilai-Borwein guess followed by Armijo backtracking, so Q never
/// increases. Throws SolverStall if backtracking fails at a point whose
/// gradient is still resolvable.
InnerResult inner_solve(const PenaltyProblem& prob, const StiefelPoint& v_warm, double rho,
                        double eps, const RepmsConfig& cfg, const LineSearchParams& ls = {});

enum class FitStatus { ProperTermination, MaxIterationsReached };

const char* to_string(FitStatus status);

/// One outer iteration k: the sub-problem was solved with (rho, eps) and
/// produced V_{k+1}.
struct IterationRecord {
  int k;
  double rho;
  double eps;
  double f;         // f(V_{k+1})
  double h;         // h(V_{k+1})
  double grad_norm; // ||grad Q(V_{k+1}, rho)||
  double step;      // ||V_{k+1} - V_k||_F
  int inner_iterations;
  double orthonormality_error;
};

struct FitOutcome {
  StiefelPoint v;
  FitStatus status;
  std::vector<IterationRecord> history;
};

/// Exact penalty loop: solve the penalized sub-problem, stop once the
/// iterates and tolerance have settled and h <= tau, otherwise shrink eps and
/// double rho while h > tau.
FitOutcome repms_fit(const PenaltyProblem& prob, const StiefelPoint& v0, const RepmsConfig& cfg);

}  // namespace mbfpca
