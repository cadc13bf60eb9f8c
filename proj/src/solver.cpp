#include "mbfpca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "mbfpca/errors.hpp"

namespace mbfpca {

namespace {

// Absolute round-off level of a Q evaluation. h is a difference of three
// kernel averages bounded by 1, so its error scales with rho, not with h.
double q_noise_level(const PenaltyEvaluation& ev, double rho) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(ev.f) + 4.0 * rho + 1.0);
}

}  // namespace

void RepmsConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("RepmsConfig: " + msg); };
  if (max_outer_iters < 0) fail("K must be >= 0");
  if (!(eps_min > 0.0)) fail("eps_min must be > 0");
  if (!(eps_min <= eps0)) fail("eps_min must be <= eps0");
  if (!(theta_eps > 0.0 && theta_eps < 1.0)) fail("theta_eps must lie in (0, 1)");
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) fail("rho0 must be > 0");
  if (!(theta_rho > 1.0) || !std::isfinite(theta_rho)) fail("theta_rho must be > 1");
  if (!(rho_max >= rho0) || !std::isfinite(rho_max)) fail("rho_max must be finite and >= rho0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) fail("tau must be >= 0");
  if (!(d_min > 0.0)) fail("d_min must be > 0");
  if (inner_max_iters < 1) fail("inner_max_iters must be >= 1");
}

RepmsConfig default_config() {
  RepmsConfig cfg;
  cfg.max_outer_iters = 100;
  cfg.eps_min = 1e-6;
  cfg.eps0 = 1e-1;
  cfg.theta_eps = std::pow(cfg.eps_min / cfg.eps0, 1.0 / 5.0);
  cfg.rho_max = 1e10;
  cfg.theta_rho = 2.0;
  cfg.d_min = 1e-6;
  cfg.rho0 = 1.0;
  cfg.tau = 1e-5;
  cfg.inner_max_iters = 2000;
  cfg.seed = 0;
  return cfg;
}

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::ProperTermination:
      return "ProperTermination";
    case FitStatus::MaxIterationsReached:
      return "MaxIterationsReached";
  }
  return "Unknown";
}

InnerResult inner_solve(const PenaltyProblem& prob, const StiefelPoint& v_warm, double rho,
                        double eps, const RepmsConfig& cfg, const LineSearchParams& ls) {
  if (!(eps > 0.0)) throw InvalidArgument("inner_solve: eps must be > 0");
  if (!(rho > 0.0)) throw InvalidArgument("inner_solve: rho must be > 0");

  StiefelPoint v = v_warm;
  PenaltyEvaluation ev = evaluate_penalty(prob, v.matrix(), rho);
  Eigen::MatrixXd grad = riemannian_gradient(v, ev.euclidean_gradient).matrix;
  double grad_norm = grad.norm();
  if (!std::isfinite(grad_norm) || !std::isfinite(ev.q)) {
    throw SolverStall("inner_solve: non-finite objective at warm start", grad_norm, 0.0, 0);
  }

  InnerResult out{v, grad_norm, ev.q, 0, grad_norm <= eps, {ev.q}};
  if (out.converged) return out;

  double step = std::clamp(ls.initial_step > 0.0 ? ls.initial_step : 1.0 / grad_norm,
                           ls.min_step, ls.max_step);
  Eigen::MatrixXd prev_v;
  Eigen::MatrixXd prev_grad;

  for (int it = 1; it <= cfg.inner_max_iters; ++it) {
    if (it > 1) {
      // Barzilai-Borwein step from the last accepted move.
      const Eigen::MatrixXd s = v.matrix() - prev_v;
      const Eigen::MatrixXd y = grad - prev_grad;
      const double sy = std::abs((s.array() * y.array()).sum());
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, ls.min_step, ls.max_step);
    }

    const double first_step = step;
    const double slope = grad_norm * grad_norm;
    const TangentVector direction{-grad};
    bool accepted = false;
    for (int b = 0; b <= ls.max_backtracks; ++b, step *= ls.backtrack) {
      if (step < ls.min_step) break;
      std::optional<StiefelPoint> trial;
      try {
        trial = retract(v, direction, step);
      } catch (const RetractionFailure&) {
        continue;
      }
      PenaltyEvaluation trial_ev = evaluate_penalty(prob, trial->matrix(), rho);
      if (std::isfinite(trial_ev.q) && trial_ev.q <= ev.q - ls.armijo_c * step * slope) {
        prev_v = v.matrix();
        prev_grad = grad;
        v = std::move(*trial);
        ev = std::move(trial_ev);
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      // Backtracking cannot resolve a decrease below the evaluation noise of Q;
      // the iterate is stationary to working precision.
      if (ls.armijo_c * first_step * slope <= 1e3 * q_noise_level(ev, rho)) break;
      throw SolverStall("inner_solve: line search failed at ||grad Q|| = " +
                            std::to_string(grad_norm),
                        grad_norm, first_step, it);
    }

    grad = riemannian_gradient(v, ev.euclidean_gradient).matrix;
    grad_norm = grad.norm();
    out.iterations = it;
    out.q_trace.push_back(ev.q);
    if (grad_norm <= eps) break;
  }

  out.v = v;
  out.grad_norm = grad_norm;
  out.q = ev.q;
  out.converged = grad_norm <= eps;
  return out;
}

FitOutcome repms_fit(const PenaltyProblem& prob, const StiefelPoint& v0, const RepmsConfig& cfg) {
  cfg.validate();
  if (v0.p() != prob.p()) {
    throw InvalidArgument("repms_fit: initial point has " + std::to_string(v0.p()) +
                          " rows, problem has p = " + std::to_string(prob.p()));
  }

  StiefelPoint v = v0;
  double rho = cfg.rho0;
  double eps = cfg.eps0;
  std::vector<IterationRecord> history;

  for (int k = 0; k <= cfg.max_outer_iters; ++k) {
    InnerResult inner = inner_solve(prob, v, rho, eps, cfg);
    StiefelPoint next = std::move(inner.v);
    if (next.orthonormality_error() > kStiefelTolerance) {
      next = StiefelPoint::from_qr(next.matrix());
    }

    const double h = constraint_h(prob, next);
    const double step = (next.matrix() - v.matrix()).norm();
    history.push_back({k, rho, eps, objective_f(prob, next), h, inner.grad_norm, step,
                       inner.iterations, next.orthonormality_error()});

    if (step <= cfg.d_min && eps <= cfg.eps_min && h <= cfg.tau) {
      return {std::move(next), FitStatus::ProperTermination, std::move(history)};
    }
    eps = std::max(cfg.eps_min, cfg.theta_eps * eps);
    if (h > cfg.tau) rho = std::min(cfg.theta_rho * rho, cfg.rho_max);
    v = std::move(next);
  }
  return {std::move(v), FitStatus::MaxIterationsReached, std::move(history)};
}

}  // namespace mbfpca
