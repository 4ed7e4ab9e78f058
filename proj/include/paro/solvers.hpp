#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "paro/losses.hpp"
#include "paro/prox.hpp"

namespace paro {

// Invoked with the start point (iter 0) and every accepted iterate. ADMM
// reports its z sequence. Used by the experiment runners to track quantities
// the trace does not carry, like the objective after hard quantization.
using IterateObserver = std::function<void(int iter, const Eigen::VectorXd& x)>;

enum class MomentumRule { nesterov_t, constant };

struct SolverConfig {
  int max_iters = 1000;
  double step_init = 1.0;  // eta_0; the fixed step when line_search is off
  bool line_search = true;
  double backtrack_factor = 0.5;
  double sufficient_decrease_const = 0.25;
  MomentumRule momentum_rule = MomentumRule::nesterov_t;
  double momentum_beta = 0.0;    // used by MomentumRule::constant
  bool momentum_restart = true;  // beta := 0 for one step after F increases
  double admm_rho = 1.0;
  double tol_residual = 1e-8;
  std::uint64_t seed = 0;
  int trace_every = 1;      // rows recorded every k-th iteration, plus the last
  int crit_every = 10;      // criticality residual sampled every k-th row
  double qrate_tol = 1e-6;  // snap tolerance for the trace's qrate column
};

struct TraceRow {
  int iter = 0;
  double F = 0.0;
  double f = 0.0;
  double psi = 0.0;  // unweighted penalty sum
  double eta = 0.0;  // accepted step size (0 where not meaningful)
  double step_norm = 0.0;
  double qrate = 0.0;
  double crit_residual = 0.0;
  bool has_crit = false;
};

struct IterateTrace {
  std::vector<TraceRow> rows;
};

struct CriticalityReport {
  double residual = 0.0;  // max over coordinates
  Eigen::VectorXd per_coordinate;
  bool is_critical = false;
};

struct SolveResult {
  Eigen::VectorXd solution;
  IterateTrace trace;
  int iters = 0;
  bool converged = false;
};

// Proximal gradient: x <- prox_{eta lambda Psi}(x - eta grad f(x)). With line
// search on, eta_t is the largest step_init * backtrack_factor^j satisfying
// F(x+) <= F(x) - (c/eta)||x+ - x||^2, c = sufficient_decrease_const. With
// line search off, step_init must satisfy eta <= 1/(2L). Stops when the step
// norm drops to tol_residual.
SolveResult proximal_gradient(const CompositeProblem& problem,
                              const SolverConfig& config,
                              const Eigen::VectorXd& x0 = Eigen::VectorXd(),
                              const IterateObserver& observer = {});

// Momentum variant: y = x_t + beta_t (x_t - x_{t-1}) with beta_t = (t-1)/(t+2)
// (or a constant), prox step taken from y. Line search backtracks on the
// quadratic upper model of f at y, which stays usable when y leaves the domain
// of a capped penalty. Fixed steps require eta <= 1/L. Optional restart:
// whenever the momentum step would increase the objective, the candidate is
// discarded and the step redone from x_t with beta = 0 (a plain descent
// step), so the recorded objective never increases.
SolveResult accelerated_proximal_gradient(
    const CompositeProblem& problem, const SolverConfig& config,
    const Eigen::VectorXd& x0 = Eigen::VectorXd(),
    const IterateObserver& observer = {});

// Splitting x - z with scaled dual y: the x-step minimizes
// f(x) + (rho/2)||x - z + y||^2 (closed form for least squares via a cached
// factorization, damped Newton for logistic), the z-step is the prox of
// (lambda/rho) Psi at x + y, then y += x - z. Stops when
// max(||x - z||_inf, rho ||z_t - z_{t-1}||_inf) <= tol_residual. Returns z.
SolveResult admm(const CompositeProblem& problem, const SolverConfig& config,
                 const Eigen::VectorXd& x0 = Eigen::VectorXd(),
                 const IterateObserver& observer = {});

// First-order criticality: residual_i = max(0, g_i + lambda*lo_i,
// -g_i - lambda*hi_i) with [lo_i, hi_i] the penalty subgradient interval at
// x_i, zero iff -g_i lands inside lambda [lo_i, hi_i]. Coordinates within
// 1e-9 of a level are snapped onto it before the interval is read off.
CriticalityReport check_criticality(const CompositeProblem& problem,
                                    const Eigen::VectorXd& x, double tol);

}  // namespace paro
