#include "paro/solvers.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace paro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_config(const SolverConfig& cfg) {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("solver config: " + what);
  };
  if (!(cfg.max_iters >= 1)) bad("max_iters must be >= 1");
  if (!(std::isfinite(cfg.step_init) && cfg.step_init > 0.0)) bad("step_init must be > 0");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0))
    bad("backtrack_factor must lie in (0,1)");
  if (!(cfg.sufficient_decrease_const > 0.0)) bad("sufficient_decrease_const must be > 0");
  if (!(std::isfinite(cfg.admm_rho) && cfg.admm_rho > 0.0)) bad("admm_rho must be > 0");
  if (!(cfg.tol_residual >= 0.0)) bad("tol_residual must be >= 0");
  if (!(cfg.trace_every >= 1)) bad("trace_every must be >= 1");
  if (!(cfg.crit_every >= 1)) bad("crit_every must be >= 1");
  if (!(cfg.qrate_tol > 0.0)) bad("qrate_tol must be > 0");
}

void validate_problem(const CompositeProblem& problem) {
  if (!(problem.lambda >= 0.0) || !std::isfinite(problem.lambda))
    throw std::invalid_argument("solver: lambda must be finite and >= 0");
}

Eigen::VectorXd start_point(const CompositeProblem& problem,
                            const Eigen::VectorXd& x0) {
  const Eigen::Index d = loss_dim(problem.loss);
  if (x0.size() == 0) return Eigen::VectorXd::Zero(d);
  if (x0.size() != d) throw std::invalid_argument("solver: x0 dimension mismatch");
  return x0;
}

double qrate_of(const ParSpec& par, const Eigen::VectorXd& x, double tol) {
  std::vector<double> v(x.data(), x.data() + x.size());
  return quantization_rate(v, par, tol).rate;
}

struct ObjectiveParts {
  double f = 0.0;
  double psi = 0.0;
  double F = 0.0;
};

ObjectiveParts eval_parts(const CompositeProblem& problem,
                          const Eigen::VectorXd& x) {
  ObjectiveParts p;
  p.f = loss_eval(problem.loss, x);
  p.psi = penalty_value(problem.par, x);
  p.F = problem.lambda == 0.0 ? p.f : p.f + problem.lambda * p.psi;
  return p;
}

void push_row(IterateTrace* trace, const CompositeProblem& problem,
              const SolverConfig& cfg, int iter, const ObjectiveParts& parts,
              double eta, double step_norm, const Eigen::VectorXd& x) {
  TraceRow r;
  r.iter = iter;
  r.F = parts.F;
  r.f = parts.f;
  r.psi = parts.psi;
  r.eta = eta;
  r.step_norm = step_norm;
  r.qrate = qrate_of(problem.par, x, cfg.qrate_tol);
  if (iter % cfg.crit_every == 0) {
    r.crit_residual = check_criticality(problem, x, cfg.tol_residual).residual;
    r.has_crit = true;
  }
  trace->rows.push_back(r);
}

void finish_trace(IterateTrace* trace, const CompositeProblem& problem,
                  const SolverConfig& cfg, const Eigen::VectorXd& x) {
  if (trace->rows.empty() || trace->rows.back().has_crit) return;
  trace->rows.back().crit_residual =
      check_criticality(problem, x, cfg.tol_residual).residual;
  trace->rows.back().has_crit = true;
}

}  // namespace

SolveResult proximal_gradient(const CompositeProblem& problem,
                              const SolverConfig& config,
                              const Eigen::VectorXd& x0,
                              const IterateObserver& observer) {
  validate_config(config);
  validate_problem(problem);
  Eigen::VectorXd x = start_point(problem, x0);
  ObjectiveParts cur = eval_parts(problem, x);
  if (!std::isfinite(cur.F))
    throw std::invalid_argument("pg: objective is not finite at the start point");
  if (!config.line_search) {
    const double L = lipschitz_bound(problem.loss);
    if (L > 0.0 && config.step_init > (1.0 + 1e-9) * 0.5 / L)
      throw std::invalid_argument("pg: fixed step exceeds 1/(2L)");
  }

  SolveResult out;
  push_row(&out.trace, problem, config, 0, cur, 0.0, 0.0, x);
  if (observer) observer(0, x);
  const double c = config.sufficient_decrease_const;
  for (int t = 1; t <= config.max_iters; ++t) {
    Eigen::VectorXd g;
    loss_eval(problem.loss, x, &g);
    double eta = config.step_init;
    Eigen::VectorXd xc;
    ObjectiveParts next;
    if (config.line_search) {
      int backtracks = 0;
      for (;;) {
        xc = prox_vector(problem.par, eta * problem.lambda, x - eta * g);
        next = eval_parts(problem, xc);
        if (next.F <= cur.F - (c / eta) * (xc - x).squaredNorm()) break;
        if (++backtracks > 60)
          throw std::runtime_error("pg: line search exhausted 60 backtracks");
        eta *= config.backtrack_factor;
      }
    } else {
      xc = prox_vector(problem.par, eta * problem.lambda, x - eta * g);
      next = eval_parts(problem, xc);
    }
    const double step = (xc - x).norm();
    x = std::move(xc);
    cur = next;
    out.iters = t;
    const bool stop = step <= config.tol_residual;
    if (t % config.trace_every == 0 || stop || t == config.max_iters)
      push_row(&out.trace, problem, config, t, cur, eta, step, x);
    if (observer) observer(t, x);
    if (stop) {
      out.converged = true;
      break;
    }
  }
  finish_trace(&out.trace, problem, config, x);
  out.solution = std::move(x);
  return out;
}

SolveResult accelerated_proximal_gradient(const CompositeProblem& problem,
                                          const SolverConfig& config,
                                          const Eigen::VectorXd& x0,
                                          const IterateObserver& observer) {
  validate_config(config);
  validate_problem(problem);
  Eigen::VectorXd x = start_point(problem, x0);
  Eigen::VectorXd x_prev = x;
  ObjectiveParts cur = eval_parts(problem, x);
  if (!std::isfinite(cur.F))
    throw std::invalid_argument("apg: objective is not finite at the start point");
  if (!config.line_search) {
    const double L = lipschitz_bound(problem.loss);
    if (L > 0.0 && config.step_init > (1.0 + 1e-9) / L)
      throw std::invalid_argument("apg: fixed step exceeds 1/L");
  }

  SolveResult out;
  push_row(&out.trace, problem, config, 0, cur, 0.0, 0.0, x);
  if (observer) observer(0, x);
  const auto take_step = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd gy;
    const double fy = loss_eval(problem.loss, y, &gy);
    double eta = config.step_init;
    Eigen::VectorXd xc;
    if (config.line_search) {
      int backtracks = 0;
      for (;;) {
        xc = prox_vector(problem.par, eta * problem.lambda, y - eta * gy);
        const Eigen::VectorXd dy = xc - y;
        const double model = fy + gy.dot(dy) + dy.squaredNorm() / (2.0 * eta);
        if (loss_eval(problem.loss, xc) <= model) break;
        if (++backtracks > 60)
          throw std::runtime_error("apg: line search exhausted 60 backtracks");
        eta *= config.backtrack_factor;
      }
    } else {
      xc = prox_vector(problem.par, eta * problem.lambda, y - eta * gy);
    }
    return std::make_pair(std::move(xc), eta);
  };
  for (int t = 1; t <= config.max_iters; ++t) {
    const double beta = config.momentum_rule == MomentumRule::nesterov_t
                            ? static_cast<double>(t - 1) / static_cast<double>(t + 2)
                            : config.momentum_beta;
    auto [xc, eta] = take_step(x + beta * (x - x_prev));
    ObjectiveParts next = eval_parts(problem, xc);
    if (config.momentum_restart && beta != 0.0 && next.F > cur.F) {
      // Momentum overshot: discard the candidate and redo the step from x
      // with beta = 0, which the model-accepted prox step cannot increase.
      std::tie(xc, eta) = take_step(x);
      next = eval_parts(problem, xc);
    }
    const double step = (xc - x).norm();
    x_prev = x;
    x = std::move(xc);
    cur = next;
    out.iters = t;
    const bool stop = step <= config.tol_residual;
    if (t % config.trace_every == 0 || stop || t == config.max_iters)
      push_row(&out.trace, problem, config, t, cur, eta, step, x);
    if (observer) observer(t, x);
    if (stop) {
      out.converged = true;
      break;
    }
  }
  finish_trace(&out.trace, problem, config, x);
  out.solution = std::move(x);
  return out;
}

namespace {

// argmin_v f_logistic(v) + (rho/2)||v - target||^2 by damped Newton
void logistic_ridge_step(const LogisticLoss& lg, double rho,
                         const Eigen::VectorXd& target, Eigen::VectorXd* v) {
  const double n = static_cast<double>(lg.A.rows());
  auto softplus = [](double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  };
  auto phi = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd t = lg.labels.cwiseProduct(lg.A * u);
    double val = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) val += softplus(-t[i]);
    return val / n + 0.5 * rho * (u - target).squaredNorm();
  };
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd t = lg.labels.cwiseProduct(lg.A * (*v));
    Eigen::VectorXd w(t.size()), h(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-std::fabs(t[i])));
      const double sig_neg = t[i] >= 0.0 ? 1.0 - s : s;  // sigma(-t_i)
      w[i] = -lg.labels[i] * sig_neg;
      h[i] = s * (1.0 - s) / n;  // sigma(t) sigma(-t), symmetric in |t|
    }
    Eigen::VectorXd g = lg.A.transpose() * w / n + rho * (*v - target);
    if (g.norm() <= 1e-8) return;
    Eigen::MatrixXd H = lg.A.transpose() * h.asDiagonal() * lg.A;
    H.diagonal().array() += rho;
    const Eigen::VectorXd dv = -Eigen::LLT<Eigen::MatrixXd>(H).solve(g);
    const double gd = g.dot(dv);
    double s = 1.0;
    const double base = phi(*v);
    while (s > 1e-12 && phi(*v + s * dv) > base + 1e-4 * s * gd) s *= 0.5;
    *v += s * dv;
  }
}

}  // namespace

SolveResult admm(const CompositeProblem& problem, const SolverConfig& config,
                 const Eigen::VectorXd& x0,
                 const IterateObserver& observer) {
  validate_config(config);
  validate_problem(problem);
  const double rho = config.admm_rho;
  Eigen::VectorXd x = start_point(problem, x0);
  Eigen::VectorXd z = x;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());

  const auto* ls = std::get_if<LeastSquaresLoss>(&problem.loss);
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd atb;
  double nn = 0.0;
  if (ls) {
    nn = static_cast<double>(ls->A.rows());
    Eigen::MatrixXd M = ls->A.transpose() * ls->A;
    M.diagonal().array() += nn * rho;
    llt.compute(M);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("admm: normal-equation factorization failed");
    atb = ls->A.transpose() * ls->b;
  }

  SolveResult out;
  push_row(&out.trace, problem, config, 0, eval_parts(problem, z), 0.0, 0.0, z);
  if (observer) observer(0, z);
  for (int t = 1; t <= config.max_iters; ++t) {
    if (ls) {
      x = llt.solve(atb + nn * rho * (z - y));
    } else {
      logistic_ridge_step(std::get<LogisticLoss>(problem.loss), rho, z - y, &x);
    }
    const Eigen::VectorXd z_prev = z;
    z = prox_vector(problem.par, problem.lambda / rho, x + y);
    y += x - z;
    const double step = (z - z_prev).norm();
    const double resid = std::max((x - z).lpNorm<Eigen::Infinity>(),
                                  rho * (z - z_prev).lpNorm<Eigen::Infinity>());
    out.iters = t;
    const bool stop = resid <= config.tol_residual;
    if (t % config.trace_every == 0 || stop || t == config.max_iters)
      push_row(&out.trace, problem, config, t, eval_parts(problem, z), 0.0, step, z);
    if (observer) observer(t, z);
    if (stop) {
      out.converged = true;
      break;
    }
  }
  finish_trace(&out.trace, problem, config, z);
  out.solution = std::move(z);
  return out;
}

CriticalityReport check_criticality(const CompositeProblem& problem,
                                    const Eigen::VectorXd& x, double tol) {
  constexpr double kSnap = 1e-9;
  Eigen::VectorXd xs = x;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (problem.par.distance_to_level_set(xs[i]) <= kSnap)
      xs[i] = problem.par.project_nearest(xs[i]);
  }
  Eigen::VectorXd g;
  loss_eval(problem.loss, xs, &g);
  CriticalityReport rep;
  rep.per_coordinate.resize(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    double lo = 0.0, hi = 0.0;
    if (problem.lambda > 0.0) {
      const SubgradInterval s = problem.par.subdifferential(xs[i]);
      lo = problem.lambda * s.lo;
      hi = problem.lambda * s.hi;
    }
    const double r = std::max({0.0, g[i] + lo, -g[i] - hi});
    rep.per_coordinate[i] = r;
    rep.residual = std::max(rep.residual, r);
  }
  rep.is_critical = rep.residual <= tol;
  return rep;
}

}  // namespace paro
