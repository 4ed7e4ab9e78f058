#include "paro/statbench.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace paro {

namespace {

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

TaskKind task_from_name(const std::string& name) {
  if (name == "linear") return TaskKind::linear;
  if (name == "logistic") return TaskKind::logistic;
  throw std::invalid_argument("statbench: unknown task '" + name + "'");
}

std::string task_name(TaskKind t) {
  return t == TaskKind::linear ? "linear" : "logistic";
}

RegressionDataset gen_dataset(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1)
    throw std::invalid_argument("statbench: n and d must be >= 1");
  if (!(spec.noise_sigma >= 0.0))
    throw std::invalid_argument("statbench: noise sigma must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  RegressionDataset ds;
  ds.spec = spec;
  ds.A.resize(spec.n, spec.d);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    for (Eigen::Index j = 0; j < spec.d; ++j) ds.A(i, j) = gauss(rng);

  switch (spec.truth) {
    case TruthKind::dense_gaussian:
      ds.x_star.resize(spec.d);
      for (Eigen::Index j = 0; j < spec.d; ++j) ds.x_star[j] = gauss(rng);
      break;
    case TruthKind::sparse: {
      if (spec.sparsity < 0 || spec.sparsity > spec.d)
        throw std::invalid_argument("statbench: sparsity must lie in [0, d]");
      std::vector<Eigen::Index> idx(spec.d);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      ds.x_star = Eigen::VectorXd::Zero(spec.d);
      for (Eigen::Index k = 0; k < spec.sparsity; ++k)
        ds.x_star[idx[static_cast<std::size_t>(k)]] = gauss(rng);
      break;
    }
    case TruthKind::user_supplied:
      if (spec.user_truth.size() != spec.d)
        throw std::invalid_argument("statbench: user truth has wrong dimension");
      ds.x_star = spec.user_truth;
      break;
  }

  const Eigen::VectorXd margins = ds.A * ds.x_star;
  ds.b.resize(spec.n);
  if (spec.task == TaskKind::linear) {
    for (Eigen::Index i = 0; i < spec.n; ++i)
      ds.b[i] = margins[i] + spec.noise_sigma * gauss(rng);
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < spec.n; ++i)
      ds.b[i] = unif(rng) < sigmoid(margins[i]) ? 1.0 : -1.0;
  }
  return ds;
}

SmoothLoss dataset_loss(const RegressionDataset& dataset) {
  if (dataset.spec.task == TaskKind::linear)
    return LeastSquaresLoss{dataset.A, dataset.b};
  return LogisticLoss{dataset.A, dataset.b};
}

Eigen::VectorXd ridge_closed_form(const RegressionDataset& dataset, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("statbench: ridge lambda must be >= 0");
  const double n = static_cast<double>(dataset.A.rows());
  Eigen::MatrixXd M = dataset.A.transpose() * dataset.A;
  M.diagonal().array() += n * lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("statbench: ridge system is singular");
  return llt.solve(dataset.A.transpose() * dataset.b);
}

double recommended_ridge_lambda(const RegressionDataset& dataset, double gap,
                                double sigma, double truth_norm) {
  if (!(gap >= 0.0 && sigma >= 0.0 && truth_norm >= 0.0))
    throw std::invalid_argument("statbench: lambda rule inputs must be >= 0");
  const double n = static_cast<double>(dataset.A.rows());
  const double d = static_cast<double>(dataset.A.cols());
  const double denom = truth_norm + std::sqrt(d) * gap;
  if (denom <= 0.0)
    throw std::invalid_argument("statbench: lambda rule denominator is zero");
  const double trace_cov = dataset.A.squaredNorm() / n;
  return sigma / denom * std::sqrt(trace_cov / n);
}

Eigen::VectorXd ridge_logistic_fit(const RegressionDataset& dataset, double lambda) {
  if (dataset.spec.task != TaskKind::logistic)
    throw std::invalid_argument("statbench: ridge_logistic_fit needs a logistic task");
  if (!(lambda > 0.0))
    throw std::invalid_argument("statbench: logistic ridge needs lambda > 0");
  const Eigen::MatrixXd& A = dataset.A;
  const Eigen::VectorXd& y = dataset.b;
  const double n = static_cast<double>(A.rows());
  auto softplus = [](double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  };
  auto value = [&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd t = y.cwiseProduct(A * v);
    double val = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) val += softplus(-t[i]);
    return val / n + 0.5 * lambda * v.squaredNorm();
  };
  Eigen::VectorXd v = Eigen::VectorXd::Zero(A.cols());
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd t = y.cwiseProduct(A * v);
    Eigen::VectorXd w(t.size()), h(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-std::fabs(t[i])));
      w[i] = -y[i] * (t[i] >= 0.0 ? 1.0 - s : s);
      h[i] = s * (1.0 - s) / n;
    }
    Eigen::VectorXd g = A.transpose() * w / n + lambda * v;
    if (g.norm() <= 1e-10) break;
    Eigen::MatrixXd H = A.transpose() * h.asDiagonal() * A;
    H.diagonal().array() += lambda;
    const Eigen::VectorXd dv = -Eigen::LLT<Eigen::MatrixXd>(H).solve(g);
    const double gd = g.dot(dv);
    double s = 1.0;
    const double base = value(v);
    while (s > 1e-12 && value(v + s * dv) > base + 1e-4 * s * gd) s *= 0.5;
    v += s * dv;
  }
  return v;
}

ErrorReport error_report(const RegressionDataset& dataset,
                         const Eigen::VectorXd& estimate) {
  if (estimate.size() != dataset.A.cols())
    throw std::invalid_argument("statbench: estimate dimension mismatch");
  ErrorReport rep;
  const Eigen::VectorXd diff = estimate - dataset.x_star;
  rep.l2_error = diff.norm();
  // (diff^T Sigma diff) with Sigma = A^T A / n, without forming Sigma
  rep.mahalanobis_error =
      (dataset.A * diff).norm() / std::sqrt(static_cast<double>(dataset.A.rows()));
  return rep;
}

ErrorReport error_report(const RegressionDataset& dataset,
                         const Eigen::VectorXd& estimate, const ParSpec& par,
                         double lambda, double qrate_tol) {
  ErrorReport rep = error_report(dataset, estimate);
  std::vector<double> v(estimate.data(), estimate.data() + estimate.size());
  rep.qrate = quantization_rate(v, par, qrate_tol).rate;
  rep.objective = objective({dataset_loss(dataset), par, lambda}, estimate);
  return rep;
}

double oracle_penalty_lambda(const RegressionDataset& dataset, double nu) {
  if (!(nu > 0.0))
    throw std::invalid_argument("statbench: oracle lambda needs nu > 0");
  const SmoothLoss loss = dataset_loss(dataset);
  Eigen::VectorXd g;
  loss_eval(loss, dataset.x_star, &g);
  return g.lpNorm<Eigen::Infinity>() / (2.0 * nu);
}

double prox_sqrt_penalty(double lambda, double x) {
  if (!(lambda >= 0.0) || !std::isfinite(x))
    throw std::invalid_argument("statbench: bad prox arguments");
  if (lambda == 0.0) return x;
  const double u = std::fabs(x);
  const double s = x < 0.0 ? -1.0 : 1.0;
  // Interior stationary points of lambda sqrt(z) + (z-u)^2/2 over z > 0 solve
  // h(t) = 2t^3 - 2ut + lambda = 0 with t = sqrt(z); the larger root (the
  // local minimum) sits between t0 = sqrt(u/3) and sqrt(u) when it exists.
  const double t0 = std::sqrt(u / 3.0);
  const double h0 = 2.0 * t0 * t0 * t0 - 2.0 * u * t0 + lambda;
  if (h0 > 0.0) return 0.0;  // no interior minimum
  double lo = t0, hi = std::sqrt(u);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = 2.0 * mid * mid * mid - 2.0 * u * mid + lambda;
    if (h <= 0.0) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  const double t = 0.5 * (lo + hi);
  const double z = t * t;
  const double interior = lambda * t + 0.5 * (z - u) * (z - u);
  const double at_zero = 0.5 * u * u;
  if (interior < at_zero) return s * z;
  return 0.0;  // ties prefer the smaller magnitude
}

Eigen::VectorXd lhalf_fit(const RegressionDataset& dataset, double lambda,
                          int max_iters, double tol) {
  const SmoothLoss loss = dataset_loss(dataset);
  const double L = lipschitz_bound(loss);
  const double eta = L > 0.0 ? 0.5 / L : 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dataset.A.cols());
  Eigen::VectorXd g;
  for (int t = 0; t < max_iters; ++t) {
    loss_eval(loss, x, &g);
    Eigen::VectorXd xc = x - eta * g;
    for (Eigen::Index i = 0; i < xc.size(); ++i)
      xc[i] = prox_sqrt_penalty(eta * lambda, xc[i]);
    const double step = (xc - x).norm();
    x = std::move(xc);
    if (step <= tol) break;
  }
  return x;
}

}  // namespace paro
