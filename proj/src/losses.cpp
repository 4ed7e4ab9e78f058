#include "paro/losses.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace paro {

namespace {

double softplus(double s) {
  // log(1 + exp(s)) without overflow at large s
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

void check_dim(const SmoothLoss& loss, const Eigen::VectorXd& x) {
  if (x.size() != loss_dim(loss))
    throw std::invalid_argument("loss: dimension mismatch");
}

void check_labels(const Eigen::VectorXd& labels) {
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw std::invalid_argument("loss: logistic labels must be +-1");
  }
}

// Largest eigenvalue of A^T A (= ||A||_2^2), applying the smaller of the two
// Gram operators. Deterministic start vector.
double spectral_sq_bound(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows(), d = A.cols();
  const Eigen::Index k = std::min(n, d);
  if (k == 0) return 0.0;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = gauss(rng);
  v.normalize();
  auto apply = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    if (d <= n) return A.transpose() * (A * u);
    return A * (A.transpose() * u);
  };
  double rho_prev = -1.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXd w = apply(v);
    const double rho = v.dot(w);
    if (rho <= 0.0) return 0.0;  // A == 0 (PSD operator, unit v)
    if (std::fabs(rho - rho_prev) <= 1e-6 * rho) {
      v = w / w.norm();
      const double rayleigh = v.dot(apply(v));
      return 1.01 * rayleigh;
    }
    rho_prev = rho;
    v = w / w.norm();
  }
  return A.squaredNorm();  // Frobenius fallback dominates lambda_max
}

}  // namespace

Eigen::Index loss_dim(const SmoothLoss& loss) {
  return std::visit([](const auto& l) { return l.A.cols(); }, loss);
}

Eigen::Index loss_samples(const SmoothLoss& loss) {
  return std::visit([](const auto& l) { return l.A.rows(); }, loss);
}

double loss_eval(const SmoothLoss& loss, const Eigen::VectorXd& x,
                 Eigen::VectorXd* grad) {
  check_dim(loss, x);
  if (const auto* ls = std::get_if<LeastSquaresLoss>(&loss)) {
    if (ls->b.size() != ls->A.rows())
      throw std::invalid_argument("loss: response length must match sample count");
    const double n = static_cast<double>(ls->A.rows());
    const Eigen::VectorXd r = ls->A * x - ls->b;
    if (grad) *grad = ls->A.transpose() * r / n;
    return r.squaredNorm() / (2.0 * n);
  }
  const auto& lg = std::get<LogisticLoss>(loss);
  if (lg.labels.size() != lg.A.rows())
    throw std::invalid_argument("loss: label length must match sample count");
  check_labels(lg.labels);
  const double n = static_cast<double>(lg.A.rows());
  const Eigen::VectorXd t = lg.labels.cwiseProduct(lg.A * x);
  double value = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) value += softplus(-t[i]);
  value /= n;
  if (grad) {
    Eigen::VectorXd w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      w[i] = -lg.labels[i] * sigmoid(-t[i]);
    *grad = lg.A.transpose() * w / n;
  }
  return value;
}

double lipschitz_bound(const SmoothLoss& loss) {
  if (const auto* ls = std::get_if<LeastSquaresLoss>(&loss)) {
    const double n = static_cast<double>(ls->A.rows());
    return spectral_sq_bound(ls->A) / n;
  }
  const auto& lg = std::get<LogisticLoss>(loss);
  const double n = static_cast<double>(lg.A.rows());
  return spectral_sq_bound(lg.A) / (4.0 * n);
}

double penalty_value(const ParSpec& par, const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = par.value(x[i]);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    total += v;
  }
  return total;
}

double objective(const CompositeProblem& problem, const Eigen::VectorXd& x) {
  const double f = loss_eval(problem.loss, x);
  if (problem.lambda == 0.0) return f;
  return f + problem.lambda * penalty_value(problem.par, x);
}

}  // namespace paro
