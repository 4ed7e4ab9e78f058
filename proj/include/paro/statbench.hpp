#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>

#include "paro/losses.hpp"
#include "paro/par.hpp"

namespace paro {

enum class TaskKind { linear, logistic };
enum class TruthKind { dense_gaussian, sparse, user_supplied };

TaskKind task_from_name(const std::string& name);
std::string task_name(TaskKind t);

struct SyntheticSpec {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  TaskKind task = TaskKind::linear;
  double noise_sigma = 0.0;
  TruthKind truth = TruthKind::dense_gaussian;
  Eigen::Index sparsity = 0;     // TruthKind::sparse
  Eigen::VectorXd user_truth;    // TruthKind::user_supplied
  std::uint64_t seed = 0;
};

struct RegressionDataset {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;  // responses (linear) or +-1 labels (logistic)
  Eigen::VectorXd x_star;
  SyntheticSpec spec;
};

struct ErrorReport {
  double l2_error = 0.0;
  double mahalanobis_error = 0.0;  // ||x_hat - x_star|| in the A^T A / n norm
  double qrate = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
};

// A ~ iid N(0,1); linear: b = A x_star + sigma * eps; logistic: labels +-1
// with P(+1) = sigmoid(<a_i, x_star>). Deterministic given the seed.
RegressionDataset gen_dataset(const SyntheticSpec& spec);

SmoothLoss dataset_loss(const RegressionDataset& dataset);

// (A^T A + n lambda I)^{-1} A^T b via a direct SPD factorization.
Eigen::VectorXd ridge_closed_form(const RegressionDataset& dataset, double lambda);

// sigma / (truth_norm + sqrt(d) q) * sqrt(tr(A^T A / n) / n)
double recommended_ridge_lambda(const RegressionDataset& dataset, double gap,
                                double sigma, double truth_norm);

// Ridge-regularized logistic fit (damped Newton to gradient norm 1e-10).
Eigen::VectorXd ridge_logistic_fit(const RegressionDataset& dataset, double lambda);

ErrorReport error_report(const RegressionDataset& dataset,
                         const Eigen::VectorXd& estimate);
// Also fills the quantization rate of the estimate and the penalized
// objective, which need the penalty and weight.
ErrorReport error_report(const RegressionDataset& dataset,
                         const Eigen::VectorXd& estimate, const ParSpec& par,
                         double lambda, double qrate_tol = 1e-6);

// ||grad f(x_star)||_inf / (2 nu): the smallest penalty weight the sparse
// recovery bound admits, computed from the realized noise (an oracle choice).
// For least squares this equals ||A^T eps||_inf / (2 nu n).
double oracle_penalty_lambda(const RegressionDataset& dataset, double nu);

// prox of lambda * sqrt|.|: bisection on the stationarity cubic for the
// interior candidate, then compared against 0.
double prox_sqrt_penalty(double lambda, double x);

// Proximal gradient for f + lambda * sum_i sqrt|x_i| at fixed step 1/(2L).
Eigen::VectorXd lhalf_fit(const RegressionDataset& dataset, double lambda,
                          int max_iters = 5000, double tol = 1e-10);

}  // namespace paro
