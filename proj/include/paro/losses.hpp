#pragma once

#include <Eigen/Core>
#include <variant>

#include "paro/par.hpp"

namespace paro {

// f(x) = ||Ax - b||^2 / (2n)
struct LeastSquaresLoss {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

// f(x) = (1/n) sum_i log(1 + exp(-y_i <a_i, x>)), labels y_i in {-1, +1}
struct LogisticLoss {
  Eigen::MatrixXd A;
  Eigen::VectorXd labels;
};

using SmoothLoss = std::variant<LeastSquaresLoss, LogisticLoss>;

Eigen::Index loss_dim(const SmoothLoss& loss);
Eigen::Index loss_samples(const SmoothLoss& loss);

// Value of f at x; fills *grad with the gradient when non-null (same pass).
double loss_eval(const SmoothLoss& loss, const Eigen::VectorXd& x,
                 Eigen::VectorXd* grad = nullptr);

// Certified smoothness constant: lambda_max(A^T A)/n for least squares,
// ||A||_2^2/(4n) for logistic. Power iteration to relative tolerance 1e-6
// with a final Rayleigh step and 1% inflation; falls back to the (always
// valid) Frobenius bound if the iteration stalls.
double lipschitz_bound(const SmoothLoss& loss);

struct CompositeProblem {
  SmoothLoss loss;
  ParSpec par;
  double lambda = 0.0;
};

// sum_i Psi(x_i); +inf past the cap of an infinite-slope convex penalty
double penalty_value(const ParSpec& par, const Eigen::VectorXd& x);

// F(x) = f(x) + lambda * sum_i Psi(x_i); exactly f when lambda == 0
double objective(const CompositeProblem& problem, const Eigen::VectorXd& x);

}  // namespace paro
