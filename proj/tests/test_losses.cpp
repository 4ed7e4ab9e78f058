#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "paro/losses.hpp"
#include "paro/par.hpp"

using paro::CompositeProblem;
using paro::LeastSquaresLoss;
using paro::LogisticLoss;
using paro::ParSpec;
using paro::SmoothLoss;

namespace {

SmoothLoss random_ls(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g;
  LeastSquaresLoss ls;
  ls.A.resize(n, d);
  ls.b.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ls.A(i, j) = g(rng);
    ls.b[i] = g(rng);
  }
  return ls;
}

SmoothLoss random_logistic(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g;
  LogisticLoss lg;
  lg.A.resize(n, d);
  lg.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) lg.A(i, j) = g(rng);
    lg.labels[i] = (rng() & 1) ? 1.0 : -1.0;
  }
  return lg;
}

}  // namespace

TEST_CASE("least squares value and gradient on the identity design") {
  LeastSquaresLoss ls;
  ls.A = Eigen::MatrixXd::Identity(2, 2);
  ls.b = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd x(2);
  x << 3.0, 4.0;
  Eigen::VectorXd grad;
  const double v = paro::loss_eval(SmoothLoss(ls), x, &grad);
  CHECK(v == doctest::Approx(25.0 / 4.0).epsilon(1e-14));
  CHECK(grad[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(grad[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("least squares vanishes at an exact solution") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  LeastSquaresLoss ls;
  ls.A.resize(6, 4);
  Eigen::VectorXd x(4);
  for (int j = 0; j < 4; ++j) x[j] = g(rng);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) ls.A(i, j) = g(rng);
  ls.b = ls.A * x;
  Eigen::VectorXd grad;
  const double v = paro::loss_eval(SmoothLoss(ls), x, &grad);
  CHECK(v <= 1e-24);
  CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("logistic loss at the origin") {
  std::mt19937_64 rng(5);
  const SmoothLoss loss = random_logistic(rng, 7, 3);
  const auto& lg = std::get<LogisticLoss>(loss);
  Eigen::VectorXd grad;
  const double v = paro::loss_eval(loss, Eigen::VectorXd::Zero(3), &grad);
  CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // Gradient at zero: -(1/2n) sum_i y_i a_i.
  const Eigen::VectorXd expect =
      -(lg.A.transpose() * lg.labels) / (2.0 * static_cast<double>(lg.A.rows()));
  CHECK((grad - expect).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("smoothness constant brackets on known designs") {
  LeastSquaresLoss eye;
  eye.A = Eigen::MatrixXd::Identity(5, 5);
  eye.b = Eigen::VectorXd::Zero(5);
  double L = paro::lipschitz_bound(SmoothLoss(eye));
  CHECK(L >= 1.0 / 5.0);
  CHECK(L <= 1.02 / 5.0);

  LeastSquaresLoss diag;
  diag.A = Eigen::MatrixXd::Zero(2, 2);
  diag.A(0, 0) = 2.0;
  diag.A(1, 1) = 1.0;
  diag.b = Eigen::VectorXd::Zero(2);
  L = paro::lipschitz_bound(SmoothLoss(diag));
  CHECK(L >= 2.0);  // lambda_max(A^T A)/n = 4/2
  CHECK(L <= 2.0 * 1.02);

  LogisticLoss lg;
  lg.A = Eigen::MatrixXd::Identity(4, 4);
  lg.labels = Eigen::VectorXd::Ones(4);
  L = paro::lipschitz_bound(SmoothLoss(lg));
  CHECK(L >= 1.0 / 16.0);
  CHECK(L <= 1.02 / 16.0);
}

TEST_CASE("finite differences confirm both gradients") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const std::vector<SmoothLoss> losses = {random_ls(rng, 9, 5),
                                          random_logistic(rng, 9, 5)};
  for (const SmoothLoss& loss : losses) {
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXd x(5);
      for (int j = 0; j < 5; ++j) x[j] = g(rng);
      Eigen::VectorXd grad;
      paro::loss_eval(loss, x, &grad);
      const double h = 1e-6;
      for (int j = 0; j < 5; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
        e[j] = h;
        const double fd =
            (paro::loss_eval(loss, x + e) - paro::loss_eval(loss, x - e)) / (2.0 * h);
        CHECK(std::fabs(fd - grad[j]) <= 1e-5 * (1.0 + std::fabs(grad[j])));
      }
    }
  }
}

TEST_CASE("descent lemma holds with the certified constant") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const std::vector<SmoothLoss> losses = {random_ls(rng, 8, 6),
                                          random_logistic(rng, 8, 6)};
  for (const SmoothLoss& loss : losses) {
    const double L = paro::lipschitz_bound(loss);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd x(6), y(6);
      for (int j = 0; j < 6; ++j) {
        x[j] = 2.0 * g(rng);
        y[j] = 2.0 * g(rng);
      }
      Eigen::VectorXd gx;
      const double fx = paro::loss_eval(loss, x, &gx);
      const double fy = paro::loss_eval(loss, y);
      const double quad = fx + gx.dot(y - x) + 0.5 * L * (y - x).squaredNorm();
      CHECK(fy <= quad + 1e-10 * (1.0 + std::fabs(fy)));
    }
  }
}

TEST_CASE("composite objective assembles loss plus weighted penalty") {
  LeastSquaresLoss ls;
  ls.A = Eigen::MatrixXd::Identity(3, 3);
  ls.b.resize(3);
  ls.b << 1.0, -2.0, 0.5;
  const ParSpec l1 = ParSpec::convex({0.0}, {1.0});

  // At x = 0 the objective is ||b||^2 / (2n) regardless of the penalty.
  CompositeProblem p{SmoothLoss(ls), l1, 0.7};
  CHECK(paro::objective(p, Eigen::VectorXd::Zero(3)) ==
        doctest::Approx(5.25 / 6.0).epsilon(1e-14));

  // Zero weight reduces to the bare loss even when the penalty would be +inf.
  const double inf = std::numeric_limits<double>::infinity();
  CompositeProblem capped{SmoothLoss(ls), ParSpec::convex({0.0, 1.0}, {1.0, inf}),
                          0.0};
  Eigen::VectorXd far(3);
  far << 9.0, 0.0, 0.0;
  CHECK(std::isfinite(paro::objective(capped, far)));
  CHECK(paro::objective(capped, far) == paro::loss_eval(capped.loss, far));

  // A zero design isolates the penalty: pure l1 with unit weight.
  LeastSquaresLoss zero;
  zero.A = Eigen::MatrixXd::Zero(2, 2);
  zero.b = Eigen::VectorXd::Zero(2);
  CompositeProblem pen{SmoothLoss(zero), l1, 1.0};
  Eigen::VectorXd x(2);
  x << 1.0, -2.0;
  CHECK(paro::objective(pen, x) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(paro::penalty_value(l1, x) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("dimension and sample helpers") {
  std::mt19937_64 rng(13);
  const SmoothLoss ls = random_ls(rng, 9, 4);
  CHECK(paro::loss_dim(ls) == 4);
  CHECK(paro::loss_samples(ls) == 9);
  const SmoothLoss lg = random_logistic(rng, 6, 3);
  CHECK(paro::loss_dim(lg) == 3);
  CHECK(paro::loss_samples(lg) == 6);
}
