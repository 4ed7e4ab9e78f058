#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "paro/solvers.hpp"
#include "paro/statbench.hpp"

namespace paro {

// count points from lo to hi inclusive, evenly spaced in log10
std::vector<double> logspace(double lo, double hi, int count);

// Shared integer level set out to max_level, expressed in each family's
// convention: convex gets slopes 1, 2, ... with an infinite final slope,
// quasiconvex-uniform gets gap 1, nonconvex-nearest gets the signed list.
ParSpec integer_par(ParFamily family, int max_level);

// Dispatch on method name: "pg", "apg", or "admm".
SolveResult solve_with(const std::string& method, const CompositeProblem& problem,
                       const SolverConfig& config,
                       const Eigen::VectorXd& x0 = Eigen::VectorXd(),
                       const IterateObserver& observer = {});

SolverConfig solver_config_from_json(const nlohmann::json& block, SolverConfig base);

// Builds either a literal penalty record or, when the block carries a
// "target" key, the secant approximant of that classic penalty.
ParSpec par_from_config(const nlohmann::json& block);

// ---------------------------------------------------------------------------
// quantsweep: noiseless linear data, convex integer-level penalty, one row
// per (n, lambda, seed) cell recording the quantization rate against the
// 1 - n/d bound and the training loss.

struct QuantsweepConfig {
  int d = 200;
  std::vector<int> n_values = {20};
  std::vector<double> lambdas = logspace(1e-4, 100.0, 20);
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string method = "admm";
  SolverConfig solver;
  double crit_tol = 1e-5;
  std::string out_dir = "out";
};

struct QuantsweepRow {
  int d = 0;
  int n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string family;
  double qrate = 0.0;
  double bound = 0.0;  // 1 - n/d
  double train_loss = 0.0;
  double crit_residual = 0.0;
  int iters = 0;
  bool converged = false;
  std::string status = "ok";
};

QuantsweepConfig quantsweep_config_from_json(const nlohmann::json& root);
std::vector<QuantsweepRow> run_quantsweep(const QuantsweepConfig& config);
void write_quantsweep_csv(const std::vector<QuantsweepRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------
// solvers: one noisy linear problem per seed, all three solvers on all three
// families over a shared integer level set; full traces plus summary rows.

struct SolversRunConfig {
  int d = 200;
  int n = 20;
  double noise_sigma = 0.1;
  double lambda = 0.01;
  std::vector<std::string> families = {"convex", "quasiconvex-uniform", "nonconvex-nearest"};
  std::vector<std::string> methods = {"pg", "apg", "admm"};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  SolverConfig solver;
  bool write_traces = true;
  std::string out_dir = "out";
};

struct SolversRunRow {
  int d = 0;
  int n = 0;
  std::string family;
  std::string method;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double final_F = 0.0;
  double best_quantized_f = 0.0;  // min over iterations of f(Q(x_t))
  double final_qrate = 0.0;
  double crit_residual = 0.0;
  int iters = 0;
  bool converged = false;
  std::string status = "ok";
  std::string trace_file;
  IterateTrace trace;  // kept in memory for tests; not part of the CSV
};

SolversRunConfig solvers_config_from_json(const nlohmann::json& root);
std::vector<SolversRunRow> run_solvers(const SolversRunConfig& config);
void write_solvers_csv(const std::vector<SolversRunRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------
// parcompare: per-iteration quantized objective f(Q(x_t)) for the three
// families over a lambda grid, plus a per-(family, seed) best-lambda record.

struct ParcompareConfig {
  int d = 1000;
  int n = 100;
  double noise_sigma = 0.1;
  int sparsity = 10;  // support size of the planted level-valued truth
  std::vector<double> lambdas = {0.01, 0.015, 0.02, 0.05};
  std::vector<std::string> families = {"convex", "quasiconvex-uniform", "nonconvex-nearest"};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string method = "admm";
  SolverConfig solver;
  std::string out_dir = "out";
};

struct ParcompareRow {
  int d = 0;
  int n = 0;
  std::string family;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int iter = 0;
  double quantized_f = 0.0;
  double F = 0.0;
  double qrate = 0.0;
};

struct ParcompareBestRow {
  int d = 0;
  int n = 0;
  std::string family;
  std::uint64_t seed = 0;
  double lambda = 0.0;  // argmin over the grid of the final quantized loss
  double final_quantized_f = 0.0;
};

ParcompareConfig parcompare_config_from_json(const nlohmann::json& root);
std::vector<ParcompareRow> run_parcompare(const ParcompareConfig& config);
std::vector<ParcompareBestRow> parcompare_best(const std::vector<ParcompareRow>& rows);
void write_parcompare_csv(const std::vector<ParcompareRow>& rows, const std::string& path);
void write_parcompare_best_csv(const std::vector<ParcompareBestRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------
// statcompare: classic penalties (ridge, l1, l0.5) against their secant
// approximants at matched lambda, reporting estimation error and qrate.

struct StatcompareConfig {
  int d = 200;
  std::vector<int> n_values = {100};
  double noise_sigma = 0.1;
  std::vector<double> gaps = {0.1, 0.05, 0.01};
  std::vector<std::string> tasks = {"linear", "logistic"};
  std::vector<std::string> regularizers = {"ridge", "l1", "l0.5"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int sparsity = 10;  // support size of the truth for l1 / l0.5 cells
  std::string out_dir = "out";
};

struct StatcompareRow {
  std::string task;
  int d = 0;
  int n = 0;
  double gap = 0.0;
  std::uint64_t seed = 0;
  std::string regularizer;
  std::string variant;  // "classic" or "par"
  double lambda = 0.0;
  std::string lambda_rule;  // "recommended" (ridge) or "oracle" (l1, l0.5)
  double l2_error = 0.0;
  double mahalanobis_error = 0.0;
  double qrate = 0.0;
  double objective = 0.0;
  std::string status = "ok";
};

StatcompareConfig statcompare_config_from_json(const nlohmann::json& root);
std::vector<StatcompareRow> run_statcompare(const StatcompareConfig& config);
void write_statcompare_csv(const std::vector<StatcompareRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------
// CLI entry point: dispatches on config["experiment"], writes the artifact
// files, and returns their paths.

std::vector<std::string> run_experiment(const nlohmann::json& config);

}  // namespace paro
