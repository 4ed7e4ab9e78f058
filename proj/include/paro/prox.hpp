#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "paro/par.hpp"

namespace paro {

struct ProxResult {
  double point = 0.0;
  double objective = 0.0;  // lambda * Psi(point) + 0.5 * (x - point)^2
  // Set when the output sits exactly on a quantization level, using the
  // family's level indexing (see ParSpec::level_at).
  std::optional<std::int64_t> at_level;
};

// Closed-form scalar prox for the convex, quasiconvex-uniform and
// nonconvex-nearest families. Ties between equally good outputs break toward
// the smaller |z|, then the smaller z. Throws for family general, which has
// no closed form; use prox_oracle there.
ProxResult prox_scalar(const ParSpec& par, double lambda, double x);

// Brute-force ground truth: minimizes the prox objective over every affine
// piece of the penalty independently of the closed-form dispatch. Works for
// all families. Intended for tests and as the general-family fallback.
ProxResult prox_oracle(const ParSpec& par, double lambda, double x);

// Coordinate-wise prox; uses the closed form when the family has one and the
// oracle otherwise.
Eigen::VectorXd prox_vector(const ParSpec& par, double lambda,
                            const Eigen::VectorXd& x);

}  // namespace paro
