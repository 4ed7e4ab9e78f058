#include "paro/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace paro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(double lambda, double x) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("prox: lambda must be finite and >= 0");
  if (!std::isfinite(x))
    throw std::invalid_argument("prox: x must be finite");
}

ProxResult finish(const ParSpec& par, double lambda, double x, double z) {
  if (z == 0.0) z = 0.0;  // normalize -0
  ProxResult r;
  r.point = z;
  const double d = x - z;
  r.objective = lambda * par.value(z) + 0.5 * d * d;
  const std::int64_t idx = par.nearest_level_index(z);
  if (par.level_at(idx) == z) r.at_level = idx;
  return r;
}

double prox_convex_half(const ParSpec& par, double lambda, double u) {
  const auto& q = par.levels();
  const auto& a = par.slopes();
  const std::size_t m = q.size() - 1;
  if (u <= lambda * a[0]) return 0.0;
  // Largest k with lambda*a_{k-1} + q_k <= u; the snap and slide bands tile
  // [0, inf) in that order, so this pins the band pair containing u.
  std::size_t k = 0;
  std::size_t lo = 1, hi = m;
  while (lo <= hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (lambda * a[mid - 1] + q[mid] <= u) {
      k = mid;
      lo = mid + 1;
    } else {
      if (mid == 1) break;
      hi = mid - 1;
    }
  }
  if (k >= 1 && (a[k] == kInf || u <= lambda * a[k] + q[k])) return q[k];
  return u - lambda * a[k];
}

double prox_quasiconvex_half(const ParSpec& par, double lambda, double u) {
  const double q = par.gap();
  if (lambda <= q) {
    const double k = std::floor(u / q);
    const double r = u - k * q;
    if (r <= lambda) return k * q;
    if (r <= 0.5 * (q + lambda)) return u - lambda;  // tie goes to the smaller |z|
    return u;
  }
  // Hard quantizer: nearest multiple of q to u - lambda/2, half rounds toward
  // zero, never below the zero level.
  const double t = (u - 0.5 * lambda) / q;
  double k = std::floor(t + 0.5);
  if (k - t == 0.5) k -= 1.0;
  k = std::max(k, 0.0);
  return k * q;
}

double prox_nonconvex(const ParSpec& par, double lambda, double x) {
  const auto& p = par.levels();
  if (x < p.front()) return std::min(x + lambda, p.front());
  if (x > p.back()) return std::max(x - lambda, p.back());
  auto it = std::upper_bound(p.begin(), p.end(), x);
  if (it == p.begin()) return p.front();  // x == p.front()
  const std::size_t j = static_cast<std::size_t>(it - p.begin()) - 1;
  if (j + 1 == p.size()) return p.back();  // x == p.back()
  const double lo = p[j], hi = p[j + 1];
  const double mid = 0.5 * (lo + hi);
  if (x < mid) return std::clamp(x - lambda, lo, mid);
  if (x > mid) return std::clamp(x + lambda, mid, hi);
  // Exactly between two levels the two halves give equally good outputs.
  const double zl = std::clamp(x - lambda, lo, mid);
  const double zr = std::clamp(x + lambda, mid, hi);
  if (std::fabs(zl) != std::fabs(zr)) return std::fabs(zl) < std::fabs(zr) ? zl : zr;
  return std::min(zl, zr);
}

struct Piece {
  // Psi(z) = v_ref + a * (z - z_ref) for z in [lo, hi]; bounds may be +-inf
  // but z_ref is always finite.
  double lo, hi, a, z_ref, v_ref;
};

void append_symmetric_pieces(const ParSpec& par, double lambda, double x,
                             std::vector<Piece>* out) {
  const auto& q = par.levels();
  const auto& a = par.slopes();
  const auto& b = par.intercepts();
  const std::size_t m = q.size() - 1;
  // The minimizer stays within 2*lambda*a_max of the domain projection of x:
  // farther out the quadratic term grows faster than an a_max-Lipschitz
  // penalty can shrink. Restricting the scan keeps the oracle usable inside
  // solver loops on fine-grained penalties.
  double c = x;
  if (par.has_infinite_tail()) c = std::clamp(c, -q[m], q[m]);
  const double w = 2.0 * lambda * par.a_max() + 1e-9 * (1.0 + std::fabs(x));
  const double zlo = c - w, zhi = c + w;
  const double ulo =
      (zlo <= 0.0 && zhi >= 0.0) ? 0.0 : std::min(std::fabs(zlo), std::fabs(zhi));
  const double uhi = std::max(std::fabs(zlo), std::fabs(zhi));
  for (std::size_t k = 0; k <= m; ++k) {
    const double hi = (k == m) ? kInf : q[k + 1];
    if (a[k] == kInf) continue;  // capped: no piece past q_m
    if (hi < ulo || q[k] > uhi) continue;
    out->push_back({q[k], hi, a[k], q[k], b[k]});
    out->push_back({-hi, -q[k], -a[k], -q[k], b[k]});
  }
}

void append_quasiconvex_pieces(const ParSpec& par, double radius,
                               std::vector<Piece>* out) {
  const double q = par.gap();
  const auto cells = static_cast<std::int64_t>(std::ceil(radius / q)) + 1;
  for (std::int64_t k = 0; k <= cells; ++k) {
    const double qk = static_cast<double>(k) * q;
    const double vk = 0.5 * qk;
    out->push_back({qk, qk + 0.5 * q, 1.0, qk, vk});
    out->push_back({qk + 0.5 * q, qk + q, 0.0, qk + 0.5 * q, vk + 0.5 * q});
    out->push_back({-(qk + 0.5 * q), -qk, -1.0, -qk, vk});
    out->push_back({-(qk + q), -(qk + 0.5 * q), 0.0, -(qk + 0.5 * q), vk + 0.5 * q});
  }
}

void append_nonconvex_pieces(const ParSpec& par, std::vector<Piece>* out) {
  const auto& p = par.levels();
  out->push_back({-kInf, p.front(), -1.0, p.front(), 0.0});
  out->push_back({p.back(), kInf, 1.0, p.back(), 0.0});
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    const double mid = 0.5 * (p[j] + p[j + 1]);
    out->push_back({p[j], mid, 1.0, p[j], 0.0});
    out->push_back({mid, p[j + 1], -1.0, p[j + 1], 0.0});
  }
}

}  // namespace

ProxResult prox_scalar(const ParSpec& par, double lambda, double x) {
  check_args(lambda, x);
  const double u = std::fabs(x);
  const double s = x < 0.0 ? -1.0 : 1.0;
  switch (par.family()) {
    case ParFamily::convex:
      return finish(par, lambda, x, s * prox_convex_half(par, lambda, u));
    case ParFamily::quasiconvex_uniform:
      return finish(par, lambda, x, s * prox_quasiconvex_half(par, lambda, u));
    case ParFamily::nonconvex_nearest:
      return finish(par, lambda, x, prox_nonconvex(par, lambda, x));
    case ParFamily::general:
      throw std::invalid_argument(
          "prox: family 'general' has no closed form; use prox_oracle");
  }
  throw std::logic_error("prox: bad family tag");
}

ProxResult prox_oracle(const ParSpec& par, double lambda, double x) {
  check_args(lambda, x);
  std::vector<Piece> pieces;
  switch (par.family()) {
    case ParFamily::convex:
    case ParFamily::general:
      append_symmetric_pieces(par, lambda, x, &pieces);
      break;
    case ParFamily::quasiconvex_uniform:
      append_quasiconvex_pieces(
          par, std::fabs(x) + lambda * par.a_max() + 2.0 * par.gap(), &pieces);
      break;
    case ParFamily::nonconvex_nearest:
      append_nonconvex_pieces(par, &pieces);
      break;
  }
  double best_z = 0.0;
  double best_obj = kInf;
  bool have = false;
  for (const Piece& pc : pieces) {
    double z = x - lambda * pc.a;
    z = std::clamp(z, pc.lo, pc.hi);
    const double d = x - z;
    const double obj = lambda * (pc.v_ref + pc.a * (z - pc.z_ref)) + 0.5 * d * d;
    const bool better =
        !have || obj < best_obj ||
        (obj == best_obj && (std::fabs(z) < std::fabs(best_z) ||
                             (std::fabs(z) == std::fabs(best_z) && z < best_z)));
    if (better) {
      best_z = z;
      best_obj = obj;
      have = true;
    }
  }
  if (!have) throw std::logic_error("prox: oracle found no feasible piece");
  return finish(par, lambda, x, best_z);
}

Eigen::VectorXd prox_vector(const ParSpec& par, double lambda,
                            const Eigen::VectorXd& x) {
  Eigen::VectorXd z(x.size());
  const bool closed = par.family() != ParFamily::general;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    z[i] = closed ? prox_scalar(par, lambda, x[i]).point
                  : prox_oracle(par, lambda, x[i]).point;
  }
  return z;
}

}  // namespace paro
