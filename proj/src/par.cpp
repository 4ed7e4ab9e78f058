#include "paro/par.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace paro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument("par: " + msg);
}

void check_half_levels(const std::vector<double>& levels) {
  require(!levels.empty(), "level list must be nonempty");
  require(levels.front() == 0.0, "symmetric families need q_0 = 0");
  for (std::size_t k = 1; k < levels.size(); ++k) {
    require(std::isfinite(levels[k]) && levels[k] > levels[k - 1],
            "levels must be finite and strictly increasing");
  }
}

}  // namespace

std::string family_name(ParFamily f) {
  switch (f) {
    case ParFamily::convex: return "convex";
    case ParFamily::quasiconvex_uniform: return "quasiconvex-uniform";
    case ParFamily::nonconvex_nearest: return "nonconvex-nearest";
    case ParFamily::general: return "general";
  }
  throw std::logic_error("par: bad family tag");
}

ParFamily family_from_name(const std::string& name) {
  if (name == "convex") return ParFamily::convex;
  if (name == "quasiconvex-uniform") return ParFamily::quasiconvex_uniform;
  if (name == "nonconvex-nearest") return ParFamily::nonconvex_nearest;
  if (name == "general") return ParFamily::general;
  throw std::invalid_argument("par: unknown family name '" + name + "'");
}

void ParSpec::finalize_segments() {
  const std::size_t m = levels_.size();
  intercepts_.assign(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    intercepts_[k] =
        intercepts_[k - 1] + slopes_[k - 1] * (levels_[k] - levels_[k - 1]);
  }
  a_max_ = 0.0;
  for (double a : slopes_) {
    if (std::isfinite(a)) a_max_ = std::max(a_max_, std::fabs(a));
  }
  switch (family_) {
    case ParFamily::convex:
      nu_ = slopes_.front();
      break;
    case ParFamily::general: {
      // value(x)/|x| is monotone on each segment, so its infimum over x != 0
      // is attained at a breakpoint or in the tail limit (the final slope).
      double lo = kInf;
      for (std::size_t k = 1; k < m; ++k)
        lo = std::min(lo, intercepts_[k] / levels_[k]);
      if (std::isfinite(slopes_.back())) lo = std::min(lo, slopes_.back());
      nu_ = std::max(0.0, lo);
      break;
    }
    case ParFamily::quasiconvex_uniform:
    case ParFamily::nonconvex_nearest:
      break;  // set by the factory
  }
}

ParSpec ParSpec::convex(std::vector<double> levels, std::vector<double> slopes) {
  check_half_levels(levels);
  require(slopes.size() == levels.size(), "slope count must equal level count");
  require(slopes.front() >= 0.0, "convex slopes must be nonnegative");
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const bool last = (k + 1 == slopes.size());
    require(std::isfinite(slopes[k]) || (last && slopes[k] == kInf),
            "infinite slope is only allowed on the final segment");
    if (k > 0)
      require(slopes[k] > slopes[k - 1], "convex slopes must be strictly increasing");
  }
  ParSpec p;
  p.family_ = ParFamily::convex;
  p.levels_ = std::move(levels);
  p.slopes_ = std::move(slopes);
  p.finalize_segments();
  return p;
}

ParSpec ParSpec::general(std::vector<double> levels, std::vector<double> slopes) {
  check_half_levels(levels);
  require(slopes.size() == levels.size(), "slope count must equal level count");
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    require(std::isfinite(slopes[k]), "general family requires finite slopes");
    if (k > 0) require(slopes[k] != slopes[k - 1], "adjacent slopes must differ");
  }
  ParSpec p;
  p.family_ = ParFamily::general;
  p.levels_ = std::move(levels);
  p.slopes_ = std::move(slopes);
  p.finalize_segments();
  return p;
}

ParSpec ParSpec::quasiconvex_uniform(double gap) {
  require(std::isfinite(gap) && gap > 0.0, "gap must be positive");
  ParSpec p;
  p.family_ = ParFamily::quasiconvex_uniform;
  p.gap_ = gap;
  p.a_max_ = 1.0;
  p.nu_ = 0.5;
  return p;
}

ParSpec ParSpec::nonconvex_nearest(std::vector<double> levels) {
  require(!levels.empty(), "level list must be nonempty");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    require(std::isfinite(levels[k]), "levels must be finite");
    if (k > 0) require(levels[k] > levels[k - 1], "levels must be strictly increasing");
  }
  ParSpec p;
  p.family_ = ParFamily::nonconvex_nearest;
  p.levels_ = std::move(levels);
  p.a_max_ = 1.0;
  p.nu_ = 0.0;
  return p;
}

bool ParSpec::has_infinite_tail() const {
  return !slopes_.empty() && slopes_.back() == kInf;
}

double ParSpec::value(double x) const {
  switch (family_) {
    case ParFamily::convex:
    case ParFamily::general: {
      const double u = std::fabs(x);
      auto it = std::upper_bound(levels_.begin(), levels_.end(), u);
      const std::size_t k = static_cast<std::size_t>(it - levels_.begin()) - 1;
      const double du = u - levels_[k];
      if (du == 0.0) return intercepts_[k];
      return intercepts_[k] + slopes_[k] * du;  // +inf past q_m when capped
    }
    case ParFamily::quasiconvex_uniform: {
      const double u = std::fabs(x);
      const double k = std::floor(u / gap_);
      const double r = u - k * gap_;
      if (2.0 * r <= gap_) return u - 0.5 * k * gap_;
      return 0.5 * (k + 1.0) * gap_;
    }
    case ParFamily::nonconvex_nearest:
      return distance_to_level_set(x);
  }
  throw std::logic_error("par: bad family tag");
}

SubgradInterval ParSpec::subdifferential(double x) const {
  switch (family_) {
    case ParFamily::convex:
    case ParFamily::general: {
      const double u = std::fabs(x);
      if (u == 0.0) {
        const double a0 = slopes_.front();
        return {std::min(a0, -a0), std::max(a0, -a0)};
      }
      auto it = std::upper_bound(levels_.begin(), levels_.end(), u);
      const std::size_t k = static_cast<std::size_t>(it - levels_.begin()) - 1;
      SubgradInterval s;
      if (k >= 1 && u == levels_[k]) {
        s = {std::min(slopes_[k - 1], slopes_[k]),
             std::max(slopes_[k - 1], slopes_[k])};
      } else {
        s = {slopes_[k], slopes_[k]};  // [inf, inf] past the capped domain
      }
      if (x < 0.0) return {-s.hi, -s.lo};
      return s;
    }
    case ParFamily::quasiconvex_uniform: {
      const double u = std::fabs(x);
      if (u == 0.0) return {-1.0, 1.0};
      // Exact hits on levels/midpoints matter only for snapped inputs, which
      // carry the same double the lattice arithmetic below produces.
      const double t = u / gap_;
      const double kr = std::round(t);
      SubgradInterval s;
      if (kr >= 1.0 && u == kr * gap_) {
        s = {0.0, 1.0};
      } else {
        const double k = std::floor(t);
        const double r = u - k * gap_;
        if (2.0 * r == gap_) s = {0.0, 1.0};
        else if (2.0 * r < gap_) s = {1.0, 1.0};
        else s = {0.0, 0.0};
      }
      if (x < 0.0) return {-s.hi, -s.lo};
      return s;
    }
    case ParFamily::nonconvex_nearest: {
      if (x < levels_.front()) return {-1.0, -1.0};
      if (x > levels_.back()) return {1.0, 1.0};
      auto it = std::lower_bound(levels_.begin(), levels_.end(), x);
      if (it != levels_.end() && *it == x) return {-1.0, 1.0};
      const double hi = *it;
      const double lo = *(it - 1);
      const double mid = 0.5 * (lo + hi);
      if (x < mid) return {1.0, 1.0};
      if (x > mid) return {-1.0, -1.0};
      return {-1.0, 1.0};
    }
  }
  throw std::logic_error("par: bad family tag");
}

double ParSpec::level_at(std::int64_t idx) const {
  switch (family_) {
    case ParFamily::convex:
    case ParFamily::general: {
      const std::int64_t a = idx < 0 ? -idx : idx;
      require(a < static_cast<std::int64_t>(levels_.size()), "level index out of range");
      const double q = levels_[static_cast<std::size_t>(a)];
      return idx < 0 ? -q : q;
    }
    case ParFamily::quasiconvex_uniform:
      return static_cast<double>(idx) * gap_;
    case ParFamily::nonconvex_nearest:
      require(idx >= 0 && idx < static_cast<std::int64_t>(levels_.size()),
              "level index out of range");
      return levels_[static_cast<std::size_t>(idx)];
  }
  throw std::logic_error("par: bad family tag");
}

std::int64_t ParSpec::nearest_level_index(double x) const {
  switch (family_) {
    case ParFamily::convex:
    case ParFamily::general: {
      const double u = std::fabs(x);
      auto it = std::lower_bound(levels_.begin(), levels_.end(), u);
      std::size_t j;
      if (it == levels_.end()) {
        j = levels_.size() - 1;
      } else if (it == levels_.begin()) {
        j = 0;
      } else {
        const std::size_t hi = static_cast<std::size_t>(it - levels_.begin());
        // ties go to the smaller level, i.e. the smaller magnitude
        j = (u - levels_[hi - 1] <= levels_[hi] - u) ? hi - 1 : hi;
      }
      const auto sj = static_cast<std::int64_t>(j);
      return (x < 0.0) ? -sj : sj;
    }
    case ParFamily::quasiconvex_uniform: {
      const double u = std::fabs(x);
      const double t = u / gap_;
      double k = std::floor(t);
      if (t - k > 0.5) k += 1.0;  // tie keeps the smaller multiple
      const auto sk = static_cast<std::int64_t>(k);
      return (x < 0.0) ? -sk : sk;
    }
    case ParFamily::nonconvex_nearest: {
      auto it = std::lower_bound(levels_.begin(), levels_.end(), x);
      if (it == levels_.end()) return static_cast<std::int64_t>(levels_.size()) - 1;
      if (it == levels_.begin() || *it == x)
        return static_cast<std::int64_t>(it - levels_.begin());
      const std::size_t hi = static_cast<std::size_t>(it - levels_.begin());
      const double dlo = x - levels_[hi - 1];
      const double dhi = levels_[hi] - x;
      if (dlo < dhi) return static_cast<std::int64_t>(hi) - 1;
      if (dhi < dlo) return static_cast<std::int64_t>(hi);
      // tie: smaller |level|, then smaller level
      const double alo = std::fabs(levels_[hi - 1]);
      const double ahi = std::fabs(levels_[hi]);
      if (alo <= ahi) return static_cast<std::int64_t>(hi) - 1;
      return static_cast<std::int64_t>(hi);
    }
  }
  throw std::logic_error("par: bad family tag");
}

double ParSpec::project_nearest(double x) const {
  return level_at(nearest_level_index(x));
}

double ParSpec::distance_to_level_set(double x) const {
  return std::fabs(x - project_nearest(x));
}

ParSpec build_par(ParFamily family, const std::vector<double>& levels,
                  const std::vector<double>& slopes) {
  switch (family) {
    case ParFamily::convex:
      return ParSpec::convex(levels, slopes);
    case ParFamily::general:
      return ParSpec::general(levels, slopes);
    case ParFamily::nonconvex_nearest:
      require(slopes.empty(), "nonconvex-nearest takes no slopes");
      return ParSpec::nonconvex_nearest(levels);
    case ParFamily::quasiconvex_uniform: {
      require(slopes.empty(), "quasiconvex-uniform takes no slopes");
      require(levels.size() >= 2 && levels.front() == 0.0,
              "quasiconvex-uniform needs levels (0, q, 2q, ...)");
      const double gap = levels[1];
      for (std::size_t k = 0; k < levels.size(); ++k) {
        require(std::fabs(levels[k] - static_cast<double>(k) * gap) <=
                    1e-12 * gap * static_cast<double>(std::max<std::size_t>(k, 1)),
                "quasiconvex-uniform levels must be uniformly spaced");
      }
      return ParSpec::quasiconvex_uniform(gap);
    }
  }
  throw std::logic_error("par: bad family tag");
}

QuantizationReport quantization_rate(const std::vector<double>& x,
                                     const ParSpec& par, double tol) {
  require(tol > 0.0, "quantization tolerance must be positive");
  require(!x.empty(), "quantization rate of an empty vector is undefined");
  QuantizationReport rep;
  rep.tolerance = tol;
  rep.quantized_mask.resize(x.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool on = par.distance_to_level_set(x[i]) <= tol;
    rep.quantized_mask[i] = on;
    hits += on ? 1 : 0;
  }
  rep.rate = static_cast<double>(hits) / static_cast<double>(x.size());
  return rep;
}

ApproxTarget approx_target_from_name(const std::string& name) {
  if (name == "square") return ApproxTarget::square;
  if (name == "abs") return ApproxTarget::abs;
  if (name == "sqrt") return ApproxTarget::sqrt;
  throw std::invalid_argument("par: unknown approximation target '" + name + "'");
}

std::string approx_target_name(ApproxTarget t) {
  switch (t) {
    case ApproxTarget::square: return "square";
    case ApproxTarget::abs: return "abs";
    case ApproxTarget::sqrt: return "sqrt";
  }
  throw std::logic_error("par: bad approximation target");
}

ParSpec par_approx_classic(ApproxTarget target, double gap, double max_level) {
  if (!(std::isfinite(gap) && gap > 0.0))
    throw std::invalid_argument("par: approximation gap must be positive");
  const auto count = std::floor(max_level / gap + 1e-12);
  if (!(count >= 1.0 && count <= 2e6))
    throw std::invalid_argument("par: max_level must allow between 1 and 2e6 levels");
  const auto K = static_cast<std::int64_t>(count);

  auto secant = [&](std::int64_t k) {
    switch (target) {
      case ApproxTarget::square:
        return (static_cast<double>(k) + 0.5) * gap;
      case ApproxTarget::abs:
        return 1.0;
      case ApproxTarget::sqrt: {
        const double a = std::sqrt(static_cast<double>(k) * gap);
        const double b = std::sqrt(static_cast<double>(k + 1) * gap);
        return (b - a) / gap;
      }
    }
    throw std::logic_error("par: bad approximation target");
  };

  std::vector<double> levels{0.0};
  std::vector<double> slopes{secant(0)};
  for (std::int64_t k = 1; k <= K; ++k) {
    const double a = secant(k);
    if (a == slopes.back()) continue;  // merge runs of equal secants
    levels.push_back(static_cast<double>(k) * gap);
    slopes.push_back(a);
  }
  if (target == ApproxTarget::sqrt) return ParSpec::general(levels, slopes);
  return ParSpec::convex(levels, slopes);
}

}  // namespace paro
