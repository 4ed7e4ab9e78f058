#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paro {

// Families of piecewise-affine regularizers. The first three have closed-form
// proximal mappings; "general" admits arbitrary distinct segment slopes and is
// served by the brute-force prox oracle only.
enum class ParFamily { convex, quasiconvex_uniform, nonconvex_nearest, general };

std::string family_name(ParFamily f);
ParFamily family_from_name(const std::string& name);

// Closed interval [lo, hi] of Clarke subgradients; lo == hi at differentiable
// points. hi may be +inf on the boundary of a capped convex penalty.
struct SubgradInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct QuantizationReport {
  double rate = 0.0;                    // fraction of coordinates on a level
  std::vector<bool> quantized_mask;     // per coordinate
  double tolerance = 0.0;               // absolute snap tolerance used
};

// Even piecewise-affine penalty determined by levels 0 = q_0 < q_1 < ... < q_m
// and segment slopes a_0..a_m (a_k applies on [q_k, q_{k+1}], a_m on the final
// unbounded piece). Intercepts follow the recursion b_0 = 0,
// b_k = b_{k-1} + a_{k-1} (q_k - q_{k-1}), which makes the penalty continuous.
//
// Two non-segment-based variants share the type:
//  - quasiconvex_uniform: levels are all multiples of a single gap q; the
//    penalty rises with unit slope for half a gap and is flat for the other
//    half, so it is bounded on each cell and 1-Lipschitz overall.
//  - nonconvex_nearest: the penalty is the distance to an explicit (possibly
//    asymmetric) finite level list.
class ParSpec {
 public:
  // convex: slopes strictly increasing and nonnegative, last may be +inf
  // (caps the penalty domain at [-q_m, q_m]).
  static ParSpec convex(std::vector<double> levels, std::vector<double> slopes);
  // general: finite slopes, adjacent distinct, otherwise unrestricted.
  static ParSpec general(std::vector<double> levels, std::vector<double> slopes);
  static ParSpec quasiconvex_uniform(double gap);
  // Full ordered level list, asymmetry allowed. Penalty = distance to the set.
  static ParSpec nonconvex_nearest(std::vector<double> levels);

  ParFamily family() const { return family_; }
  // Symmetric families: nonnegative half of the level set (q_0 = 0 first).
  // nonconvex_nearest: the full list. quasiconvex_uniform: empty.
  const std::vector<double>& levels() const { return levels_; }
  const std::vector<double>& slopes() const { return slopes_; }
  const std::vector<double>& intercepts() const { return intercepts_; }
  double gap() const { return gap_; }

  double value(double x) const;
  SubgradInterval subdifferential(double x) const;

  // Largest finite |slope|; the penalty is a_max-Lipschitz on its domain.
  double a_max() const { return a_max_; }
  // Linear growth rate: value(x) >= nu * |x| everywhere. a_0 for convex, 1/2
  // for quasiconvex_uniform, 0 for nonconvex_nearest, computed for general.
  double nu() const { return nu_; }

  // Level indexing. Symmetric families use signed indices: level_at(i) =
  // sign(i) * q_|i|. quasiconvex_uniform: level_at(i) = i * gap, any i.
  // nonconvex_nearest: i indexes the stored list directly.
  double level_at(std::int64_t idx) const;
  std::int64_t nearest_level_index(double x) const;
  double project_nearest(double x) const;      // ties: smaller |level|, then smaller level
  double distance_to_level_set(double x) const;

  bool has_infinite_tail() const;
  bool symmetric() const {
    return family_ != ParFamily::nonconvex_nearest;
  }

 private:
  ParSpec() = default;

  ParFamily family_ = ParFamily::general;
  std::vector<double> levels_;
  std::vector<double> slopes_;
  std::vector<double> intercepts_;
  double gap_ = 0.0;
  double a_max_ = 0.0;
  double nu_ = 0.0;

  void finalize_segments();   // intercept recursion + a_max/nu bookkeeping
};

// Family-tag dispatcher over the factories above. Symmetric families take the
// nonnegative level half; nonconvex_nearest takes the full list and requires
// slopes empty; quasiconvex_uniform accepts a uniformly spaced level prefix
// (0, q, 2q, ...) with slopes empty and derives the gap.
ParSpec build_par(ParFamily family, const std::vector<double>& levels,
                  const std::vector<double>& slopes);

QuantizationReport quantization_rate(const std::vector<double>& x,
                                     const ParSpec& par, double tol);

enum class ApproxTarget { square, abs, sqrt };

ApproxTarget approx_target_from_name(const std::string& name);
std::string approx_target_name(ApproxTarget t);

// Piecewise-affine interpolant of x^2/2, |x| or sqrt(|x|) on the uniform grid
// {0, gap, ..., K*gap}, K = floor(max_level/gap). Segment slopes are the
// target's secants, so the interpolant matches the target at every breakpoint;
// one extra secant past the last level extends the penalty. Runs of equal
// secants are merged (|x| collapses to the single-segment l1 penalty).
ParSpec par_approx_classic(ApproxTarget target, double gap, double max_level);

}  // namespace paro
