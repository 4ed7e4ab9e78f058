#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "paro/par.hpp"

using paro::ApproxTarget;
using paro::ParFamily;
using paro::ParSpec;
using paro::SubgradInterval;

namespace {

// Deterministic uniform sampler for property checks.
struct Uniform {
  std::uint64_t state = 0x853c49e6748fea9bULL;
  double operator()(double lo, double hi) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

}  // namespace

TEST_CASE("intercepts follow the continuity recursion") {
  const ParSpec par = ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5});
  REQUIRE(par.intercepts().size() == 3);
  CHECK(par.intercepts()[0] == 0.0);
  CHECK(par.intercepts()[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(par.intercepts()[2] == doctest::Approx(2.0).epsilon(1e-14));

  const ParSpec l1 = ParSpec::convex({0.0}, {1.0});
  REQUIRE(l1.intercepts().size() == 1);
  CHECK(l1.intercepts()[0] == 0.0);
}

TEST_CASE("penalty values at frozen points") {
  const ParSpec par = ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5});
  CHECK(par.value(1.5) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(par.value(0.0) == 0.0);
  CHECK(par.value(-1.5) == doctest::Approx(1.25).epsilon(1e-14));  // even

  const ParSpec quasi = ParSpec::quasiconvex_uniform(1.0);
  CHECK(quasi.value(1.75) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quasi.value(0.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(quasi.value(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(quasi.value(0.0) == 0.0);

  const ParSpec near = ParSpec::nonconvex_nearest({-1.0, 1.0});
  CHECK(near.value(0.3) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(near.value(1.0) == 0.0);
  CHECK(near.value(-2.5) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("subdifferential intervals at frozen points") {
  const ParSpec l1 = ParSpec::convex({0.0}, {1.0});
  SubgradInterval s = l1.subdifferential(0.0);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == 1.0);

  const ParSpec par = ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5});
  s = par.subdifferential(1.0);  // breakpoint: hull of adjacent slopes
  CHECK(s.lo == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.hi == doctest::Approx(1.5).epsilon(1e-14));
  s = par.subdifferential(-1.5);  // interior, odd reflection of the slope
  CHECK(s.lo == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(s.hi == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("subdifferential matches finite-difference slopes off breakpoints") {
  const std::vector<ParSpec> pars = {
      ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}),
      ParSpec::convex({0.0, 0.7, 1.9}, {0.3, 1.1, 4.0}),
      ParSpec::quasiconvex_uniform(0.8),
      ParSpec::nonconvex_nearest({-2.0, -0.5, 1.0, 3.0})};
  Uniform rng;
  for (const ParSpec& par : pars) {
    int tested = 0;
    while (tested < 200) {
      const double x = rng(-4.0, 4.0);
      // Keep clear of breakpoints (levels, midpoints, half-gap kinks).
      const double frac = std::fabs(std::remainder(x, 0.05));
      if (frac < 1e-3) continue;
      const SubgradInterval s = par.subdifferential(x);
      if (s.lo != s.hi) continue;  // sampled a kink after all
      const double h = 1e-7;
      const double fd = (par.value(x + h) - par.value(x - h)) / (2.0 * h);
      CHECK(std::fabs(fd - s.lo) <= 1e-6);
      ++tested;
    }
  }
}

TEST_CASE("value is continuous and even across breakpoints") {
  const std::vector<ParSpec> pars = {
      ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}),
      ParSpec::convex({0.0, 1.0, 2.0}, {0.2, 1.0,
                                        std::numeric_limits<double>::infinity()}),
      ParSpec::quasiconvex_uniform(0.6),
      ParSpec::nonconvex_nearest({-1.5, 0.5, 2.0})};
  for (const ParSpec& par : pars) {
    for (double b : par.levels()) {
      for (double side : {-1.0, 1.0}) {
        const double x = side * b;
        const double eps = 1e-10;
        const double v = par.value(x);
        if (!std::isfinite(v)) continue;
        // Continuity holds on the (closed) domain; just past the cap of an
        // infinite-slope penalty the value is +inf, so probe one-sided there.
        const double vp = par.value(x + eps);
        const double vm = par.value(x - eps);
        if (std::isfinite(vp)) CHECK(std::fabs(vp - v) <= 1e-8 * (1.0 + std::fabs(v)));
        if (std::isfinite(vm)) CHECK(std::fabs(vm - v) <= 1e-8 * (1.0 + std::fabs(v)));
      }
    }
    if (!par.symmetric()) continue;
    Uniform rng;
    for (int i = 0; i < 100; ++i) {
      const double x = rng(-3.0, 3.0);
      CHECK(par.value(x) == par.value(-x));
    }
  }
}

TEST_CASE("capped convex penalty is infinite past its last level") {
  const double inf = std::numeric_limits<double>::infinity();
  const ParSpec par = ParSpec::convex({0.0, 1.0, 2.0}, {0.2, 1.0, inf});
  CHECK(par.value(2.0) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(par.value(2.0 + 1e-9) == inf);
  CHECK(par.value(-5.0) == inf);
  CHECK(par.has_infinite_tail());
  CHECK(par.a_max() == 1.0);  // largest finite slope
}

TEST_CASE("growth and Lipschitz constants per family") {
  CHECK(ParSpec::convex({0.0}, {1.0}).nu() == 1.0);
  CHECK(ParSpec::convex({0.0, 1.0}, {0.2, 0.9}).nu() == doctest::Approx(0.2));
  const ParSpec quasi = ParSpec::quasiconvex_uniform(0.3);
  CHECK(quasi.a_max() == 1.0);
  CHECK(quasi.nu() == 0.5);
  CHECK(ParSpec::nonconvex_nearest({-1.0, 0.0, 1.0}).nu() == 0.0);
  const ParSpec gen = ParSpec::general({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5});
  CHECK(gen.nu() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gen.a_max() == 2.5);
  // nu really is a lower linear bound.
  Uniform rng;
  for (int i = 0; i < 300; ++i) {
    const double x = rng(-6.0, 6.0);
    CHECK(gen.value(x) >= gen.nu() * std::fabs(x) - 1e-12);
    CHECK(quasi.value(x) >= quasi.nu() * std::fabs(x) - 1e-12);
  }
}

TEST_CASE("level indexing and nearest-level projection") {
  const ParSpec par = ParSpec::convex({0.0, 1.0, 2.0},
                                      {1.0, 2.0, 3.0});
  CHECK(par.level_at(0) == 0.0);
  CHECK(par.level_at(2) == 2.0);
  CHECK(par.level_at(-2) == -2.0);
  CHECK(par.project_nearest(1.3) == 1.0);
  CHECK(par.project_nearest(0.5) == 0.0);   // tie: smaller magnitude wins
  CHECK(par.project_nearest(-0.5) == 0.0);  // tie across sign: |0| < |-1|
  CHECK(par.distance_to_level_set(1.3) == doctest::Approx(0.3).epsilon(1e-14));

  const ParSpec quasi = ParSpec::quasiconvex_uniform(0.5);
  CHECK(quasi.level_at(3) == 1.5);
  CHECK(quasi.level_at(-4) == -2.0);
  CHECK(quasi.project_nearest(1.74) == doctest::Approx(1.5));
  CHECK(quasi.nearest_level_index(1.74) == 3);

  const ParSpec near = ParSpec::nonconvex_nearest({-1.0, 1.0});
  CHECK(near.project_nearest(0.0) == -1.0);  // |.| tie broken toward smaller level
  CHECK(near.project_nearest(0.3) == 1.0);
  CHECK(near.level_at(0) == -1.0);
  CHECK(near.level_at(1) == 1.0);
  // Projection is idempotent.
  Uniform rng;
  for (int i = 0; i < 200; ++i) {
    const double x = rng(-4.0, 4.0);
    const double p = near.project_nearest(x);
    CHECK(near.project_nearest(p) == p);
    CHECK(par.project_nearest(par.project_nearest(x)) == par.project_nearest(x));
  }
}

TEST_CASE("quantization rate counts coordinates on levels") {
  const ParSpec par = ParSpec::convex({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0, 4.0});
  const paro::QuantizationReport rep =
      paro::quantization_rate({0.0, 1.0, 0.5, 2.0}, par, 1e-6);
  CHECK(rep.rate == doctest::Approx(0.75).epsilon(1e-14));
  REQUIRE(rep.quantized_mask.size() == 4);
  CHECK(rep.quantized_mask[0]);
  CHECK(rep.quantized_mask[1]);
  CHECK(!rep.quantized_mask[2]);
  CHECK(rep.quantized_mask[3]);
  CHECK(rep.tolerance == 1e-6);

  CHECK(paro::quantization_rate({1.0 + 1e-7}, par, 1e-6).rate == 1.0);
  CHECK(paro::quantization_rate({0.0, 0.0, 0.0}, par, 1e-6).rate == 1.0);
  CHECK(paro::quantization_rate({1.0 + 1e-5}, par, 1e-6).rate == 0.0);
}

TEST_CASE("construction rejects malformed inputs") {
  const double inf = std::numeric_limits<double>::infinity();
  // Convex slopes must increase strictly.
  CHECK_THROWS_AS(ParSpec::convex({0.0, 1.0}, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::convex({0.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::convex({0.0}, {-1.0}), std::invalid_argument);
  // Levels must start at zero (symmetric families) and increase.
  CHECK_THROWS_AS(ParSpec::convex({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::general({0.0, 2.0, 1.0}, {1.0, 2.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::general({}, {}), std::invalid_argument);
  // Infinite slope only in the final convex position.
  CHECK_THROWS_AS(ParSpec::convex({0.0, 1.0}, {inf, inf}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::general({0.0, 1.0}, {1.0, inf}), std::invalid_argument);
  // Adjacent general slopes must differ, otherwise the breakpoint is fake.
  CHECK_THROWS_AS(ParSpec::general({0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
  // Nearest-level list must be increasing and nonempty.
  CHECK_THROWS_AS(ParSpec::nonconvex_nearest({}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::nonconvex_nearest({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ParSpec::quasiconvex_uniform(0.0), std::invalid_argument);
}

TEST_CASE("family-tag dispatcher mirrors the factories") {
  const ParSpec a = paro::build_par(ParFamily::convex, {0.0, 1.0}, {1.0, 2.0});
  CHECK(a.family() == ParFamily::convex);
  CHECK(a.value(1.5) == doctest::Approx(2.0));  // 1 + 2*0.5

  const ParSpec q = paro::build_par(ParFamily::quasiconvex_uniform,
                                    {0.0, 0.5, 1.0}, {});
  CHECK(q.gap() == doctest::Approx(0.5));

  const ParSpec n = paro::build_par(ParFamily::nonconvex_nearest,
                                    {-1.0, 0.0, 2.0}, {});
  CHECK(n.value(1.0) == doctest::Approx(1.0));

  CHECK(paro::family_from_name("quasiconvex-uniform") ==
        ParFamily::quasiconvex_uniform);
  CHECK(paro::family_name(ParFamily::nonconvex_nearest) == "nonconvex-nearest");
  CHECK_THROWS_AS(paro::family_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("square secant approximant on the unit grid") {
  const ParSpec par = paro::par_approx_classic(ApproxTarget::square, 1.0, 3.0);
  const std::vector<double> levels = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> slopes = {0.5, 1.5, 2.5, 3.5};
  const std::vector<double> intercepts = {0.0, 0.5, 2.0, 4.5};
  REQUIRE(par.levels().size() == levels.size());
  REQUIRE(par.slopes().size() == slopes.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    CHECK(par.levels()[k] == doctest::Approx(levels[k]).epsilon(1e-14));
    CHECK(par.slopes()[k] == doctest::Approx(slopes[k]).epsilon(1e-14));
    CHECK(par.intercepts()[k] == doctest::Approx(intercepts[k]).epsilon(1e-14));
    // Exact interpolation of x^2/2 at the breakpoints.
    const double k2 = levels[k] * levels[k] / 2.0;
    CHECK(par.value(levels[k]) == doctest::Approx(k2).epsilon(1e-12));
  }
  CHECK(par.family() == ParFamily::convex);
  CHECK(par.value(4.0) == doctest::Approx(8.0).epsilon(1e-12));  // extended secant
}

TEST_CASE("square approximant dominates the parabola by at most gap^2/8") {
  for (double gap : {0.5, 0.1}) {
    const ParSpec par = paro::par_approx_classic(ApproxTarget::square, gap, 3.0);
    const double k = std::floor(3.0 / gap + 1e-12);
    for (double x = -3.0 - gap; x <= 3.0 + gap; x += gap / 37.0) {
      const double diff = par.value(x) - x * x / 2.0;
      CHECK(diff >= -1e-12);
      CHECK(diff <= gap * gap / 8.0 + 1e-12);
    }
    // The gap peaks exactly at segment midpoints.
    for (double mid : {0.5 * gap, 1.5 * gap, 2.5 * gap}) {
      if (mid > k * gap) break;
      CHECK(par.value(mid) - mid * mid / 2.0 ==
            doctest::Approx(gap * gap / 8.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("absolute-value approximant collapses to the single-segment penalty") {
  const ParSpec par = paro::par_approx_classic(ApproxTarget::abs, 0.5, 2.0);
  REQUIRE(par.slopes().size() == 1);
  CHECK(par.slopes()[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(par.value(2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(par.value(1.3) == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(par.value(-0.7) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("square-root approximant interpolates from below") {
  const ParSpec par = paro::par_approx_classic(ApproxTarget::sqrt, 1.0, 4.0);
  CHECK(par.family() == ParFamily::general);  // secants decrease
  CHECK(par.value(4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(par.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(par.value(2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  for (double x = 0.0; x <= 4.0; x += 0.013) {
    CHECK(par.value(x) <= std::sqrt(x) + 1e-12);
  }
}

TEST_CASE("approximant name round trip") {
  CHECK(paro::approx_target_from_name("square") == ApproxTarget::square);
  CHECK(paro::approx_target_from_name("abs") == ApproxTarget::abs);
  CHECK(paro::approx_target_from_name("sqrt") == ApproxTarget::sqrt);
  CHECK(paro::approx_target_name(ApproxTarget::sqrt) == "sqrt");
  CHECK_THROWS_AS(paro::approx_target_from_name("cube"), std::invalid_argument);
}
