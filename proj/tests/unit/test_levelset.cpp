#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "popsteady/error.hpp"
#include "popsteady/fixedpoint.hpp"
#include "popsteady/levelset.hpp"

using namespace popsteady;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

LevelFunction fn(std::function<double(const Environment&)> f) { return LevelFunction{std::move(f), {}}; }

LevelFunction line() {
  return fn([](const Environment& e) { return 2.0 - e.e1 - e.e2; });
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

LevelCurve line_curve(int n_rays) {
  TraceOptions t;
  t.n_rays = n_rays;
  return trace_zero_set(line(), t);
}

}  // namespace

TEST(RayDirection, ExactOnAxes) {
  EXPECT_EQ(ray_direction(0.0), (Environment{1.0, 0.0}));
  EXPECT_EQ(ray_direction(kHalfPi), (Environment{0.0, 1.0}));
  EXPECT_NEAR(simplex_coordinate({1.0, 3.0}), 0.75, 1e-15);
  EXPECT_NEAR(simplex_angle(0.5), std::numbers::pi / 4.0, 1e-15);
}

TEST(BracketOnRay, Examples) {
  EXPECT_NEAR(bracket_on_ray(line(), std::numbers::pi / 4.0, 10.0, 1e-12), std::sqrt(2.0), 1e-11);
  EXPECT_NEAR(bracket_on_ray(line(), 0.0, 10.0, 1e-12), 2.0, 1e-11);
  EXPECT_EQ(kind_of([] { bracket_on_ray(fn([](const Environment&) { return 1.0; }), 0.3, 10.0); }),
            ErrorKind::NoOuterSignChange);
  EXPECT_EQ(kind_of([] { bracket_on_ray(fn([](const Environment& e) { return e.e1 - 1.0; }), 0.3, 10.0); }),
            ErrorKind::BadOrigin);
}

TEST(BracketOnRay, UniqueRootIndependentOfScanResolution) {
  // A decreasing function scanned on a 4x finer radius grid gives the same root.
  oracle::Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = gen.uniform(1.0, 3.0), b = gen.uniform(1.0, 3.0), c = gen.uniform(0.5, 2.0);
    const LevelFunction f = fn([=](const Environment& e) { return c - a * e.e1 - b * e.e2 * e.e2 - e.e1 * e.e2; });
    const double theta = gen.uniform(0.0, kHalfPi);
    const double r = bracket_on_ray(f, theta, 10.0, 1e-12);
    const double fine = bracket_on_ray(f, theta, 2.5, 1e-12);  // steps of 2.5/64 = (10/64)/4
    EXPECT_NEAR(r, fine, 1e-11);
  }
}

TEST(RootsOnRay, EnumeratesEverySignChange) {
  const LevelFunction ring = fn([](const Environment& e) {
    const double r = std::hypot(e.e1, e.e2);
    return (1.0 - r) * (2.0 - r) * (3.0 - r);
  });
  const auto roots = roots_on_ray(ring, 0.4, 10.0, 1e-12);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], 1.0, 1e-11);
  EXPECT_NEAR(roots[1], 2.0, 1e-11);
  EXPECT_NEAR(roots[2], 3.0, 1e-11);
  TraceOptions t;
  t.n_rays = 9;
  EXPECT_EQ(count_branches(ring, t), 3);
  t.branch = 2;
  for (const auto& s : trace_zero_set(ring, t).samples) EXPECT_NEAR(s.rho, 3.0, 1e-9);
}

TEST(TraceZeroSet, Line) {
  TraceOptions t;
  t.n_rays = 101;
  const LevelCurve c = trace_zero_set(line(), t);
  ASSERT_EQ(c.samples.size(), 101u);
  EXPECT_EQ(c.samples.front().theta, 0.0);
  EXPECT_EQ(c.samples.back().theta, kHalfPi);
  EXPECT_EQ(c.samples.front().point.e2, 0.0);
  EXPECT_EQ(c.samples.back().point.e1, 0.0);
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const auto& s = c.samples[i];
    EXPECT_LE(std::abs(s.point.e1 + s.point.e2 - 2.0), 1e-8);
    EXPECT_GT(s.rho, 0.0);
    EXPECT_LE(s.rho, t.r_max);
    if (i > 0) {
      EXPECT_GT(s.theta, c.samples[i - 1].theta);
    }
  }
}

TEST(TraceZeroSet, Circle) {
  TraceOptions t;
  t.n_rays = 33;
  const LevelCurve c = trace_zero_set(fn([](const Environment& e) { return 1.0 - e.e1 * e.e1 - e.e2 * e.e2; }), t);
  for (const auto& s : c.samples) EXPECT_LE(std::abs(std::hypot(s.point.e1, s.point.e2) - 1.0), 1e-8);
}

TEST(TraceZeroSet, JAConstSpectralBound) {
  const TransportSystem sys(oracle::ConstJA{}.model(), 2000);
  TraceOptions t;
  t.n_rays = 257;
  const LevelCurve c = trace_zero_set(spectral_level_function(sys), t);
  ASSERT_EQ(c.samples.size(), 257u);
  for (const auto& s : c.samples) EXPECT_LE(std::abs(s.point.e1 + s.point.e2 - 2.0), 1e-6);
}

TEST(TraceZeroSet, ResidualsWithinLipschitzScaledTolerance) {
  oracle::Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = gen.uniform(0.5, 3.0), b = gen.uniform(0.5, 3.0), c = gen.uniform(0.5, 3.0);
    const LevelFunction f = fn([=](const Environment& e) { return c - a * e.e1 - b * e.e2 - e.e1 * e.e2; });
    TraceOptions t;
    t.n_rays = 17;
    t.tol = 1e-10;
    for (const auto& s : trace_zero_set(f, t).samples) {
      // Lipschitz estimate of f along the ray near the root.
      const Environment d = ray_direction(s.theta);
      const double step = 1e-3;
      const double L = std::abs(f.value(s.point + step * d) - f.value(s.point)) / step + 1.0;
      EXPECT_LE(std::abs(s.sigma_residual), t.tol * L);
    }
  }
}

TEST(TraceZeroSet, FailingRayIsReportedOrSkipped) {
  const LevelFunction f = fn([](const Environment& e) { return 1.0 - e.e1; });
  TraceOptions t;
  t.n_rays = 9;
  EXPECT_EQ(kind_of([&] { trace_zero_set(f, t); }), ErrorKind::NoOuterSignChange);
  t.skip_failed_rays = true;
  const LevelCurve c = trace_zero_set(f, t);
  EXPECT_EQ(c.samples.size() + c.skipped_thetas.size(), 9u);
  EXPECT_EQ(c.skipped_thetas.back(), kHalfPi);
}

TEST(ProjectToCurve, Examples) {
  const LevelCurve c = line_curve(101);
  const Environment a = project_to_curve({3, 3}, c);
  EXPECT_NEAR(a.e1, 1.0, 1e-9);
  EXPECT_NEAR(a.e2, 1.0, 1e-9);
  const Environment b = project_to_curve({2, 0}, c);
  EXPECT_NEAR(b.e1, 2.0, 1e-10);
  EXPECT_EQ(b.e2, 0.0);
  const Environment d = project_to_curve({0, 5}, c);
  EXPECT_EQ(d.e1, 0.0);
  EXPECT_NEAR(d.e2, 2.0, 1e-10);
}

TEST(ProjectToCurve, IdempotentOnSamplesAndCloseBetween) {
  const LevelCurve c = line_curve(65);
  for (const auto& s : c.samples) {
    const Environment p = project_to_curve(s.point, c);
    EXPECT_NEAR(p.e1, s.point.e1, 1e-12);
    EXPECT_NEAR(p.e2, s.point.e2, 1e-12);
  }
  oracle::Gen gen(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Environment q = gen.environment(5.0);
    const Environment p = project_to_curve(q, c);
    EXPECT_LE(std::abs(p.e1 + p.e2 - 2.0), 1e-3);
    EXPECT_NEAR(p.e1 * q.e2, p.e2 * q.e1, 1e-12 * (1.0 + q.norm1()));  // same ray
  }
}
