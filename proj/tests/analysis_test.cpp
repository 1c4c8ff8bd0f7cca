#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcfob/analysis.hpp"
#include "mcfob/error.hpp"
#include "support/cases.hpp"

namespace mcfob {
namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form inverse of R' = -(d/R + 2N) for N > 0.
double sphere_time_at(double r0, double n, int d, double r) {
  return (r0 - r) / (2 * n) - d / (4 * n * n) * std::log((d + 2 * n * r0) / (d + 2 * n * r));
}

TEST(Sphere, InitialRadius) {
  EXPECT_EQ(sphere_radius(0.7, 1.0, 2, 0.0), 0.7);
}

TEST(Sphere, UnforcedClosedForm) {
  EXPECT_NEAR(sphere_radius(1.0, 0.0, 2, 0.1), std::sqrt(0.6), 1e-8);
  for (int d : {1, 2}) {
    for (double t = 0.0; t < 0.5 / d; t += 0.01) {
      EXPECT_NEAR(sphere_radius(1.0, 0.0, d, t), std::sqrt(1.0 - 2 * d * t), 1e-8) << d << " " << t;
    }
  }
}

TEST(Sphere, ForcedAgainstImplicitSolution) {
  for (int d : {1, 2}) {
    for (double n : {0.5, 1.0, 3.0}) {
      const double r0 = 0.8;
      for (double r : {0.7, 0.5, 0.2, 0.05}) {
        const double t = sphere_time_at(r0, n, d, r);
        EXPECT_NEAR(sphere_radius(r0, n, d, t), r, 1e-8) << d << " " << n << " " << r;
      }
      const double extinction = sphere_time_at(r0, n, d, 0.0);
      EXPECT_NEAR(sphere_extinction_time(r0, n, d), extinction, 1e-8);
    }
  }
}

TEST(Sphere, LowerBound) {
  EXPECT_GE(sphere_radius(0.5, 1.0, 1, 0.03), std::sqrt(0.25 - 6 * 0.03) - 1e-8);
  for (double t = 0.0; t < 0.25 / 6; t += 0.001) {
    EXPECT_GE(sphere_radius(0.5, 1.0, 1, t), std::sqrt(0.25 - 6 * t) - 1e-8);
  }
  for (int d : {1, 2}) {
    for (double n : {0.0, 0.5, 2.0}) {
      for (double r0 : {0.25, 1.0}) {
        EXPECT_GE(sphere_extinction_time(r0, n, d), r0 * r0 / (4 * n + 2 * d) - 1e-8);
      }
    }
  }
}

TEST(Sphere, DecreasingThenZero) {
  std::vector<double> times;
  for (int k = 0; k <= 60; ++k) times.push_back(0.005 * k);
  const auto ev = sphere_evolution(0.5, 1.0, 2, times);
  ASSERT_EQ(ev.samples.size(), times.size());
  for (std::size_t k = 1; k < ev.samples.size(); ++k) {
    if (ev.samples[k].first < ev.extinction_time) {
      EXPECT_LT(ev.samples[k].second, ev.samples[k - 1].second);
    } else {
      EXPECT_EQ(ev.samples[k].second, 0.0);
    }
  }
  EXPECT_EQ(sphere_radius(0.5, 1.0, 2, 10.0), 0.0);
}

TEST(Sphere, SamplesAnyOrder) {
  const std::vector<double> times{0.1, 0.0, 0.05};
  const auto ev = sphere_evolution(1.0, 0.0, 1, times);
  EXPECT_EQ(ev.samples[0].first, 0.1);
  EXPECT_NEAR(ev.samples[0].second, std::sqrt(0.8), 1e-8);
  EXPECT_EQ(ev.samples[1].second, 1.0);
  EXPECT_THROW(sphere_evolution(1.0, 0.0, 1, std::vector<double>{-1.0}), ContractViolation);
  EXPECT_THROW(sphere_radius(-1.0, 0.0, 1, 0.0), ContractViolation);
}

TEST(Density, FlatGraphIsNormalised) {
  for (int d : {1, 2}) {
    PeriodicGrid g(d, 1.0, 128);
    DensityProbe probe{std::vector<double>(d + 1, 0.0), 0.0};
    probe.point[0] = 0.5;
    if (d == 2) probe.point[1] = 0.25;
    const double tau = std::pow(1.0 / 16, 2);
    probe.t0 = tau;
    const double plane = gaussian_density(ScalarField(g), probe, 0.0);
    EXPECT_NEAR(plane, 1.0, 1e-6) << d;
    const double lifted = gaussian_density(ScalarField(g, 0.2), probe, 0.0);
    EXPECT_NEAR(lifted, plane * std::exp(-0.04 / (4 * tau)), 1e-13);
  }
}

TEST(Density, OneCellTruncationAtTheLimit) {
  // At sqrt(t0 - t) = L/8 the one-cell sum misses the Gaussian tails beyond
  // L/2: density = erf(2)^d for the flat graph, up to the quadrature error
  // of the cut-off sum.
  for (int d : {1, 2}) {
    PeriodicGrid g(d, 1.0, 128);
    DensityProbe probe{std::vector<double>(d + 1, 0.0), 1.0 / 64};
    EXPECT_NEAR(gaussian_density(ScalarField(g), probe, 0.0), std::pow(std::erf(2.0), d), 5e-5) << d;
    EXPECT_LT(gaussian_density(ScalarField(g), probe, 0.0), 1.0 - 4e-3);
  }
}

TEST(Density, FarGraphIsNegligible) {
  PeriodicGrid g(1, 1.0, 64);
  DensityProbe probe{{0.5, 0.0}, 1e-3};
  EXPECT_LT(gaussian_density(ScalarField(g, 5.0), probe, 0.0), 1e-300);
}

TEST(Density, ProbeMustLieAhead) {
  PeriodicGrid g(1, 1.0, 64);
  DensityProbe probe{{0.5, 0.0}, 0.1};
  EXPECT_THROW(gaussian_density(ScalarField(g), probe, 0.1), ContractViolation);
  DensityProbe bad{{0.5}, 0.1};
  EXPECT_THROW(gaussian_density(ScalarField(g), bad, 0.0), ContractViolation);
}

TEST(Barrier, Values) {
  const BarrierSpec spec{{0.0}, {1.0}, 0.0, 0.0};
  const double one = 1.0;
  EXPECT_NEAR(barrier_value(spec, std::span<const double>(&one, 1), 0.0), -1.0 / std::sqrt(2.0), 1e-15);
  const BarrierSpec at{{0.3, 0.4}, {2.0, 1.0}, 0.7, 0.5};
  const std::vector<double> vertex{0.3, 0.4};
  EXPECT_EQ(barrier_value(at, vertex, 0.0), 0.7);
  EXPECT_DOUBLE_EQ(barrier_value(at, vertex, 0.1), 0.7 - (2 * 3.0 + 1.5) * 0.1);
  const BarrierSpec flat{{0.1}, {0.0}, 0.2, 0.4};
  const double x = 0.9;
  EXPECT_DOUBLE_EQ(barrier_value(flat, std::span<const double>(&x, 1), 0.5), 0.2 - 3 * 0.4 * 0.5);
}

TEST(Barrier, NonincreasingInTime) {
  const BarrierSpec spec{{0.2, 0.6}, {0.5, 3.0}, 0.1, 0.25};
  const std::vector<double> x{0.7, 0.1};
  for (double t = 0.0; t < 1.0; t += 0.05) {
    EXPECT_LE(barrier_value(spec, x, t + 0.05), barrier_value(spec, x, t));
  }
}

TEST(Barrier, RejectsBadSpecs) {
  const std::vector<double> x{0.0};
  EXPECT_THROW(barrier_value(BarrierSpec{{0.0}, {-1.0}, 0.0, 0.0}, x, 0.0), ContractViolation);
  EXPECT_THROW(barrier_value(BarrierSpec{{0.0}, {1.0}, 0.0, -1.0}, x, 0.0), ContractViolation);
  EXPECT_THROW(barrier_value(BarrierSpec{{0.0, 0.0}, {1.0}, 0.0, 0.0}, x, 0.0), ContractViolation);
}

TEST(Barrier, FieldUsesNearestImage) {
  PeriodicGrid g(1, 1.0, 16);
  const BarrierSpec spec{{0.0}, {1.0}, 0.0, 0.0};
  const auto f = barrier_field(spec, g, 0.0);
  EXPECT_DOUBLE_EQ(f[15], f[1]);
  EXPECT_EQ(f[0], 0.0);
}

TEST(BarrierCheck, FarBelowHasNoDefect) {
  const auto c = testing::sine_case(1, 64);
  const auto cfg = testing::make_config(c, Scheme::penalized, 4.0, StopAtTime{0.02});
  std::vector<FlowState> snaps;
  run(FlowState{c.u0, 0.0, 0}, c.obs, cfg, {0.005, [&](const FlowState& s) { snaps.push_back(s); }});
  const auto rep = barrier_below_check(snaps, BarrierSpec{{0.25}, {1.0}, -0.9, 0.0}, c.obs);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.worst_margin, 0.0);
}

TEST(BarrierCheck, InitialViolationIsRejected) {
  const auto c = testing::sine_case(1, 64);
  std::vector<FlowState> snaps{FlowState{c.u0, 0.0, 0}};
  EXPECT_THROW(barrier_below_check(snaps, BarrierSpec{{0.25}, {1.0}, 0.5, 0.0}, c.obs), ContractViolation);
}

TEST(BarrierCheck, TangentBarrierStaysBelow) {
  // Vertex at the crest of 0.3 sin(2 pi x); alpha = 8 keeps g <= u0 everywhere.
  const auto c = testing::sine_case(1, 128);
  const auto cfg = testing::make_config(c, Scheme::penalized, 4.0, StopAtTime{0.05});
  std::vector<FlowState> snaps;
  const auto r = run(FlowState{c.u0, 0.0, 0}, c.obs, cfg,
                     {0.005, [&](const FlowState& s) { snaps.push_back(s); }});
  const BarrierSpec spec{{0.25}, {8.0}, 0.3, r.log.rows.front().sup_ut};
  const auto rep = barrier_below_check(snaps, spec, c.obs);
  EXPECT_TRUE(rep.passed) << rep.parameters;
  EXPECT_LE(rep.worst_margin, 10 * c.grid.spacing());
}

TEST(BarrierCheck, BindingObstacleGivesZeroDefect) {
  // The obstacle and the solution coincide at the vertex, where max(g, psi-) = psi-.
  const auto c = testing::cap_case(1, 64);
  const auto cfg = testing::make_config(c, Scheme::projected, 0.0, StopWhenStationary{1e-6}, 0.0);
  std::vector<FlowState> snaps;
  const auto r = run(FlowState{c.u0, 0.0, 0}, c.obs, cfg,
                     {0.05, [&](const FlowState& s) { snaps.push_back(s); }});
  ASSERT_TRUE(r.stopping_rule_met());
  const BarrierSpec spec{{0.5}, {50.0}, 0.0625, 0.0};
  const auto rep = barrier_below_check(snaps, spec, c.obs);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.worst_margin, 0.0);
}

TEST(Complementarity, InteriorConstant) {
  PeriodicGrid g(2, 1.0, 16);
  auto obs = make_obstacles(g, ScalarField(g, -1.0), ScalarField(g, 1.0));
  const auto res = complementarity_residual(ScalarField(g, 0.2), obs);
  EXPECT_EQ(res.res_pde, 0.0);
  EXPECT_EQ(res.res_comp, 0.0);
  EXPECT_EQ(res.contact_fraction, 0.0);
}

TEST(Complementarity, FullContact) {
  PeriodicGrid g(1, 1.0, 32);
  auto lower = builtin_obstacle(testing::cap_shape(0.25, 0.0), g);
  auto obs = make_obstacles(g, lower, std::nullopt);
  const auto res = complementarity_residual(lower, obs);
  EXPECT_EQ(res.res_pde, 0.0);
  EXPECT_EQ(res.res_comp, 0.0);
  EXPECT_EQ(res.contact_fraction, 1.0);
  EXPECT_THROW(complementarity_residual(lower + (-0.1), obs), ContractViolation);
}

DiagnosticsLog synthetic_log(std::vector<double> sup_ut, double dt = 1e-4) {
  DiagnosticsLog log{PeriodicGrid(1, 1.0, 100), std::nullopt, {}};
  for (std::size_t k = 0; k < sup_ut.size(); ++k) {
    DiagnosticsRow r;
    r.t = dt * static_cast<double>(k);
    r.dt = dt;
    r.sup_ut = sup_ut[k];
    r.area = 1.0;
    r.min_gap_lower = r.min_gap_upper = INFINITY;
    log.rows.push_back(r);
  }
  return log;
}

TEST(Checks, FlatRunPassesWithZeroMargin) {
  PeriodicGrid g(1, 1.0, 32);
  auto obs = make_obstacles(g, ScalarField(g, -1.0), ScalarField(g, 1.0));
  FlowConfig cfg;
  cfg.pen = {0.1, 0.0};
  cfg.stop = StopWhenStationary{};
  const auto r = run(FlowState{ScalarField(g), 0.0, 0}, obs, cfg);
  const auto lip = lipschitz_check(r.log, ScalarField(g), obs);
  EXPECT_TRUE(lip.passed);
  EXPECT_EQ(lip.worst_margin, 0.0);
  const auto ut = ut_monotone_check(r.log);
  EXPECT_TRUE(ut.passed);
  EXPECT_EQ(ut.worst_margin, 0.0);
}

TEST(Checks, SineRunPasses) {
  const auto c = testing::sine_case(1, 128);
  const auto cfg = testing::make_config(c, Scheme::penalized, 4.0, StopAtTime{0.05});
  const auto r = run(FlowState{c.u0, 0.0, 0}, c.obs, cfg);
  EXPECT_TRUE(lipschitz_check(r.log, c.u0, c.obs).passed);
  EXPECT_TRUE(ut_monotone_check(r.log).passed);
  EXPECT_TRUE(area_check(r.log).passed);
  EXPECT_TRUE(band_check(r.log, cfg.pen.epsilon).passed);
  EXPECT_TRUE(dissipation_identity_check(r.log).passed);
}

TEST(Checks, UtDecayDetectsGrowth) {
  EXPECT_TRUE(ut_monotone_check(synthetic_log({1.0, 0.8, 0.8, 0.5})).passed);
  const auto bad = ut_monotone_check(synthetic_log({1.0, 0.5, 0.9}));
  EXPECT_FALSE(bad.passed);
  EXPECT_DOUBLE_EQ(bad.worst_margin, 0.4);
}

TEST(Checks, BandAndConstraint) {
  auto log = synthetic_log({0.0, 0.0});
  log.rows[1].min_gap_lower = -0.01;
  EXPECT_TRUE(band_check(log, 0.01).passed);
  EXPECT_FALSE(band_check(log, 0.009).passed);
  EXPECT_FALSE(constraint_check(log).passed);
  log.rows[1].min_gap_lower = 0.0;
  EXPECT_TRUE(constraint_check(log).passed);
}

TEST(Checks, AreaIncreaseBeyondSlackFails) {
  auto log = synthetic_log({0.0, 0.0, 0.0}, 1e-3);
  log.rows[1].area = 1.0 + 0.5e-2;
  EXPECT_TRUE(area_check(log).passed);
  log.rows[1].area = 1.0 + 2e-2;
  EXPECT_FALSE(area_check(log).passed);
}

TEST(Checks, DissipationIdentity) {
  auto log = synthetic_log({0.0, 0.0, 0.0});
  log.rows[1].dissipated = 0.1;
  log.rows[1].area = 0.905;
  log.rows[2].dissipated = 0.2;
  log.rows[2].area = 0.805;
  auto rep = dissipation_identity_check(log);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.worst_margin, 0.05, 1e-12);
  log.rows[2].area = 0.9;
  EXPECT_FALSE(dissipation_identity_check(log).passed);
}

TEST(Checks, DensityOnFlatStaticSolution) {
  auto log = synthetic_log({0.0, 0.0, 0.0});
  log.density = DensityProbe{{0.5, 0.0}, 0.01};
  for (auto& r : log.rows) r.density = 1.0;
  const auto k0 = density_monotonicity_check(log, 0.0);
  EXPECT_TRUE(k0.passed);
  EXPECT_EQ(k0.worst_margin, 0.0);
  auto rep = density_monotonicity_check(log, 4.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.worst_margin, 0.0 + 1e-300);
  log.rows[2].density = 1.01;
  EXPECT_FALSE(density_monotonicity_check(log, 0.0).passed);
}

TEST(Checks, DensityPreconditions) {
  auto log = synthetic_log({0.0});
  EXPECT_THROW(density_monotonicity_check(log, 0.0), ContractViolation);
  log.density = DensityProbe{{0.5, 0.0}, 0.5};  // sqrt(t0) > L/8
  log.rows[0].density = 1.0;
  EXPECT_THROW(density_monotonicity_check(log, 0.0), ContractViolation);
}

TEST(Report, CsvRows) {
  std::ostringstream out;
  write_report_header(out);
  append_report_row(out, CheckReport{"band", true, -0.5, "epsilon=0.1;slack=0.2"});
  append_report_row(out, CheckReport{"area", false, 1e-3, "slack_per_dt=10"});
  EXPECT_EQ(out.str(),
            "check,result,worst_margin,parameters\nband,pass,-0.5,epsilon=0.1;slack=0.2\n"
            "area,fail,0.001,slack_per_dt=10\n");
}

}  // namespace
}  // namespace mcfob
