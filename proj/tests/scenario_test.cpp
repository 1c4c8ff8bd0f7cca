#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mcfob/cli/scenario.hpp"
#include "mcfob/error.hpp"
#include "mcfob/field_io.hpp"

namespace mcfob::cli {
namespace {

constexpr const char* kMinimal = R"(# minimal config
grid.d=1
grid.n=64
init.kind=sine
init.amplitude=0.3
lower.kind=flat
lower.value=-1
upper.kind=flat
upper.value=1
)";

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseConfig, MinimalFillsDefaults) {
  const Scenario s = parse_config_text(kMinimal);
  EXPECT_EQ(s.dim, 1);
  EXPECT_EQ(s.samples, 64);
  EXPECT_EQ(s.length, 1.0);
  EXPECT_EQ(s.init.source, FieldSpec::Source::builtin);
  EXPECT_EQ(s.init.shape.kind, ShapeKind::sine);
  EXPECT_EQ(s.init.shape.amplitude, 0.3);
  EXPECT_EQ(s.lower.shape.value, -1.0);
  EXPECT_EQ(s.scheme, Scheme::penalized);
  EXPECT_DOUBLE_EQ(s.epsilon, 4.0 / 64);
  EXPECT_EQ(s.cfl_safety, 0.4);
  EXPECT_FALSE(s.t_end);
  EXPECT_FALSE(s.stationary_tol);
  EXPECT_TRUE(s.checks.empty());

  const cli::Setup setup = build_setup(s);
  ASSERT_TRUE(std::holds_alternative<StopWhenStationary>(setup.flow.stop));
  EXPECT_EQ(std::get<StopWhenStationary>(setup.flow.stop).tolerance, 1e-6);
  EXPECT_EQ(setup.obstacles.curvature_bound, 0.0);
}

TEST(ParseConfig, UnknownKeyIsNamed) {
  const std::string err = error_of(std::string(kMinimal) + "flow.epsilonn=0.1\n");
  EXPECT_NE(err.find("flow.epsilonn"), std::string::npos) << err;
  EXPECT_NE(err.find("test.cfg:10"), std::string::npos) << err;
  EXPECT_NE(err.find("unknown key"), std::string::npos) << err;
}

TEST(ParseConfig, InitialDataBelowObstacleCitesIndex) {
  const std::string err = error_of(std::string(kMinimal) + "init.offset=-0.8\n");
  EXPECT_NE(err.find("init.kind"), std::string::npos) << err;
  // 0.3 sin(2 pi x) - 0.8 < -1 first at x = 40/64.
  EXPECT_NE(err.find("grid index 40"), std::string::npos) << err;
}

TEST(ParseConfig, TypeAndConstraintErrors) {
  EXPECT_NE(error_of(std::string(kMinimal) + "stop.max_steps=many\n").find("stop.max_steps"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "flow.cfl_safety=2\n").find("flow.cfl_safety"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "grid.d=3\n").find("grid.d"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "stop.t_end=1\nstop.stationary_tol=1e-6\n")
                .find("stop.t_end"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "checks=lipschitz,nope\n").find("nope"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "grid.n=64\n").find("duplicate"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "just text\n").find("test.cfg:10"), std::string::npos);
  EXPECT_NE(error_of("grid.n=64\n").find("init.kind"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "checks=barrier\n").find("barrier"), std::string::npos);
  EXPECT_NE(error_of("init.kind=flat\nlower.kind=flat\nlower.value=1\nupper.kind=flat\nupper.value=1\n")
                .find("upper.kind"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "flow.epsilon=0.6\n").find("flow.epsilon"),
            std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "lower.kind=disc\n").find("lower.kind"), std::string::npos);
}

TEST(ParseConfig, UnstableSafetyNeedsOptIn) {
  const Scenario s =
      parse_config_text(std::string(kMinimal) + "flow.cfl_safety=2\nflow.allow_unstable=true\n");
  EXPECT_EQ(s.cfl_safety, 2.0);
  EXPECT_TRUE(s.allow_unstable);
}

constexpr const char* kFull = R"(name=full
grid.d=2
grid.L=2
grid.n=32
init.kind=cap
init.radius=0.7
init.center=1,1
init.offset=0.015
lower.kind=cap
lower.radius=0.5
lower.center=1,1
upper.kind=none
flow.scheme=projected
flow.epsilon=0.1
flow.cfl_safety=0.3
stop.t_end=0.0123
stop.max_steps=5000
output.dir=somewhere
output.snapshot_interval=0.001
output.record_interval=0.0005
checks=lipschitz,constraint,barrier,density
density.x0=1,1
density.z0=0.25
density.t0=0.05
barrier.vertex=1,1
barrier.alpha=0.1,0.2
barrier.b=-0.3
barrier.M=0.7
compare.tolerance=1e-05
)";

TEST(ParseConfig, RoundTripsFieldByField) {
  for (const char* text : {kMinimal, kFull}) {
    const Scenario s = parse_config_text(text);
    const std::string serialized = serialize_config(s);
    EXPECT_EQ(parse_config_text(serialized), s) << serialized;
    EXPECT_EQ(serialize_config(parse_config_text(serialized)), serialized);
  }
}

TEST(ParseConfig, FullConfigValues) {
  const Scenario s = parse_config_text(kFull);
  EXPECT_EQ(s.upper.source, FieldSpec::Source::none);
  ASSERT_TRUE(s.density);
  EXPECT_EQ(s.density->point, (std::vector<double>{1, 1, 0.25}));
  ASSERT_TRUE(s.barrier);
  EXPECT_EQ(s.barrier->slope, 0.7);
  const cli::Setup setup = build_setup(s);
  EXPECT_TRUE(setup.obstacles.one_sided());
  EXPECT_EQ(std::get<StopAtTime>(setup.flow.stop).t_end, 0.0123);
  EXPECT_EQ(setup.flow.max_steps, 5000);
}

TEST(ParseConfig, FileFieldsResolveRelativeToConfig) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mcfob_scenario_test";
  fs::create_directories(dir);
  const PeriodicGrid g(1, 1.0, 16);
  write_snapshot_file((dir / "init.txt").string(), ScalarField(g, 0.5), 0.0);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "grid.n=16\ninit.kind=file\ninit.path=init.txt\nlower.kind=flat\n";
  }
  const Scenario s = parse_config(dir / "run.cfg");
  EXPECT_EQ(fs::path(s.init.path), (dir / "init.txt").lexically_normal());
  EXPECT_EQ(build_setup(s).u0, ScalarField(g, 0.5));

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "grid.n=32\ninit.kind=file\ninit.path=init.txt\n";
  }
  EXPECT_THROW(parse_config(dir / "bad.cfg"), ConfigError);
  EXPECT_THROW(parse_config(dir / "missing.cfg"), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mcfob::cli
