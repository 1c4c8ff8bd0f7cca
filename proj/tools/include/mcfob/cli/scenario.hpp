#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcfob/analysis.hpp"
#include "mcfob/flow.hpp"
#include "mcfob/grid.hpp"
#include "mcfob/obstacles.hpp"

namespace mcfob::cli {

/// Where a field (initial data or obstacle) comes from.
struct FieldSpec {
  enum class Source { none, builtin, file };

  Source source = Source::none;
  ShapeSpec shape{};
  std::string path;  // Source::file only

  bool operator==(const FieldSpec&) const = default;
};

struct BarrierConfig {
  std::vector<double> vertex;
  std::vector<double> alpha;
  double offset = 0.0;
  std::optional<double> slope;  // M; defaults to sup|u_t|(0) of the run

  bool operator==(const BarrierConfig&) const = default;
};

/// Fully validated run description. Parsed from flat key=value text with
/// dotted prefixes (grid.n=128); every key has a default except init.kind.
struct Scenario {
  std::string name = "scenario";
  int dim = 1;
  double length = 1.0;
  int samples = 64;

  FieldSpec init{FieldSpec::Source::builtin, {}, {}};
  FieldSpec lower{};
  FieldSpec upper{};

  Scheme scheme = Scheme::penalized;
  double epsilon = 0.0;  // defaults to 4h
  double cfl_safety = 0.4;
  bool allow_unstable = false;

  std::optional<double> t_end;           // exactly one of t_end /
  std::optional<double> stationary_tol;  // stationary_tol is set
  std::int64_t max_steps = 10'000'000;

  double snapshot_interval = 0.0;
  double record_interval = 1e-3;
  std::vector<std::string> checks;
  std::string output_dir = "out";

  std::optional<DensityProbe> density;
  std::optional<BarrierConfig> barrier;
  double compare_tolerance = 1e-3;

  bool operator==(const Scenario&) const = default;
};

/// Check names accepted in the `checks` key.
const std::vector<std::string_view>& known_checks();

/// Parses and validates a config file; file-sourced fields are resolved
/// relative to the config file's directory. Throws ConfigError.
Scenario parse_config(const std::filesystem::path& path);

/// Same, from text. `source` labels diagnostics.
Scenario parse_config_text(std::string_view text, std::string_view source = "<config>",
                           const std::filesystem::path& base_dir = {});

/// Inverse of parse_config_text: every field is written explicitly.
std::string serialize_config(const Scenario& scenario);

/// Grid, fields and flow configuration built from a scenario.
struct Setup {
  PeriodicGrid grid;
  ScalarField u0;
  ObstaclePair obstacles;
  FlowConfig flow;
};

/// Throws ConfigError if initial data violates psi- <= u0 <= psi+.
Setup build_setup(const Scenario& scenario);

}  // namespace mcfob::cli
