#include "mcfob/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcfob/error.hpp"
#include "mcfob/field_io.hpp"
#include "mcfob/sphere.hpp"

namespace mcfob::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.txt", index);
  return buf;
}

bool wants(const Scenario& s, std::string_view check) {
  return std::find(s.checks.begin(), s.checks.end(), check) != s.checks.end();
}

CheckReport run_check(std::string_view name, const Scenario& s, const Setup& setup,
                      const RunResult& result, std::span<const FlowState> snapshots) {
  const DiagnosticsLog& log = result.log;
  CheckReport report;
  if (name == "lipschitz") {
    report = lipschitz_check(log, setup.u0, setup.obstacles);
  } else if (name == "ut_decay") {
    report = ut_monotone_check(log);
  } else if (name == "band") {
    report = band_check(log, s.epsilon);
  } else if (name == "constraint") {
    report = constraint_check(log);
  } else if (name == "area") {
    report = area_check(log);
  } else if (name == "dissipation") {
    report = dissipation_identity_check(log);
  } else if (name == "complementarity") {
    report = complementarity_check(result.state.u, setup.obstacles);
  } else if (name == "density") {
    const double k = s.scheme == Scheme::penalized ? 2.0 * setup.obstacles.curvature_bound : 0.0;
    report = density_monotonicity_check(log, k);
  } else if (name == "barrier") {
    BarrierSpec spec{s.barrier->vertex, s.barrier->alpha, s.barrier->offset, 0.0};
    spec.slope = s.barrier->slope ? *s.barrier->slope
                                  : (log.rows.empty() ? 0.0 : log.rows.front().sup_ut);
    report = barrier_below_check(snapshots, spec, setup.obstacles);
  }
  report.name = std::string(name);
  return report;
}

int run_scenario(const Scenario& s, const fs::path& out_dir, std::ostream& out) {
  const Setup setup = build_setup(s);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  if (setup.obstacles.lower_present) {
    write_snapshot_file((out_dir / "lower.txt").string(), setup.obstacles.lower, 0.0);
  }
  if (setup.obstacles.upper_present) {
    write_snapshot_file((out_dir / "upper.txt").string(), setup.obstacles.upper, 0.0);
  }

  const bool keep = wants(s, "barrier");
  std::vector<FlowState> kept;
  std::size_t written = 0;
  RunHooks hooks;
  hooks.snapshot_interval = s.snapshot_interval;
  hooks.on_snapshot = [&](const FlowState& state) {
    write_snapshot_file((out_dir / snapshot_name(written)).string(), state.u, state.t);
    ++written;
    if (keep) kept.push_back(state);
  };

  const RunResult result = run(FlowState{setup.u0, 0.0, 0}, setup.obstacles, setup.flow, hooks);

  {
    const fs::path path = out_dir / "diagnostics.csv";
    auto csv = open_output(path);
    result.log.write_csv(csv);
    close_output(csv, path);
  }

  bool all_passed = true;
  {
    const fs::path path = out_dir / "report.csv";
    auto report = open_output(path);
    write_report_header(report);
    for (const auto& name : s.checks) {
      CheckReport r;
      try {
        r = run_check(name, s, setup, result, kept);
      } catch (const std::exception& e) {
        r = CheckReport{name, false, std::numeric_limits<double>::quiet_NaN(),
                        std::string("error=") + e.what()};
      }
      append_report_row(report, r);
      all_passed = all_passed && r.passed;
      out << r.name << ": " << (r.passed ? "pass" : "fail")
          << " (worst_margin=" << format_double(r.worst_margin) << ")\n";
    }
    close_output(report, path);
  }

  out << "status: " << to_string(result.status) << " t=" << format_double(result.state.t)
      << " steps=" << result.state.steps << " snapshots=" << written << '\n';
  if (!result.message.empty()) out << "message: " << result.message << '\n';

  if (!all_passed) return kExitCheckFailed;
  if (!result.stopping_rule_met()) return kExitNotConverged;
  return kExitOk;
}

ObstaclePair shifted(const ObstaclePair& obs, double shift) {
  std::optional<ScalarField> lower, upper;
  if (obs.lower_present) lower = obs.lower + shift;
  if (obs.upper_present) upper = obs.upper + shift;
  return make_obstacles(obs.grid(), std::move(lower), std::move(upper));
}

int compare_scenario(const Scenario& s, double shift, std::ostream& out) {
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw ConfigError("--shift must be a finite value >= 0");
  if (!s.t_end) throw ConfigError(s.name + ": compare needs stop.t_end");
  const Setup setup = build_setup(s);
  const ScalarField v0 = setup.u0 + shift;

  bool binding = false;
  if (setup.obstacles.upper_present) {
    for (std::size_t k = 0; k < v0.size(); ++k) binding = binding || v0[k] > setup.obstacles.upper[k];
  }
  const ObstaclePair obs_v = binding ? shifted(setup.obstacles, shift) : setup.obstacles;
  const ComparisonReport rep =
      comparison_test(setup.u0, v0, setup.obstacles, obs_v, setup.flow, *s.t_end);

  out << "defect=" << format_double(rep.max_defect) << " t=" << format_double(rep.defect_time)
      << " steps=" << rep.steps << " obstacles_shifted=" << (binding ? "true" : "false") << '\n';
  return rep.max_defect <= s.compare_tolerance ? kExitOk : kExitCheckFailed;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
  } catch (const NumericalInstability& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
  return kExitIoError;
}

}  // namespace

int cmd_run(const Scenario& scenario, const fs::path& out_dir, std::ostream& out) {
  return guarded(out, [&] { return run_scenario(scenario, out_dir, out); });
}

int cmd_oracle_sphere(double r0, double forcing, int dim, double t_max, double t_step,
                      std::ostream& out, std::ostream& err) {
  if (!(r0 > 0.0) || !(forcing >= 0.0) || (dim != 1 && dim != 2) || !(t_max >= 0.0) ||
      !(t_step > 0.0) || !std::isfinite(r0 + forcing + t_max + t_step)) {
    err << "error: oracle sphere needs r0 > 0, n-force >= 0, dim in {1,2}, t-max >= 0, t-step > 0\n";
    return kExitIoError;
  }
  const double count = std::floor(t_max / t_step * (1.0 + 1e-12));
  if (count > 1e7) {
    err << "error: too many rows (t-max / t-step > 1e7)\n";
    return kExitIoError;
  }
  std::vector<double> times;
  for (std::int64_t k = 0; k <= static_cast<std::int64_t>(count); ++k) {
    times.push_back(static_cast<double>(k) * t_step);
  }
  const SphereEvolution ev = sphere_evolution(r0, forcing, dim, times);
  out << "t,R\n";
  for (const auto& [t, r] : ev.samples) out << format_double(t) << ',' << format_double(r) << '\n';
  return kExitOk;
}

int cmd_compare(const Scenario& scenario, double shift, std::ostream& out) {
  return guarded(out, [&] { return compare_scenario(scenario, shift, out); });
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean curvature flow of graphs with obstacles"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and its checks");
  run_cmd->add_option("--config", config_path, "Scenario config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (default: output.dir)");

  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form and ODE reference solutions");
  oracle_cmd->require_subcommand(1);
  double r0 = 1.0, forcing = 0.0, t_max = 0.0, t_step = 0.0;
  int dim = 1;
  auto* sphere_cmd = oracle_cmd->add_subcommand("sphere", "Radius of a sphere under forced MCF");
  sphere_cmd->add_option("--r0", r0, "Initial radius")->required();
  sphere_cmd->add_option("--n-force", forcing, "Forcing N >= 0")->required();
  sphere_cmd->add_option("--dim", dim, "Dimension d")->required();
  sphere_cmd->add_option("--t-max", t_max, "Last time")->required();
  sphere_cmd->add_option("--t-step", t_step, "Time spacing")->required();

  double shift = 0.0;
  std::string compare_config;
  auto* compare_cmd = app.add_subcommand("compare", "Comparison defect of u0 and u0 + shift");
  compare_cmd->add_option("--config", compare_config, "Scenario config file")->required();
  compare_cmd->add_option("--shift", shift, "Vertical shift >= 0")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoError;
  }

  if (run_cmd->parsed()) {
    return guarded(err, [&] {
      const Scenario s = parse_config(config_path);
      const fs::path dir = out_dir.empty() ? fs::path(s.output_dir) : fs::path(out_dir);
      return run_scenario(s, dir, out);
    });
  }
  if (sphere_cmd->parsed()) return cmd_oracle_sphere(r0, forcing, dim, t_max, t_step, out, err);
  return guarded(err, [&] { return compare_scenario(parse_config(compare_config), shift, out); });
}

}  // namespace mcfob::cli
