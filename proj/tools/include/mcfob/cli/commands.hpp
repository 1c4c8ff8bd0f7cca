#pragma once

#include <filesystem>
#include <iosfwd>

#include "mcfob/cli/scenario.hpp"

namespace mcfob::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitNotConverged = 2,
  kExitIoError = 3,
};

/// Runs the scenario and writes into out_dir:
///   snapshot_NNNNNN.txt, lower.txt / upper.txt (present obstacles),
///   diagnostics.csv, report.csv.
/// Returns 0 iff every requested check passes and the stopping rule was met;
/// 1 on a failed check, 2 when the run did not meet its stopping rule.
int cmd_run(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& out);

/// Prints t,R rows of the forced sphere ODE for t = 0, t_step, ... <= t_max.
int cmd_oracle_sphere(double r0, double forcing, int dim, double t_max, double t_step,
                      std::ostream& out, std::ostream& err);

/// Co-evolves u0 and u0 + shift up to the scenario's t_end and prints the
/// comparison defect; 0 iff defect <= compare.tolerance.
int cmd_compare(const Scenario& scenario, double shift, std::ostream& out);

/// Entry point shared by the mcfob executable and the CLI tests.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mcfob::cli
