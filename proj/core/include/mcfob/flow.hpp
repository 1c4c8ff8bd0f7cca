#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcfob/density.hpp"
#include "mcfob/grid.hpp"
#include "mcfob/obstacles.hpp"

namespace mcfob {

enum class Scheme { penalized, projected };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

struct FlowState {
  ScalarField u;
  double t = 0.0;
  std::int64_t steps = 0;
};

struct StopAtTime {
  double t_end = 0.0;
  bool operator==(const StopAtTime&) const = default;
};

/// Stop once the discrete L2 norm of (u_{k+1} - u_k)/dt drops below tolerance.
struct StopWhenStationary {
  double tolerance = 1e-6;
  bool operator==(const StopWhenStationary&) const = default;
};

using StoppingRule = std::variant<StopAtTime, StopWhenStationary>;

struct FlowConfig {
  Scheme scheme = Scheme::penalized;
  PenalizationParams pen{};
  double cfl_safety = 0.4;
  /// Permit cfl_safety > 1 (used to exercise instability reporting).
  bool allow_unstable = false;
  StoppingRule stop = StopAtTime{};
  std::int64_t max_steps = 10'000'000;
  /// Physical-time spacing of diagnostics rows; 0 records every step.
  double record_interval = 0.0;
  std::optional<DensityProbe> density;

  /// Throws ContractViolation on out-of-range settings.
  void validate() const;
};

/// Explicit stability bound
///   dt = safety * min(h^2/(2d), eps / (2N chi'_max sqrt(1 + G^2)))
/// where G = sup|grad u|; the second term only for the penalized scheme with N > 0.
double cfl_dt(const FlowState& state, const ObstaclePair& obs, const FlowConfig& config);

/// u <- u + dt (H[u] + sqrt(1 + |grad u|^2) k_eps(x, u)). Caller guarantees
/// dt <= cfl_dt. Throws NumericalInstability on a non-finite update.
FlowState step_penalized(const FlowState& state, const ObstaclePair& obs,
                         const FlowConfig& config, double dt);

/// u <- clamp(u + dt H[u], psi-, psi+). Throws ContractViolation if the
/// entry state violates psi- <= u <= psi+.
FlowState step_projected(const FlowState& state, const ObstaclePair& obs,
                         const FlowConfig& config, double dt);

/// Dispatches on config.scheme.
FlowState step(const FlowState& state, const ObstaclePair& obs, const FlowConfig& config,
               double dt);

struct DiagnosticsRow {
  double t = 0.0;
  double sup_grad = 0.0;
  double sup_ut = 0.0;
  double l2_ut = 0.0;
  double area = 0.0;
  double min_gap_lower = 0.0;  // min(u - psi-); +inf without a lower obstacle
  double min_gap_upper = 0.0;  // min(psi+ - u); +inf without an upper obstacle
  double density = 0.0;        // NaN when no density probe is configured

  // Not part of the CSV.
  double dt = 0.0;          // step used for the u_t difference quotient
  double dissipated = 0.0;  // int_0^t h^d sum u_t^2 / sqrt(1+|grad u|^2)
  std::int64_t step = 0;

  bool operator==(const DiagnosticsRow&) const = default;
};

struct DiagnosticsLog {
  PeriodicGrid grid{1, 1.0, 4};
  std::optional<DensityProbe> density;
  std::vector<DiagnosticsRow> rows;

  /// Columns: t,sup_grad,sup_ut,l2_ut,area,min_gap_lower,min_gap_upper,density
  void write_csv(std::ostream& out) const;

  bool operator==(const DiagnosticsLog&) const = default;
};

inline constexpr std::string_view kDiagnosticsHeader =
    "t,sup_grad,sup_ut,l2_ut,area,min_gap_lower,min_gap_upper,density";

enum class RunStatus { reached_time, stationary, max_steps, diverged };

std::string_view to_string(RunStatus status);

struct RunResult {
  FlowState state;
  DiagnosticsLog log;
  RunStatus status = RunStatus::reached_time;
  std::string message;

  bool stopping_rule_met() const {
    return status == RunStatus::reached_time || status == RunStatus::stationary;
  }
};

struct RunHooks {
  /// Physical-time cadence of on_snapshot; 0 disables periodic snapshots
  /// (the initial and final states are still reported).
  double snapshot_interval = 0.0;
  std::function<void(const FlowState&)> on_snapshot;
};

/// Steps until the stopping rule, max_steps, or divergence. Diagnostics rows
/// at t = t_k use u_t = (u_{k+1} - u_k)/dt of the following step. Time steps
/// are shortened to land exactly on t_end, record and snapshot times.
RunResult run(FlowState state, const ObstaclePair& obs, const FlowConfig& config,
              const RunHooks& hooks = {});

struct ComparisonReport {
  double max_defect = 0.0;  // max over steps of max(u - v)_+
  double defect_time = 0.0;
  std::int64_t steps = 0;
};

/// Co-evolves u0 <= v0 with a shared dt sequence up to t_end and reports the
/// largest ordering defect. The second overload evolves v against its own
/// obstacle pair.
ComparisonReport comparison_test(const ScalarField& u0, const ScalarField& v0,
                                 const ObstaclePair& obs, const FlowConfig& config, double t_end);
ComparisonReport comparison_test(const ScalarField& u0, const ScalarField& v0,
                                 const ObstaclePair& obs_u, const ObstaclePair& obs_v,
                                 const FlowConfig& config, double t_end);

}  // namespace mcfob
