#include "mcfob/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mcfob/error.hpp"
#include "mcfob/field_io.hpp"

namespace mcfob {
namespace {

struct StepStats {
  double ut_sq_sum = 0.0;
  double ut_max = 0.0;
  double dissipation_sum = 0.0;  // sum u_t^2 / W
  double grad_sq_max = 0.0;
  double area_sum = 0.0;         // sum W
};

void require_in_band(const ScalarField& u, const ObstaclePair& obs, const char* where) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] < obs.lower[k] || u[k] > obs.upper[k]) {
      throw ContractViolation(std::string(where) + ": state leaves [psi-, psi+] at index " +
                              std::to_string(k));
    }
  }
}

// One explicit update of u; the geometry sweep stores W so that the
// reductions below run in a fixed sequential order.
ScalarField advance(const ScalarField& u, const ObstaclePair& obs, const FlowConfig& config,
                    double dt, StepStats* stats) {
  require_same_grid(u, obs.lower, "step");
  if (!(dt > 0.0)) throw ContractViolation("step: dt must be positive");
  if (config.scheme == Scheme::projected) require_in_band(u, obs, "step_projected");

  ScalarField next(u.grid());
  std::vector<double> slope(u.size());
  std::vector<double> grad_sq(stats ? u.size() : 0);
  const double* lower = obs.lower.data();
  const double* upper = obs.upper.data();
  double* out = next.data();
  const PenalizationParams& pen = config.pen;

  if (config.scheme == Scheme::penalized) {
    detail::sweep_geometry(u, [&](std::size_t k, const detail::LocalGeometry& geo) {
      const double w = std::sqrt(1.0 + geo.grad_sq);
      slope[k] = w;
      if (!grad_sq.empty()) grad_sq[k] = geo.grad_sq;
      const double force = pen.amplitude > 0.0 ? forcing_value(u[k], lower[k], upper[k], pen) : 0.0;
      out[k] = u[k] + dt * (geo.curvature + w * force);
    });
  } else {
    detail::sweep_geometry(u, [&](std::size_t k, const detail::LocalGeometry& geo) {
      slope[k] = std::sqrt(1.0 + geo.grad_sq);
      if (!grad_sq.empty()) grad_sq[k] = geo.grad_sq;
      out[k] = std::clamp(u[k] + dt * geo.curvature, lower[k], upper[k]);
    });
  }

  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!std::isfinite(out[k])) {
      throw NumericalInstability("explicit update produced a non-finite value at index " +
                                 std::to_string(k) + " (dt=" + format_double(dt) +
                                 "); the time step violates the stability bound");
    }
  }
  if (stats) {
    StepStats s;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double ut = (out[k] - u[k]) / dt;
      s.ut_sq_sum += ut * ut;
      s.ut_max = std::max(s.ut_max, std::abs(ut));
      s.dissipation_sum += ut * ut / slope[k];
      s.grad_sq_max = std::max(s.grad_sq_max, grad_sq[k]);
      s.area_sum += slope[k];
    }
    *stats = s;
  }
  return next;
}

double min_gap_below(const ScalarField& u, const ObstaclePair& obs) {
  if (!obs.lower_present) return std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) gap = std::min(gap, u[k] - obs.lower[k]);
  return gap;
}

double min_gap_above(const ScalarField& u, const ObstaclePair& obs) {
  if (!obs.upper_present) return std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) gap = std::min(gap, obs.upper[k] - u[k]);
  return gap;
}

bool reached(double t, double target) {
  return t >= target - 1e-12 * std::max(1.0, std::abs(target));
}

void check_penalization_band(const ObstaclePair& obs, const FlowConfig& config) {
  if (config.scheme != Scheme::penalized) return;
  const double gap = min_obstacle_gap(obs);
  if (std::isfinite(gap) && config.pen.epsilon > 0.25 * gap) {
    throw ContractViolation("penalization width eps=" + format_double(config.pen.epsilon) +
                            " exceeds a quarter of the minimum obstacle gap " +
                            format_double(gap));
  }
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "penalized") return Scheme::penalized;
  if (name == "projected") return Scheme::projected;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected penalized or projected)");
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::penalized ? "penalized" : "projected";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::reached_time: return "reached_time";
    case RunStatus::stationary: return "stationary";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  if (!(cfl_safety > 0.0) || !std::isfinite(cfl_safety)) {
    throw ContractViolation("FlowConfig: cfl_safety must be positive");
  }
  if (cfl_safety > 1.0 && !allow_unstable) {
    throw ContractViolation("FlowConfig: cfl_safety > 1 requires allow_unstable");
  }
  if (scheme == Scheme::penalized) {
    if (!(pen.epsilon > 0.0)) throw ContractViolation("FlowConfig: penalization eps must be > 0");
    if (!(pen.amplitude >= 0.0)) throw ContractViolation("FlowConfig: penalization N must be >= 0");
  }
  if (const auto* until = std::get_if<StopAtTime>(&stop)) {
    if (!(until->t_end >= 0.0) || !std::isfinite(until->t_end)) {
      throw ContractViolation("FlowConfig: t_end must be finite and >= 0");
    }
  } else if (!(std::get<StopWhenStationary>(stop).tolerance > 0.0)) {
    throw ContractViolation("FlowConfig: stationary tolerance must be > 0");
  }
  if (max_steps <= 0) throw ContractViolation("FlowConfig: max_steps must be positive");
  if (!(record_interval >= 0.0)) throw ContractViolation("FlowConfig: record_interval must be >= 0");
}

double cfl_dt(const FlowState& state, const ObstaclePair& obs, const FlowConfig& config) {
  (void)obs;
  const PeriodicGrid& g = state.u.grid();
  const double h = g.spacing();
  double dt = h * h / (2.0 * g.dim());
  if (config.scheme == Scheme::penalized && config.pen.amplitude > 0.0) {
    const double grad = max_gradient_norm(state.u);
    const double forcing_bound =
        config.pen.epsilon / (2.0 * config.pen.amplitude * kSmoothstepSlopeMax *
                              std::sqrt(1.0 + grad * grad));
    dt = std::min(dt, forcing_bound);
  }
  return config.cfl_safety * dt;
}

FlowState step_penalized(const FlowState& state, const ObstaclePair& obs,
                         const FlowConfig& config, double dt) {
  FlowConfig c = config;
  c.scheme = Scheme::penalized;
  return {advance(state.u, obs, c, dt, nullptr), state.t + dt, state.steps + 1};
}

FlowState step_projected(const FlowState& state, const ObstaclePair& obs,
                         const FlowConfig& config, double dt) {
  FlowConfig c = config;
  c.scheme = Scheme::projected;
  return {advance(state.u, obs, c, dt, nullptr), state.t + dt, state.steps + 1};
}

FlowState step(const FlowState& state, const ObstaclePair& obs, const FlowConfig& config,
               double dt) {
  return {advance(state.u, obs, config, dt, nullptr), state.t + dt, state.steps + 1};
}

void DiagnosticsLog::write_csv(std::ostream& out) const {
  out << kDiagnosticsHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.sup_grad) << ','
        << format_double(r.sup_ut) << ',' << format_double(r.l2_ut) << ','
        << format_double(r.area) << ',' << format_double(r.min_gap_lower) << ','
        << format_double(r.min_gap_upper) << ',' << format_double(r.density) << '\n';
  }
}

RunResult run(FlowState state, const ObstaclePair& obs, const FlowConfig& config,
              const RunHooks& hooks) {
  config.validate();
  require_same_grid(state.u, obs.lower, "run");
  check_penalization_band(obs, config);

  const auto* until = std::get_if<StopAtTime>(&config.stop);
  const auto* stationary = std::get_if<StopWhenStationary>(&config.stop);
  if (until && until->t_end < state.t) throw ContractViolation("run: t_end precedes the start time");

  const PeriodicGrid& grid = state.u.grid();
  const double cell = grid.cell_volume();
  const double t_start = state.t;
  std::int64_t record_count = 0;
  std::int64_t snapshot_count = 0;
  double dissipated = 0.0;
  double last_snapshot_t = std::numeric_limits<double>::quiet_NaN();
  bool first = true;

  RunResult result{state, DiagnosticsLog{grid, config.density, {}}, RunStatus::reached_time, {}};

  auto event = [&](double interval, std::int64_t count) {
    return t_start + static_cast<double>(count) * interval;
  };
  auto snapshot = [&] {
    if (hooks.on_snapshot && !(state.t == last_snapshot_t)) {
      hooks.on_snapshot(state);
      last_snapshot_t = state.t;
    }
  };

  while (true) {
    double dt = cfl_dt(state, obs, config);
    std::optional<double> landing;
    auto clip = [&](double target) {
      const double remaining = target - state.t;
      if (!reached(state.t, target) && remaining <= dt) {
        dt = remaining;
        landing = target;
      }
    };
    if (until) clip(until->t_end);
    if (config.record_interval > 0.0) clip(event(config.record_interval, record_count));
    if (hooks.snapshot_interval > 0.0) clip(event(hooks.snapshot_interval, snapshot_count));

    StepStats stats;
    std::optional<ScalarField> next;
    try {
      next.emplace(advance(state.u, obs, config, dt, &stats));
    } catch (const NumericalInstability& e) {
      result.status = RunStatus::diverged;
      result.message = "diverged at t=" + format_double(state.t) + " (step " +
                       std::to_string(state.steps) + "): " + e.what();
      snapshot();
      break;
    }

    const double l2_ut = std::sqrt(cell * stats.ut_sq_sum);
    const bool time_done = until && reached(state.t, until->t_end);
    const bool is_stationary = stationary && l2_ut < stationary->tolerance;
    const bool out_of_steps = !time_done && !is_stationary && state.steps >= config.max_steps;
    const bool done = time_done || is_stationary || out_of_steps;

    const bool record_due =
        config.record_interval <= 0.0 || reached(state.t, event(config.record_interval, record_count));
    if (record_due || done) {
      DiagnosticsRow row;
      row.t = state.t;
      row.sup_grad = std::sqrt(stats.grad_sq_max);
      row.sup_ut = stats.ut_max;
      row.l2_ut = l2_ut;
      row.area = cell * stats.area_sum;
      row.min_gap_lower = min_gap_below(state.u, obs);
      row.min_gap_upper = min_gap_above(state.u, obs);
      row.density = config.density ? gaussian_density(state.u, *config.density, state.t)
                                   : std::numeric_limits<double>::quiet_NaN();
      row.dt = dt;
      row.dissipated = dissipated;
      row.step = state.steps;
      result.log.rows.push_back(row);
      if (config.record_interval > 0.0) {
        while (reached(state.t, event(config.record_interval, record_count))) ++record_count;
      }
    }

    if (hooks.on_snapshot) {
      const bool snap_due = first || (hooks.snapshot_interval > 0.0 &&
                                      reached(state.t, event(hooks.snapshot_interval, snapshot_count)));
      if (snap_due || done) snapshot();
      if (hooks.snapshot_interval > 0.0) {
        while (reached(state.t, event(hooks.snapshot_interval, snapshot_count))) ++snapshot_count;
      }
    }
    first = false;

    if (done) {
      if (is_stationary) {
        result.status = RunStatus::stationary;
      } else if (time_done) {
        result.status = RunStatus::reached_time;
      } else {
        result.status = RunStatus::max_steps;
        result.message = "max_steps=" + std::to_string(config.max_steps) +
                         " reached before the stopping rule (l2(u_t)=" + format_double(l2_ut) + ")";
      }
      break;
    }

    dissipated += dt * cell * stats.dissipation_sum;
    state.u = std::move(*next);
    state.t = landing ? *landing : state.t + dt;
    ++state.steps;
  }

  result.state = std::move(state);
  return result;
}

ComparisonReport comparison_test(const ScalarField& u0, const ScalarField& v0,
                                 const ObstaclePair& obs, const FlowConfig& config, double t_end) {
  return comparison_test(u0, v0, obs, obs, config, t_end);
}

ComparisonReport comparison_test(const ScalarField& u0, const ScalarField& v0,
                                 const ObstaclePair& obs_u, const ObstaclePair& obs_v,
                                 const FlowConfig& config, double t_end) {
  config.validate();
  require_same_grid(u0, v0, "comparison_test");
  require_same_grid(u0, obs_u.lower, "comparison_test");
  require_same_grid(v0, obs_v.lower, "comparison_test");
  for (std::size_t k = 0; k < u0.size(); ++k) {
    if (u0[k] > v0[k]) {
      throw ContractViolation("comparison_test: u0 <= v0 fails at index " + std::to_string(k));
    }
  }
  check_penalization_band(obs_u, config);
  check_penalization_band(obs_v, config);

  FlowState u{u0, 0.0, 0};
  FlowState v{v0, 0.0, 0};
  ComparisonReport report;
  while (!reached(u.t, t_end)) {
    double dt = std::min(cfl_dt(u, obs_u, config), cfl_dt(v, obs_v, config));
    const double remaining = t_end - u.t;
    const bool lands = remaining <= dt;
    if (lands) dt = remaining;
    u = step(u, obs_u, config, dt);
    v = step(v, obs_v, config, dt);
    if (lands) u.t = v.t = t_end;
    double defect = 0.0;
    for (std::size_t k = 0; k < u.u.size(); ++k) defect = std::max(defect, u.u[k] - v.u[k]);
    if (defect > report.max_defect) {
      report.max_defect = defect;
      report.defect_time = u.t;
    }
    ++report.steps;
  }
  return report;
}

}  // namespace mcfob
