#include "mcfob/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "mcfob/error.hpp"
#include "mcfob/field_io.hpp"

namespace mcfob {
namespace {

std::string params(std::initializer_list<std::pair<const char*, double>> items) {
  std::string out;
  for (const auto& [key, value] : items) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += format_double(value);
  }
  return out;
}

double max_dt(const DiagnosticsLog& log) {
  double dt = 0.0;
  for (const auto& r : log.rows) dt = std::max(dt, r.dt);
  return dt;
}

}  // namespace

void write_report_header(std::ostream& out) { out << kReportHeader << '\n'; }

void append_report_row(std::ostream& out, const CheckReport& report) {
  out << report.name << ',' << (report.passed ? "pass" : "fail") << ','
      << format_double(report.worst_margin) << ',' << report.parameters << '\n';
}

double barrier_value(const BarrierSpec& spec, std::span<const double> x, double t) {
  if (spec.vertex.size() != spec.alpha.size() || x.size() < spec.vertex.size()) {
    throw ContractViolation("barrier_value: vertex, alpha and x must have matching sizes");
  }
  if (spec.slope < 0.0) throw ContractViolation("barrier_value: M must be >= 0");
  double g = spec.offset;
  double rate = 3.0 * spec.slope;
  for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
    if (spec.alpha[i] < 0.0) throw ContractViolation("barrier_value: alpha_i must be >= 0");
    const double d = x[i] - spec.vertex[i];
    g -= spec.alpha[i] * d * d / std::sqrt(1.0 + d * d);
    rate += 2.0 * spec.alpha[i];
  }
  return g - rate * t;
}

ScalarField barrier_field(const BarrierSpec& spec, const PeriodicGrid& grid, double t) {
  const std::size_t dim = static_cast<std::size_t>(grid.dim());
  if (spec.vertex.size() != dim) {
    throw ContractViolation("barrier_field: vertex dimension does not match the grid");
  }
  const double length = grid.length();
  return ScalarField::sample(grid, [&](const GridPoint& x) {
    std::array<double, 2> image{};
    for (std::size_t i = 0; i < dim; ++i) {
      double d = x[i] - spec.vertex[i];
      d -= length * std::round(d / length);
      image[i] = spec.vertex[i] + d;
    }
    return barrier_value(spec, std::span<const double>(image.data(), dim), t);
  });
}

CheckReport barrier_below_check(std::span<const FlowState> snapshots, const BarrierSpec& spec,
                                const ObstaclePair& obs, double tolerance_factor) {
  if (snapshots.empty()) throw ContractViolation("barrier_below_check: no snapshots");
  const PeriodicGrid& grid = snapshots.front().u.grid();
  double worst = 0.0;
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const FlowState& state = snapshots[s];
    const ScalarField barrier = barrier_field(spec, grid, state.t);
    double defect = 0.0;
    for (std::size_t k = 0; k < barrier.size(); ++k) {
      const double below = std::max(barrier[k], obs.lower[k]);
      defect = std::max(defect, below - state.u[k]);
    }
    if (s == 0 && defect > 0.0) {
      throw ContractViolation("barrier_below_check: initial data lies below barrier v psi- by " +
                              format_double(defect));
    }
    worst = std::max(worst, defect);
  }
  const double tolerance = tolerance_factor * grid.spacing();
  return {"barrier", worst <= tolerance, worst,
          params({{"tolerance", tolerance}, {"snapshots", static_cast<double>(snapshots.size())}})};
}

ComplementarityResidual complementarity_residual(const ScalarField& u, const ObstaclePair& obs) {
  require_same_grid(u, obs.lower, "complementarity_residual");
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] < obs.lower[k] || u[k] > obs.upper[k]) {
      throw ContractViolation("complementarity_residual: u leaves [psi-, psi+] at index " +
                              std::to_string(k));
    }
  }
  const double h = u.grid().spacing();
  const double contact_band = 10.0 * h * h;
  const ScalarField curvature = mcf_operator(u);
  ComplementarityResidual res;
  std::size_t contact = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double gap_lower = obs.lower_present ? u[k] - obs.lower[k] : INFINITY;
    const double gap_upper = obs.upper_present ? obs.upper[k] - u[k] : INFINITY;
    const double gap = std::min(gap_lower, gap_upper);
    const double hk = std::abs(curvature[k]);
    if (gap < contact_band) {
      ++contact;
    } else {
      res.res_pde = std::max(res.res_pde, hk);
    }
    // With no obstacle present the complementarity product is vacuous.
    if (std::isfinite(gap)) res.res_comp = std::max(res.res_comp, gap * hk);
  }
  res.contact_fraction = static_cast<double>(contact) / static_cast<double>(u.size());
  return res;
}

CheckReport complementarity_check(const ScalarField& u, const ObstaclePair& obs,
                                  double pde_tolerance, double comp_tolerance) {
  const ComplementarityResidual r = complementarity_residual(u, obs);
  const bool ok = r.res_pde < pde_tolerance && r.res_comp < comp_tolerance;
  return {"complementarity", ok, std::max(r.res_pde - pde_tolerance, r.res_comp - comp_tolerance),
          params({{"res_pde", r.res_pde},
                  {"res_comp", r.res_comp},
                  {"contact_fraction", r.contact_fraction},
                  {"pde_tolerance", pde_tolerance},
                  {"comp_tolerance", comp_tolerance}})};
}

CheckReport lipschitz_check(const DiagnosticsLog& log, const ScalarField& u0,
                            const ObstaclePair& obs) {
  double reference = max_gradient_norm(u0);
  if (obs.lower_present) reference = std::max(reference, max_gradient_norm(obs.lower));
  if (obs.upper_present) reference = std::max(reference, max_gradient_norm(obs.upper));
  const double slack = 10.0 * log.grid.spacing();
  double worst = log.rows.empty() ? 0.0 : -INFINITY;
  for (const auto& r : log.rows) worst = std::max(worst, r.sup_grad - reference);
  return {"lipschitz", worst <= slack, worst, params({{"reference", reference}, {"slack", slack}})};
}

CheckReport ut_monotone_check(const DiagnosticsLog& log) {
  if (log.rows.empty()) return {"ut_decay", true, 0.0, "rows=0"};
  const double h = log.grid.spacing();
  const double initial = log.rows.front().sup_ut;
  const double slack = 10.0 * (max_dt(log) + h * h) * (1.0 + initial);
  double running_min = initial;
  double worst = 0.0;
  for (const auto& r : log.rows) {
    worst = std::max(worst, r.sup_ut - running_min);
    running_min = std::min(running_min, r.sup_ut);
  }
  return {"ut_decay", worst <= slack, worst,
          params({{"initial_sup_ut", initial}, {"slack", slack}})};
}

CheckReport band_check(const DiagnosticsLog& log, double epsilon) {
  const double h = log.grid.spacing();
  const double slack = epsilon + 2.0 * h * h;
  double worst = -INFINITY;
  for (const auto& r : log.rows) {
    worst = std::max({worst, -r.min_gap_lower, -r.min_gap_upper});
  }
  if (log.rows.empty()) worst = 0.0;
  return {"band", worst <= slack, worst, params({{"epsilon", epsilon}, {"slack", slack}})};
}

CheckReport constraint_check(const DiagnosticsLog& log) {
  double worst = -INFINITY;
  for (const auto& r : log.rows) {
    worst = std::max({worst, -r.min_gap_lower, -r.min_gap_upper});
  }
  if (log.rows.empty()) worst = 0.0;
  return {"constraint", worst <= 0.0, worst, params({{"slack", 0.0}})};
}

CheckReport area_check(const DiagnosticsLog& log) {
  double worst = 0.0;
  bool ok = true;
  double worst_excess = -INFINITY;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    const double increase = log.rows[k].area - log.rows[k - 1].area;
    const double slack = 10.0 * std::max(log.rows[k].dt, log.rows[k - 1].dt);
    worst = std::max(worst, increase);
    worst_excess = std::max(worst_excess, increase - slack);
    if (increase > slack) ok = false;
  }
  return {"area", ok, worst, params({{"slack_per_dt", 10.0}, {"worst_excess", worst_excess}})};
}

CheckReport dissipation_identity_check(const DiagnosticsLog& log, double rel_tolerance) {
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    const auto& a = log.rows[k - 1];
    const auto& b = log.rows[k];
    const double dissipation = b.dissipated - a.dissipated;
    if (!(dissipation > 1e-12 * a.area)) continue;
    const double rel = std::abs((b.area - a.area) + dissipation) / dissipation;
    worst = std::max(worst, rel);
    ++used;
  }
  return {"dissipation", worst <= rel_tolerance, worst,
          params({{"rel_tolerance", rel_tolerance}, {"intervals", static_cast<double>(used)}})};
}

CheckReport density_monotonicity_check(const DiagnosticsLog& log, double forcing_bound,
                                       double tolerance) {
  if (!log.density) throw ContractViolation("density_monotonicity_check: log has no density probe");
  const double limit = log.grid.length() / 8.0;
  for (const auto& r : log.rows) {
    const double tau = log.density->t0 - r.t;
    if (!(tau > 0.0) || std::sqrt(tau) > limit) {
      throw ContractViolation("density_monotonicity_check: sqrt(t0 - t) must lie in (0, L/8] at t=" +
                              format_double(r.t));
    }
  }
  const double rate = 0.25 * forcing_bound * forcing_bound;
  double worst = 0.0;
  double running_min = INFINITY;
  for (const auto& r : log.rows) {
    const double adjusted = std::exp(-rate * r.t) * r.density;
    worst = std::max(worst, adjusted - running_min);
    running_min = std::min(running_min, adjusted);
  }
  return {"density", worst <= tolerance, worst,
          params({{"K", forcing_bound}, {"tolerance", tolerance}, {"t0", log.density->t0}})};
}

}  // namespace mcfob
