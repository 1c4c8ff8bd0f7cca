#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mcfob/density.hpp"
#include "mcfob/flow.hpp"
#include "mcfob/grid.hpp"
#include "mcfob/obstacles.hpp"
#include "mcfob/sphere.hpp"

namespace mcfob {

/// Outcome of one verification check. worst_margin is the largest excess of
/// the observed quantity over its reference (before slack); the check passes
/// when it stays within the slack recorded in `parameters`.
struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_margin = 0.0;
  std::string parameters;
};

inline constexpr std::string_view kReportHeader = "check,result,worst_margin,parameters";

void write_report_header(std::ostream& out);
void append_report_row(std::ostream& out, const CheckReport& report);

// Lower barrier of the form
//   g(x) = -sum_i alpha_i (x - a)_i^2 / sqrt(1 + (x - a)_i^2) + b
// descending in time at rate 2 sum alpha_i + 3M.
struct BarrierSpec {
  std::vector<double> vertex;  // a
  std::vector<double> alpha;   // alpha_i >= 0
  double offset = 0.0;         // b
  double slope = 0.0;          // M >= 0

  bool operator==(const BarrierSpec&) const = default;
};

/// g(x) - (2 sum alpha_i + 3M) t. Throws ContractViolation on size mismatch
/// or negative coefficients.
double barrier_value(const BarrierSpec& spec, std::span<const double> x, double t);

/// barrier_value sampled on the grid, using per axis the periodic image of x
/// closest to the vertex (the largest value over images).
ScalarField barrier_field(const BarrierSpec& spec, const PeriodicGrid& grid, double t);

/// max over snapshots of max(barrier v psi- - u)_+. Pass when the defect is at
/// most tolerance_factor * h. Throws ContractViolation if the first snapshot
/// already lies below barrier v psi-.
CheckReport barrier_below_check(std::span<const FlowState> snapshots, const BarrierSpec& spec,
                                const ObstaclePair& obs, double tolerance_factor = 10.0);

struct ComplementarityResidual {
  double res_pde = 0.0;           // sup off the contact set of |H[u]|
  double res_comp = 0.0;          // sup of min(u - psi-, psi+ - u) |H[u]|
  double contact_fraction = 0.0;  // contact cells / n^d
};

/// Contact set = {u - psi- < 10h^2} U {psi+ - u < 10h^2}; absent obstacles are
/// ignored. Throws ContractViolation unless psi- <= u <= psi+.
ComplementarityResidual complementarity_residual(const ScalarField& u, const ObstaclePair& obs);

CheckReport complementarity_check(const ScalarField& u, const ObstaclePair& obs,
                                  double pde_tolerance = 1e-3, double comp_tolerance = 1e-4);

/// sup|grad u(t)| <= max(sup|grad u0|, sup|grad psi+-|) + 10h for every row.
CheckReport lipschitz_check(const DiagnosticsLog& log, const ScalarField& u0,
                            const ObstaclePair& obs);

/// Recorded sup|u_t| never exceeds its running minimum by more than
/// 10 (dt + h^2)(1 + sup|u_t|(0)).
CheckReport ut_monotone_check(const DiagnosticsLog& log);

/// psi- - eps - 2h^2 <= u <= psi+ + eps + 2h^2 on every row.
CheckReport band_check(const DiagnosticsLog& log, double epsilon);

/// psi- <= u <= psi+ exactly on every row.
CheckReport constraint_check(const DiagnosticsLog& log);

/// Area increase between consecutive rows is at most 10 dt.
CheckReport area_check(const DiagnosticsLog& log);

/// Per interval, |dArea + int h^d sum u_t^2/W dt| <= rel_tolerance * dissipation.
/// Intervals whose dissipation is below 1e-12 * area are skipped.
CheckReport dissipation_identity_check(const DiagnosticsLog& log, double rel_tolerance = 0.1);

/// Max forward increase (later minus earlier) of exp(-K^2 t/4) * density. Requires a
/// density column and sqrt(t0 - t) <= L/8 on every row.
CheckReport density_monotonicity_check(const DiagnosticsLog& log, double forcing_bound,
                                       double tolerance = 5e-3);

}  // namespace mcfob
