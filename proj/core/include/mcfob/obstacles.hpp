#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "mcfob/grid.hpp"

namespace mcfob {

/// Magnitude of the sentinel value standing in for an absent obstacle
/// (lower = -kAbsentObstacle, upper = +kAbsentObstacle).
inline constexpr double kAbsentObstacle = 1e30;

/// Safety factor applied to the obstacle curvature bound N.
inline constexpr double kCurvatureSafety = 1.1;

/// max of smoothstep' (attained at s = 1/2).
inline constexpr double kSmoothstepSlopeMax = 15.0 / 8.0;

/// Lower/upper obstacles and their curvature bound N. Build through
/// make_obstacles() so that the ordering and N invariants hold.
struct ObstaclePair {
  ScalarField lower;
  ScalarField upper;
  double curvature_bound = 0.0;
  bool lower_present = false;
  bool upper_present = false;

  const PeriodicGrid& grid() const { return lower.grid(); }
  bool one_sided() const { return lower_present != upper_present; }
};

/// Validates the pair (same grid, min(upper - lower) > 0 when both are
/// present) and stores N = compute_curvature_bound(). Absent obstacles become
/// sentinel fields.
ObstaclePair make_obstacles(const PeriodicGrid& grid, std::optional<ScalarField> lower,
                            std::optional<ScalarField> upper);

/// 1.1 * max over the present obstacles of inf_norm(mcf_operator(psi)).
double compute_curvature_bound(const ObstaclePair& obs);

/// min(upper - lower); +inf unless both obstacles are present.
double min_obstacle_gap(const ObstaclePair& obs);

struct PenalizationParams {
  double epsilon = 0.0;
  double amplitude = 0.0;  // N; the forcing saturates at +-2N
};

/// Quintic smoothstep: 0 on (-inf, 0], 1 on [1, inf), 6s^5 - 15s^4 + 10s^3
/// in between.
inline double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

/// Pointwise k_eps(x, u) = 2N [chi((psi- - u)/eps) - chi((u - psi+)/eps)].
/// Arguments are clamped before evaluation so sentinel obstacles contribute 0.
inline double forcing_value(double u, double lower, double upper, const PenalizationParams& p) {
  const double below = std::clamp((lower - u) / p.epsilon, -1.0, 2.0);
  const double above = std::clamp((u - upper) / p.epsilon, -1.0, 2.0);
  return 2.0 * p.amplitude * (smoothstep(below) - smoothstep(above));
}

/// Pointwise k_eps over the grid. Throws ContractViolation on grid mismatch.
ScalarField forcing(const ScalarField& u, const ObstaclePair& obs, const PenalizationParams& p);

enum class ShapeKind { flat, sine, cap };

ShapeKind parse_shape_kind(std::string_view name);
std::string_view to_string(ShapeKind kind);

/// Parameters of a built-in field generator:
///   flat: value
///   sine: amplitude * sin(2 pi x/L) [* sin(2 pi y/L)] + offset
///   cap:  sign * (radius^2 - |x - center|^2)_+ + offset, distance taken to
///         the nearest periodic image of center
struct ShapeSpec {
  ShapeKind kind = ShapeKind::flat;
  double value = 0.0;
  double amplitude = 0.0;
  double radius = 0.0;
  std::array<double, 2> center{0.0, 0.0};
  double sign = 1.0;
  double offset = 0.0;

  bool operator==(const ShapeSpec&) const = default;
};

ScalarField builtin_obstacle(const ShapeSpec& spec, const PeriodicGrid& grid);

}  // namespace mcfob
