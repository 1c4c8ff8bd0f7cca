#include "mcfob/obstacles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mcfob/error.hpp"

namespace mcfob {

ObstaclePair make_obstacles(const PeriodicGrid& grid, std::optional<ScalarField> lower,
                            std::optional<ScalarField> upper) {
  const bool has_lower = lower.has_value();
  const bool has_upper = upper.has_value();
  ObstaclePair obs{
      has_lower ? std::move(*lower) : ScalarField(grid, -kAbsentObstacle),
      has_upper ? std::move(*upper) : ScalarField(grid, kAbsentObstacle),
      0.0,
      has_lower,
      has_upper,
  };
  if (!(obs.lower.grid() == grid) || !(obs.upper.grid() == grid)) {
    throw ContractViolation("make_obstacles: obstacle grid does not match");
  }
  if (has_lower && has_upper) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!(obs.upper[k] - obs.lower[k] > 0.0)) {
        throw ContractViolation("make_obstacles: lower obstacle meets the upper one at index " +
                                std::to_string(k));
      }
    }
  }
  obs.curvature_bound = compute_curvature_bound(obs);
  return obs;
}

double compute_curvature_bound(const ObstaclePair& obs) {
  double bound = 0.0;
  if (obs.lower_present) bound = std::max(bound, inf_norm(mcf_operator(obs.lower)));
  if (obs.upper_present) bound = std::max(bound, inf_norm(mcf_operator(obs.upper)));
  return kCurvatureSafety * bound;
}

double min_obstacle_gap(const ObstaclePair& obs) {
  if (!(obs.lower_present && obs.upper_present)) return std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < obs.lower.size(); ++k) {
    gap = std::min(gap, obs.upper[k] - obs.lower[k]);
  }
  return gap;
}

ScalarField forcing(const ScalarField& u, const ObstaclePair& obs, const PenalizationParams& p) {
  require_same_grid(u, obs.lower, "forcing");
  ScalarField out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[k] = forcing_value(u[k], obs.lower[k], obs.upper[k], p);
  }
  return out;
}

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "flat") return ShapeKind::flat;
  if (name == "sine") return ShapeKind::sine;
  if (name == "cap") return ShapeKind::cap;
  throw ConfigError("unknown shape kind '" + std::string(name) + "' (expected flat, sine or cap)");
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::flat: return "flat";
    case ShapeKind::sine: return "sine";
    case ShapeKind::cap: return "cap";
  }
  return "flat";
}

ScalarField builtin_obstacle(const ShapeSpec& spec, const PeriodicGrid& grid) {
  const double length = grid.length();
  const int dim = grid.dim();
  switch (spec.kind) {
    case ShapeKind::flat:
      return ScalarField(grid, spec.value);
    case ShapeKind::sine: {
      const double k = 2.0 * std::numbers::pi / length;
      return ScalarField::sample(grid, [&](const GridPoint& x) {
        double s = std::sin(k * x[0]);
        if (dim == 2) s *= std::sin(k * x[1]);
        return spec.amplitude * s + spec.offset;
      });
    }
    case ShapeKind::cap: {
      const double r2 = spec.radius * spec.radius;
      return ScalarField::sample(grid, [&](const GridPoint& x) {
        double dist2 = 0.0;
        for (int axis = 0; axis < dim; ++axis) {
          double delta = x[axis] - spec.center[axis];
          delta -= length * std::round(delta / length);
          dist2 += delta * delta;
        }
        return spec.sign * std::max(r2 - dist2, 0.0) + spec.offset;
      });
    }
  }
  throw ConfigError("builtin_obstacle: unhandled shape kind");
}

}  // namespace mcfob
