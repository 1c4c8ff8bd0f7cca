#pragma once

#include <span>
#include <utility>
#include <vector>

namespace mcfob {

/// Sampled radius of a sphere evolving by R' = -(d/R + 2N), R(0) = R0.
struct SphereEvolution {
  double initial_radius = 0.0;
  double forcing = 0.0;  // N
  int dim = 1;
  double extinction_time = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, R(t)); R = 0 past extinction
};

/// Integrates the forced sphere ODE with step-doubling adaptive RK4 (local
/// tolerance 1e-10) and samples it at `times` (any order, t >= 0).
SphereEvolution sphere_evolution(double r0, double forcing, int dim, std::span<const double> times);

/// R(t) for a single time; 0 after extinction.
double sphere_radius(double r0, double forcing, int dim, double t);

/// Time at which the numerically integrated radius reaches 0.
double sphere_extinction_time(double r0, double forcing, int dim);

}  // namespace mcfob
