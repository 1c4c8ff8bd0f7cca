#include "mcfob/density.hpp"

#include <cmath>
#include <numbers>

#include "mcfob/error.hpp"

namespace mcfob {

double gaussian_density(const ScalarField& u, const DensityProbe& probe, double t) {
  const PeriodicGrid& g = u.grid();
  const int dim = g.dim();
  if (probe.point.size() != static_cast<std::size_t>(dim + 1)) {
    throw ContractViolation("gaussian_density: probe point needs d + 1 coordinates");
  }
  const double tau = probe.t0 - t;
  if (!(tau > 0.0)) throw ContractViolation("gaussian_density: requires t < t0");

  const double length = g.length();
  const double z0 = probe.point[static_cast<std::size_t>(dim)];
  const double inv4tau = 1.0 / (4.0 * tau);
  const double norm = std::pow(4.0 * std::numbers::pi * tau, -0.5 * dim);

  std::vector<double> w(u.size());
  detail::sweep_geometry(u, [&](std::size_t k, const detail::LocalGeometry& geo) {
    w[k] = std::sqrt(1.0 + geo.grad_sq);
  });

  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const GridPoint x = g.point(k);
    double dist2 = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
      double delta = x[static_cast<std::size_t>(axis)] - probe.point[static_cast<std::size_t>(axis)];
      delta -= length * std::round(delta / length);
      dist2 += delta * delta;
    }
    const double dz = u[k] - z0;
    dist2 += dz * dz;
    sum += std::exp(-dist2 * inv4tau) * w[k];
  }
  return g.cell_volume() * norm * sum;
}

}  // namespace mcfob
