#pragma once

#include <vector>

#include "mcfob/grid.hpp"

namespace mcfob {

/// Space-time centre (X0, t0) of the backward heat kernel. `point` holds the
/// d horizontal coordinates followed by the height: size d + 1.
struct DensityProbe {
  std::vector<double> point;
  double t0 = 0.0;

  bool operator==(const DensityProbe&) const = default;
};

/// Gaussian density of the graph of u at time t:
///   h^d sum_j rho((x_j, u_j), t) sqrt(1 + |grad u|_j^2),
///   rho(X, t) = (4 pi (t0 - t))^(-d/2) exp(-|X0 - X|^2 / (4 (t0 - t))),
/// summed over one periodicity cell centred (minimum image) on the horizontal
/// projection of X0. Throws ContractViolation when t >= t0.
double gaussian_density(const ScalarField& u, const DensityProbe& probe, double t);

}  // namespace mcfob
