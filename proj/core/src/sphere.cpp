#include "mcfob/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mcfob/error.hpp"

namespace mcfob {
namespace {

constexpr double kLocalTolerance = 1e-10;

struct SphereOde {
  double forcing;
  double dim;

  double rate(double r) const { return -(dim / r + 2.0 * forcing); }

  // Classical RK4 step; empty when a stage leaves R > 0.
  std::optional<double> rk4(double r, double h) const {
    const double k1 = rate(r);
    const double r2 = r + 0.5 * h * k1;
    if (!(r2 > 0.0)) return std::nullopt;
    const double k2 = rate(r2);
    const double r3 = r + 0.5 * h * k2;
    if (!(r3 > 0.0)) return std::nullopt;
    const double k3 = rate(r3);
    const double r4 = r + h * k3;
    if (!(r4 > 0.0)) return std::nullopt;
    const double k4 = rate(r4);
    const double next = r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(next > 0.0) || !std::isfinite(next)) return std::nullopt;
    return next;
  }
};

void check_inputs(double r0, double forcing, int dim) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ContractViolation("sphere: R0 must be positive");
  if (!(forcing >= 0.0) || !std::isfinite(forcing)) {
    throw ContractViolation("sphere: forcing N must be nonnegative");
  }
  if (dim < 1) throw ContractViolation("sphere: dimension must be >= 1");
}

}  // namespace

SphereEvolution sphere_evolution(double r0, double forcing, int dim, std::span<const double> times) {
  check_inputs(r0, forcing, dim);
  for (double t : times) {
    if (!(t >= 0.0)) throw ContractViolation("sphere: sample times must be >= 0");
  }

  std::vector<std::size_t> order(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  SphereEvolution out{r0, forcing, dim, 0.0, {}};
  std::vector<double> radius(times.size(), 0.0);

  const SphereOde ode{forcing, static_cast<double>(dim)};
  const double floor = 1e-7 * r0;
  double t = 0.0;
  double r = r0;
  double h = 1e-3 * r0 * r0 / dim;
  std::size_t next = 0;

  auto emit_until = [&](double limit) {
    while (next < order.size() && times[order[next]] <= limit) {
      radius[order[next]] = times[order[next]] == t ? r : 0.0;
      ++next;
    }
  };

  emit_until(0.0);
  while (r > floor) {
    // Step to the next sample time if one is inside the step.
    const bool has_target = next < order.size();
    const double target = has_target ? times[order[next]] : std::numeric_limits<double>::infinity();
    const double step = std::min(h, target - t);
    const bool hits_target = step == target - t;

    const auto full = ode.rk4(r, step);
    const auto half = ode.rk4(r, 0.5 * step);
    const auto two_halves = half ? ode.rk4(*half, 0.5 * step) : std::nullopt;
    if (!full || !two_halves) {
      h = 0.25 * step;
      continue;
    }
    const double err = std::abs(*two_halves - *full) / 15.0;
    const double scale = err > 0.0 ? 0.9 * std::pow(kLocalTolerance / err, 0.2) : 4.0;
    if (err > kLocalTolerance) {
      h = step * std::max(0.1, scale);
      continue;
    }
    const double candidate = *two_halves + (*two_halves - *full) / 15.0;
    if (!(candidate > 0.0)) {
      h = 0.25 * step;
      continue;
    }
    t = hits_target ? target : t + step;
    r = candidate;
    h = step * std::min(4.0, scale);
    if (hits_target) h = std::max(h, 1e-3 * r * r / dim);
    emit_until(t);
  }

  // Below the floor the remaining lifetime is r^2 / (2d) to leading order.
  const double t_floor = t;
  const double r_floor = r;
  out.extinction_time = t_floor + r_floor * r_floor / (2.0 * dim);
  for (; next < order.size(); ++next) {
    const double ts = times[order[next]];
    const double rem = r_floor * r_floor - 2.0 * dim * (ts - t_floor);
    radius[order[next]] = rem > 0.0 ? std::sqrt(rem) : 0.0;
  }

  out.samples.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out.samples.emplace_back(times[k], radius[k]);
  return out;
}

double sphere_radius(double r0, double forcing, int dim, double t) {
  const double times[] = {t};
  return sphere_evolution(r0, forcing, dim, times).samples.front().second;
}

double sphere_extinction_time(double r0, double forcing, int dim) {
  return sphere_evolution(r0, forcing, dim, {}).extinction_time;
}

}  // namespace mcfob
