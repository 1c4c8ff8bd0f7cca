#include "mcfob/grid.hpp"

#include <algorithm>
#include <string>

#include "mcfob/error.hpp"

namespace mcfob {

PeriodicGrid::PeriodicGrid(int dim, double length, int samples)
    : dim_(dim), length_(length), samples_(samples), spacing_(length / samples), size_(0) {
  if (dim != 1 && dim != 2) {
    throw ContractViolation("PeriodicGrid: dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (samples < 4) {
    throw ContractViolation("PeriodicGrid: need at least 4 samples per axis, got " +
                            std::to_string(samples));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ContractViolation("PeriodicGrid: period length must be positive and finite");
  }
  if (spacing_ * samples != length) {
    throw ContractViolation("PeriodicGrid: spacing L/n does not reproduce L exactly for L=" +
                            std::to_string(length) + ", n=" + std::to_string(samples));
  }
  size_ = dim == 1 ? static_cast<std::size_t>(samples)
                   : static_cast<std::size_t>(samples) * static_cast<std::size_t>(samples);
}

GridPoint PeriodicGrid::point(std::size_t k) const {
  if (dim_ == 1) return {static_cast<double>(k) * spacing_, 0.0};
  const std::size_t n = static_cast<std::size_t>(samples_);
  return {static_cast<double>(k / n) * spacing_, static_cast<double>(k % n) * spacing_};
}

ScalarField::ScalarField(const PeriodicGrid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {
  if (!std::isfinite(value)) throw ContractViolation("ScalarField: non-finite fill value");
}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ContractViolation("ScalarField: expected " + std::to_string(grid_.size()) +
                            " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw ContractViolation("ScalarField: non-finite value at index " + std::to_string(k));
    }
  }
}

ScalarField& ScalarField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other, "ScalarField::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other, "ScalarField::operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField f, double c) { return f += c; }
ScalarField operator-(ScalarField f, const ScalarField& g) { return f -= g; }
ScalarField operator-(ScalarField f) { return f *= -1.0; }

VectorField::VectorField(const PeriodicGrid& g, std::vector<ScalarField> comps)
    : grid(g), components(std::move(comps)) {
  if (components.size() != static_cast<std::size_t>(grid.dim())) {
    throw ContractViolation("VectorField: component count must equal grid dimension");
  }
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw ContractViolation(std::string(where) + ": fields live on different grids");
  }
}

VectorField gradient(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  std::vector<ScalarField> comps(static_cast<std::size_t>(g.dim()), ScalarField(g));
  ScalarField& gx = comps[0];
  ScalarField* gy = g.dim() == 2 ? &comps[1] : nullptr;
  detail::sweep_geometry(f, [&](std::size_t k, const detail::LocalGeometry& geo) {
    gx[k] = geo.fx;
    if (gy) (*gy)[k] = geo.fy;
  });
  return VectorField(g, std::move(comps));
}

ScalarField mcf_operator(const ScalarField& f) {
  ScalarField out(f.grid());
  detail::sweep_geometry(f, [&](std::size_t k, const detail::LocalGeometry& geo) {
    out[k] = geo.curvature;
  });
  return out;
}

double graph_area(const ScalarField& f) {
  std::vector<double> w(f.size());
  detail::sweep_geometry(f, [&](std::size_t k, const detail::LocalGeometry& geo) {
    w[k] = std::sqrt(1.0 + geo.grad_sq);
  });
  double sum = 0.0;
  for (double x : w) sum += x;
  return f.grid().cell_volume() * sum;
}

double inf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(f.grid().cell_volume() * sum);
}

double max_gradient_norm(const ScalarField& f) {
  std::vector<double> q(f.size());
  detail::sweep_geometry(f, [&](std::size_t k, const detail::LocalGeometry& geo) {
    q[k] = geo.grad_sq;
  });
  double m = 0.0;
  for (double x : q) m = std::max(m, x);
  return std::sqrt(m);
}

ScalarField cyclic_shift(const ScalarField& f, int offset, int axis) {
  const PeriodicGrid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw ContractViolation("cyclic_shift: axis out of range");
  ScalarField out(g);
  const int n = g.samples();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[g.index(i)] = f[g.index(i - offset)];
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t src = axis == 0 ? g.index(i - offset, j) : g.index(i, j - offset);
      out[g.index(i, j)] = f[src];
    }
  }
  return out;
}

}  // namespace mcfob
