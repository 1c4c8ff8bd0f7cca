#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mcfob/parallel.hpp"

namespace mcfob {

/// Point of the periodicity cell; only the first dim() entries are used.
using GridPoint = std::array<double, 2>;

/// Uniform periodic lattice over [0, L)^d with n samples per axis, d in {1, 2}.
/// Index arithmetic wraps modulo n on every axis.
class PeriodicGrid {
 public:
  PeriodicGrid(int dim, double length, int samples);

  int dim() const { return dim_; }
  double length() const { return length_; }
  int samples() const { return samples_; }
  double spacing() const { return spacing_; }

  /// n^d.
  std::size_t size() const { return size_; }

  /// Cell measure h^d.
  double cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

  int wrap(int i) const {
    const int r = i % samples_;
    return r < 0 ? r + samples_ : r;
  }

  std::size_t index(int i) const { return static_cast<std::size_t>(wrap(i)); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap(i)) * static_cast<std::size_t>(samples_) +
           static_cast<std::size_t>(wrap(j));
  }

  /// Coordinates of the sample with flat index k.
  GridPoint point(std::size_t k) const;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int dim_;
  double length_;
  int samples_;
  double spacing_;
  std::size_t size_;
};

/// Grid-sampled real function, values stored row-major (axis 0 slowest).
class ScalarField {
 public:
  explicit ScalarField(const PeriodicGrid& grid, double value = 0.0);
  ScalarField(const PeriodicGrid& grid, std::vector<double> values);

  template <class Fn>
  static ScalarField sample(const PeriodicGrid& grid, Fn&& fn) {
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = fn(grid.point(k));
    return ScalarField(grid, std::move(values));
  }

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  ScalarField& operator+=(double c);
  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double c);

  bool operator==(const ScalarField&) const = default;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField f, double c);
ScalarField operator-(ScalarField f, const ScalarField& g);
ScalarField operator-(ScalarField f);

/// One ScalarField per axis.
struct VectorField {
  VectorField(const PeriodicGrid& grid, std::vector<ScalarField> components);

  PeriodicGrid grid;
  std::vector<ScalarField> components;
};

/// Throws ContractViolation when the two fields live on different grids.
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

/// Central-difference gradient, periodic wrap.
VectorField gradient(const ScalarField& f);

/// Non-divergence graph mean curvature operator
///   H[f] = sum_ij (delta_ij - f_i f_j / (1 + |grad f|^2)) f_ij
/// with central first/second differences and the 4-corner mixed stencil.
ScalarField mcf_operator(const ScalarField& f);

/// h^d * sum sqrt(1 + |grad f|^2).
double graph_area(const ScalarField& f);

double inf_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);

/// sup |grad f| over the grid (central differences).
double max_gradient_norm(const ScalarField& f);

/// Cyclic shift of the values by `offset` samples along `axis`:
/// result[i] = f[i - offset].
ScalarField cyclic_shift(const ScalarField& f, int offset, int axis = 0);

namespace detail {

struct LocalGeometry {
  double fx;
  double fy;
  double grad_sq;
  double curvature;
};

inline LocalGeometry geometry_1d(double fm, double f0, double fp, double inv2h, double invh2) {
  const double fx = (fp - fm) * inv2h;
  const double fxx = (fp - 2.0 * f0 + fm) * invh2;
  const double q = fx * fx;
  return {fx, 0.0, q, fxx / (1.0 + q)};
}

/// Calls fn(k, geometry) for every flat index k. In d=2 rows are spread over
/// the worker pool; fn must only write to slot k (or row-local storage keyed
/// by row index).
template <class Fn>
void sweep_geometry(const ScalarField& f, Fn&& fn) {
  const PeriodicGrid& g = f.grid();
  const int n = g.samples();
  const double h = g.spacing();
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  const double* v = f.data();

  if (g.dim() == 1) {
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      const int jp = j == n - 1 ? 0 : j + 1;
      fn(static_cast<std::size_t>(j), geometry_1d(v[jm], v[j], v[jp], inv2h, invh2));
    }
    return;
  }

  const double inv4h2 = 0.25 * invh2;
  const std::size_t stride = static_cast<std::size_t>(n);
  parallel_for(stride, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
      const std::size_t im = (i == 0 ? stride - 1 : i - 1) * stride;
      const std::size_t ip = (i == stride - 1 ? 0 : i + 1) * stride;
      const std::size_t ic = i * stride;
      for (std::size_t j = 0; j < stride; ++j) {
        const std::size_t jm = j == 0 ? stride - 1 : j - 1;
        const std::size_t jp = j == stride - 1 ? 0 : j + 1;
        const double c = v[ic + j];
        const double fx = (v[ip + j] - v[im + j]) * inv2h;
        const double fy = (v[ic + jp] - v[ic + jm]) * inv2h;
        const double fxx = (v[ip + j] - 2.0 * c + v[im + j]) * invh2;
        const double fyy = (v[ic + jp] - 2.0 * c + v[ic + jm]) * invh2;
        const double fxy =
            (v[ip + jp] - v[ip + jm] - v[im + jp] + v[im + jm]) * inv4h2;
        const double q = fx * fx + fy * fy;
        const double curvature =
            ((1.0 + fy * fy) * fxx + (1.0 + fx * fx) * fyy - 2.0 * fx * fy * fxy) / (1.0 + q);
        fn(ic + j, LocalGeometry{fx, fy, q, curvature});
      }
    }
  });
}

}  // namespace detail
}  // namespace mcfob
