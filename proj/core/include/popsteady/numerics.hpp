#pragma once

// Deterministic numerical primitives: uniform grids, quadrature, bracketed
// root finding and the dominant eigenpair of Metzler matrices.

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace popsteady {

/// Uniform grid on [lower, upper] with n_cells + 1 nodes.
class Grid {
 public:
  Grid(double lower, double upper, int n_cells);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  int n_cells() const noexcept { return n_cells_; }
  int size() const noexcept { return n_cells_ + 1; }
  double step() const noexcept { return (upper_ - lower_) / n_cells_; }
  double node(int k) const noexcept { return k == n_cells_ ? upper_ : lower_ + k * step(); }
  double midpoint(int cell) const noexcept { return lower_ + (cell + 0.5) * step(); }

  /// Index of the node at x, if x lies on a node (relative tolerance 1e-9 of h).
  std::optional<int> node_index(double x) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double lower_;
  double upper_;
  int n_cells_;
};

/// Node values of a function on a grid.
class GridFn {
 public:
  explicit GridFn(Grid grid);
  GridFn(Grid grid, std::vector<double> values);

  template <class F>
  static GridFn sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (int k = 0; k < grid.size(); ++k) v[k] = f(grid.node(k));
    return GridFn(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int k) const noexcept { return values_[k]; }
  double& operator[](int k) noexcept { return values_[k]; }
  int size() const noexcept { return static_cast<int>(values_.size()); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Composite Simpson for an even number of cells, trapezoid otherwise.
/// Accepts any number of samples (0 or 1 samples integrate to 0).
double integrate_uniform(double h, std::span<const double> values);

/// Trapezoid rule on uniformly spaced samples.
double trapezoid_uniform(double h, std::span<const double> values);

double integrate(const GridFn& f);

/// Integral of f over the nodes [first, last] of its grid.
double integrate_range(const GridFn& f, int first, int last);

/// Trapezoid antiderivative: g(lower) = 0, g(node k) = ∫_lower^{node k} f.
GridFn cumulative_integral(const GridFn& f);

/// Antiderivative of a pointwise function using one midpoint sample per
/// cell. Jumps located at grid nodes are integrated exactly.
template <class F>
std::vector<double> cumulative_midpoint(const Grid& grid, F&& f) {
  std::vector<double> g(grid.size(), 0.0);
  const double h = grid.step();
  for (int c = 0; c < grid.n_cells(); ++c) g[c + 1] = g[c] + h * f(grid.midpoint(c));
  return g;
}

using ScalarFn = std::function<double(double)>;

/// Bisection on a sign change. Only the sign of f is consulted.
/// Throws NoBracket when f(lo) and f(hi) have the same strict sign.
double bisect_root(const ScalarFn& f, double lo, double hi, double tol = 1e-12);

/// Dense square matrix in row-major order.
class DenseMatrix {
 public:
  explicit DenseMatrix(int order);
  DenseMatrix(int order, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(int order);

  int order() const noexcept { return order_; }
  double operator()(int i, int j) const noexcept { return data_[i * order_ + j]; }
  double& operator()(int i, int j) noexcept { return data_[i * order_ + j]; }
  std::span<const double> row(int i) const noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * order_, static_cast<std::size_t>(order_)};
  }

  void multiply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> operator*(std::span<const double> x) const;
  DenseMatrix operator*(const DenseMatrix& other) const;

  /// Maximum absolute row sum.
  double norm_inf() const noexcept;
  bool is_metzler() const noexcept;

 private:
  int order_;
  std::vector<double> data_;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // nonnegative, unit L1 norm
  double residual = 0.0;       // ||M v - value v||_1
  int iterations = 0;
  /// Set when some eigenvector entry is (numerically) zero: the matrix is
  /// probably reducible and the pair is one of possibly several rightmost pairs.
  bool possibly_reducible = false;
};

/// Rightmost real eigenvalue of a Metzler matrix by power iteration on
/// M + sigma I, sigma = max|diag| + 1. Throws NotMetzler or NoConvergence.
EigenPair perron_rightmost(const DenseMatrix& m, double tol = 1e-10, int max_iter = 100000);

/// Rank by Gaussian elimination with full pivoting: pivots with magnitude
/// at most `threshold` count as zero.
int numerical_rank(DenseMatrix m, double threshold);

}  // namespace popsteady
