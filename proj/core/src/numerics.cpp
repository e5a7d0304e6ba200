#include "popsteady/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "popsteady/error.hpp"

namespace popsteady {

Grid::Grid(double lower, double upper, int n_cells) : lower_(lower), upper_(upper), n_cells_(n_cells) {
  if (!(std::isfinite(lower) && std::isfinite(upper) && lower < upper))
    throw Error(ErrorKind::InvalidArgument, "grid requires finite lower < upper");
  if (n_cells < 2) throw Error(ErrorKind::InvalidArgument, "grid requires at least 2 cells");
}

std::optional<int> Grid::node_index(double x) const noexcept {
  const double pos = (x - lower_) / step();
  const double k = std::round(pos);
  if (k < 0 || k > n_cells_ || std::abs(pos - k) > 1e-9) return std::nullopt;
  return static_cast<int>(k);
}

GridFn::GridFn(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFn::GridFn(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size())
    throw Error(ErrorKind::InvalidArgument, "grid function length does not match node count");
}

double trapezoid_uniform(double h, std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double interior = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) interior += v[k];
  return h * (0.5 * (v.front() + v.back()) + interior);
}

double integrate_uniform(double h, std::span<const double> v) {
  const std::size_t n_cells = v.size() < 2 ? 0 : v.size() - 1;
  if (n_cells == 0) return 0.0;
  if (n_cells % 2 != 0) return trapezoid_uniform(h, v);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t k = 1; k < n_cells; ++k) (k % 2 ? odd : even) += v[k];
  return h / 3.0 * (v.front() + v.back() + 4.0 * odd + 2.0 * even);
}

double integrate(const GridFn& f) { return integrate_uniform(f.grid().step(), f.values()); }

double integrate_range(const GridFn& f, int first, int last) {
  if (first < 0 || last >= f.size() || first > last)
    throw Error(ErrorKind::InvalidArgument, "integration range outside the grid");
  return integrate_uniform(f.grid().step(), f.values().subspan(first, last - first + 1));
}

GridFn cumulative_integral(const GridFn& f) {
  GridFn g(f.grid());
  const double h = f.grid().step();
  for (int k = 1; k < f.size(); ++k) g[k] = g[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
  return g;
}

double bisect_root(const ScalarFn& f, double lo, double hi, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, "bisection tolerance must be positive");
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    std::ostringstream os;
    os << "f(" << lo << ")=" << flo << " and f(" << hi << ")=" << fhi << " have the same sign";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  const bool lo_positive = flo > 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == lo_positive)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

DenseMatrix::DenseMatrix(int order) : order_(order), data_(static_cast<std::size_t>(order) * order, 0.0) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "matrix order must be positive");
}

DenseMatrix::DenseMatrix(int order, std::vector<double> entries) : order_(order), data_(std::move(entries)) {
  if (order < 1 || data_.size() != static_cast<std::size_t>(order) * order)
    throw Error(ErrorKind::InvalidArgument, "matrix entries do not form a square array");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : DenseMatrix(static_cast<int>(rows.size())) {
  int i = 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != order_)
      throw Error(ErrorKind::InvalidArgument, "matrix rows must all have the matrix order");
    int j = 0;
    for (double v : r) (*this)(i, j++) = v;
    ++i;
  }
}

DenseMatrix DenseMatrix::identity(int order) {
  DenseMatrix m(order);
  for (int i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  for (int i = 0; i < order_; ++i) {
    const double* r = data_.data() + static_cast<std::size_t>(i) * order_;
    double acc = 0.0;
    for (int j = 0; j < order_; ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
}

std::vector<double> DenseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> out(order_);
  multiply(x, out);
  return out;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& other) const {
  if (other.order_ != order_) throw Error(ErrorKind::InvalidArgument, "matrix order mismatch");
  DenseMatrix out(order_);
  for (int i = 0; i < order_; ++i)
    for (int k = 0; k < order_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < order_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

double DenseMatrix::norm_inf() const noexcept {
  double best = 0.0;
  for (int i = 0; i < order_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

bool DenseMatrix::is_metzler() const noexcept {
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j < order_; ++j)
      if (i != j && (*this)(i, j) < 0.0) return false;
  return true;
}

namespace {

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

EigenPair perron_rightmost(const DenseMatrix& m, double tol, int max_iter) {
  const int n = m.order();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && m(i, j) < 0.0) {
        std::ostringstream os;
        os << "negative off-diagonal entry " << m(i, j) << " at (" << i << "," << j << ")";
        throw Error(ErrorKind::NotMetzler, os.str());
      }

  double shift = 0.0;
  for (int i = 0; i < n; ++i) shift = std::max(shift, std::abs(m(i, i)));
  shift += 1.0;

  std::vector<double> x(n, 1.0 / n);
  std::vector<double> y(n);
  std::vector<double> mx(n);
  EigenPair out;
  for (int it = 1; it <= max_iter; ++it) {
    m.multiply(x, mx);
    for (int i = 0; i < n; ++i) y[i] = mx[i] + shift * x[i];
    const double norm = l1(y);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorKind::NoConvergence, "shifted iterate vanished or overflowed");
    // x has unit L1 norm and y >= 0, so the Rayleigh-type estimate is norm - shift.
    const double lambda = norm - shift;
    double res = 0.0;
    for (int i = 0; i < n; ++i) res += std::abs(mx[i] - lambda * x[i]);
    for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
    out.value = lambda;
    out.residual = res;
    out.iterations = it;
    if (res <= tol * (1.0 + std::abs(lambda))) {
      // Recompute the residual for the normalized vector actually returned.
      m.multiply(x, mx);
      double r2 = 0.0;
      double lam2 = 0.0;
      for (int i = 0; i < n; ++i) lam2 += mx[i];
      for (int i = 0; i < n; ++i) r2 += std::abs(mx[i] - lam2 * x[i]);
      out.value = lam2;
      out.residual = r2;
      out.vector = x;
      const double biggest = *std::max_element(x.begin(), x.end());
      out.possibly_reducible =
          std::any_of(x.begin(), x.end(), [&](double v) { return v <= 1e-12 * biggest; });
      return out;
    }
  }
  std::ostringstream os;
  os << "power iteration stopped after " << max_iter << " iterations; last eigenvalue estimate "
     << out.value << ", residual " << out.residual;
  throw Error(ErrorKind::NoConvergence, os.str());
}

int numerical_rank(DenseMatrix m, double threshold) {
  const int n = m.order();
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    int pi = k, pj = k;
    double best = -1.0;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j)
        if (std::abs(m(i, j)) > best) {
          best = std::abs(m(i, j));
          pi = i;
          pj = j;
        }
    if (best <= threshold) break;
    ++rank;
    if (pi != k)
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(pi, j));
    if (pj != k)
      for (int i = 0; i < n; ++i) std::swap(m(i, k), m(i, pj));
    const double pivot = m(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double f = m(i, k) / pivot;
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return rank;
}

}  // namespace popsteady
