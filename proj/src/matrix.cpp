#include "coauthornet/matrix.hpp"

#include <cmath>
#include <string>

#include "coauthornet/errors.hpp"

namespace coauthornet {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix storage of " + std::to_string(data_.size()) +
                         " values does not match shape " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < w.rows(); ++r) y[r] = dot(w.row(r), x);
}

void matvec_transposed_add(const Matrix& w, std::span<const double> g,
                           std::span<double> y) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (g[r] != 0.0) axpy(g[r], w.row(r), y);
  }
}

void outer_add(Matrix& w, double alpha, std::span<const double> g,
               std::span<const double> x) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double s = alpha * g[r];
    if (s != 0.0) axpy(s, x, w.row(r));
  }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace coauthornet
