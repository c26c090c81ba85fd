#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coauthornet {

using Vector = std::vector<double>;

// Row-major dense matrix of 64-bit floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Tensor2D = Matrix;
using FeatureMatrix = Matrix;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y = W x (y resized)
void matvec(const Matrix& w, std::span<const double> x, std::span<double> y);
// y += W^T g
void matvec_transposed_add(const Matrix& w, std::span<const double> g,
                           std::span<double> y);
// W += alpha * g x^T
void outer_add(Matrix& w, double alpha, std::span<const double> g,
               std::span<const double> x);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace coauthornet
