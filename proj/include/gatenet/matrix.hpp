#pragma once

#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace gatenet {

/// Dense row-major float64 matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_((size_t)rows * (size_t)cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative shape");
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& at(int r, int c) { return data_[(size_t)r * cols_ + c]; }
  double at(int r, int c) const { return data_[(size_t)r * cols_ + c]; }
  double* row(int r) { return data_.data() + (size_t)r * cols_; }
  const double* row(int r) const { return data_.data() + (size_t)r * cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;
  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace gatenet
