#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace phishguard {

/// Binary labels, 1 = phishing.
using Labels = std::vector<int>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  Matrix select_columns(std::span<const std::size_t> columns) const;
  Matrix select_rows(std::span<const std::size_t> rows) const;

  /// Appends a row; the first append on an empty 0x0 matrix fixes the width.
  void append_row(std::span<const double> values);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws InvalidArgument unless X has `expected` columns.
void require_columns(const Matrix& X, std::size_t expected, const char* context);

/// Throws InvalidArgument unless labels are binary and as many as rows.
void require_binary_labels(const Matrix& X, const Labels& y, const char* context);

}  // namespace phishguard
