#include "phishguard/matrix.hpp"

#include <string>

#include "phishguard/error.hpp"

namespace phishguard {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InvalidArgument("matrix data size does not match shape");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) {
    append_row(std::span<const double>(r.begin(), r.size()));
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> columns) const {
  Matrix out(rows_, columns.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] >= cols_) throw InvalidArgument("column index out of range");
      out(r, j) = (*this)(r, columns[j]);
    }
  }
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw InvalidArgument("row index out of range");
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw InvalidArgument("appended row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void require_columns(const Matrix& X, std::size_t expected, const char* context) {
  if (X.cols() != expected) {
    throw InvalidArgument(std::string(context) + ": expected " + std::to_string(expected) + " columns, got " +
                          std::to_string(X.cols()));
  }
}

void require_binary_labels(const Matrix& X, const Labels& y, const char* context) {
  if (y.size() != X.rows()) {
    throw InvalidArgument(std::string(context) + ": " + std::to_string(X.rows()) + " rows but " +
                          std::to_string(y.size()) + " labels");
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidArgument(std::string(context) + ": labels must be 0 or 1");
  }
}

}  // namespace phishguard
