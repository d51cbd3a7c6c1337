#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ssx/errors.hpp"

namespace ssx {

using Index = std::int64_t;
using IndexList = std::vector<Index>;

// Dense row-major matrix. The element type (float or double) is chosen at
// construction; there are no strides or views.
template <class T>
class Matrix {
  static_assert(std::is_floating_point_v<T>, "Matrix is float or double");

 public:
  Matrix() = default;

  Matrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
    check_shape(rows, cols);
    data_.assign(static_cast<std::size_t>(rows * cols), T{0});
  }

  Matrix(Index rows, Index cols, std::vector<T> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    check_shape(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows * cols)) {
      throw ShapeError("Matrix: " + std::to_string(data_.size()) +
                       " values for shape " + shape_string());
    }
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = r == 0 ? 0 : static_cast<Index>(rows.begin()->size());
    std::vector<T> data;
    data.reserve(static_cast<std::size_t>(r * c));
    for (const auto& row : rows) {
      if (static_cast<Index>(row.size()) != c) {
        throw ShapeError("Matrix::from_rows: ragged rows");
      }
      data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(Index r, Index c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const T& operator()(Index r, Index c) const {
    return data_[static_cast<std::size_t>(r * cols_ + c)];
  }

  std::span<T> row(Index r) {
    return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(Index r) const {
    return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  static void check_shape(Index rows, Index cols) {
    if (rows < 0 || cols < 0) {
      throw ShapeError("Matrix: negative shape " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

}  // namespace ssx
