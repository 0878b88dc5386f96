#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace lpdgcn {

/// Dense row-major real matrix. A scalar is a 1x1 matrix; a vector of width d
/// is stored as a 1xd row.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                  " does not match shape " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows);
  static Matrix scalar(T v) { return Matrix(1, 1, v); }
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  T item() const {
    if (!is_scalar()) throw std::logic_error("Matrix::item on non-scalar " + shape_string());
    return data_[0];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  std::string shape_string() const {
    return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> Matrix<T>::from_rows(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    for (T v : row) m.data_[i++] = v;
  }
  return m;
}

template <typename T>
Matrix<T> Matrix<T>::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
  return m;
}

template <typename To, typename From>
Matrix<To> cast(const Matrix<From>& m) {
  if constexpr (std::is_same_v<To, From>) {
    return m;
  } else {
    std::vector<To> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = static_cast<To>(m[i]);
    return Matrix<To>(m.rows(), m.cols(), std::move(out));
  }
}

/// C = op(A) * op(B), where op transposes when the flag is set.
template <typename T>
Matrix<T> gemm(const Matrix<T>& a, bool trans_a, const Matrix<T>& b, bool trans_b);

/// C += op(A) * op(B).
template <typename T>
void gemm_accumulate(Matrix<T>& c, const Matrix<T>& a, bool trans_a, const Matrix<T>& b,
                     bool trans_b);

/// Largest absolute elementwise difference; throws on shape mismatch.
template <typename T>
T max_abs_diff(const Matrix<T>& a, const Matrix<T>& b);

}  // namespace lpdgcn
