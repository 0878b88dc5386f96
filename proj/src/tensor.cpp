#include "lpdgcn/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace lpdgcn {

namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<const RowMajor<T>> view(const Matrix<T>& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

template <typename T>
Eigen::Map<RowMajor<T>> view(Matrix<T>& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

template <typename T>
void check_inner(const Matrix<T>& a, bool ta, const Matrix<T>& b, bool tb, std::size_t& m,
                 std::size_t& n) {
  const std::size_t ka = ta ? a.rows() : a.cols();
  const std::size_t kb = tb ? b.cols() : b.rows();
  if (ka != kb)
    throw std::invalid_argument("gemm: inner dimensions differ " + a.shape_string() +
                                (ta ? "^T" : "") + " * " + b.shape_string() + (tb ? "^T" : ""));
  m = ta ? a.cols() : a.rows();
  n = tb ? b.rows() : b.cols();
}

template <typename T>
void run_gemm(Matrix<T>& c, const Matrix<T>& a, bool ta, const Matrix<T>& b, bool tb) {
  auto out = view(c);
  const auto av = view(a);
  const auto bv = view(b);
  if (a.size() == 0 || b.size() == 0) return;
  if (!ta && !tb)
    out.noalias() += av * bv;
  else if (ta && !tb)
    out.noalias() += av.transpose() * bv;
  else if (!ta && tb)
    out.noalias() += av * bv.transpose();
  else
    out.noalias() += av.transpose() * bv.transpose();
}

}  // namespace

template <typename T>
Matrix<T> gemm(const Matrix<T>& a, bool trans_a, const Matrix<T>& b, bool trans_b) {
  std::size_t m = 0, n = 0;
  check_inner(a, trans_a, b, trans_b, m, n);
  Matrix<T> c(m, n);
  run_gemm(c, a, trans_a, b, trans_b);
  return c;
}

template <typename T>
void gemm_accumulate(Matrix<T>& c, const Matrix<T>& a, bool trans_a, const Matrix<T>& b,
                     bool trans_b) {
  std::size_t m = 0, n = 0;
  check_inner(a, trans_a, b, trans_b, m, n);
  if (c.rows() != m || c.cols() != n)
    throw std::invalid_argument("gemm_accumulate: output shape " + c.shape_string() +
                                " does not match product");
  run_gemm(c, a, trans_a, b, trans_b);
}

template <typename T>
T max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("max_abs_diff: shapes " + a.shape_string() + " vs " +
                                b.shape_string());
  T worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

template Matrix<float> gemm(const Matrix<float>&, bool, const Matrix<float>&, bool);
template Matrix<double> gemm(const Matrix<double>&, bool, const Matrix<double>&, bool);
template void gemm_accumulate(Matrix<float>&, const Matrix<float>&, bool, const Matrix<float>&,
                              bool);
template void gemm_accumulate(Matrix<double>&, const Matrix<double>&, bool,
                              const Matrix<double>&, bool);
template Matrix<long double> gemm(const Matrix<long double>&, bool, const Matrix<long double>&, bool);
template void gemm_accumulate(Matrix<long double>&, const Matrix<long double>&, bool, const Matrix<long double>&,
                              bool);
template float max_abs_diff(const Matrix<float>&, const Matrix<float>&);
template double max_abs_diff(const Matrix<double>&, const Matrix<double>&);
template long double max_abs_diff(const Matrix<long double>&, const Matrix<long double>&);

}  // namespace lpdgcn
