#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ssx/matrix.hpp"

// Minimal dense kernels shared by the sampled and full softmax losses.
// Every kernel accumulates in a fixed order, so identical inputs give
// bitwise-identical outputs on repeat runs.

namespace ssx {

namespace detail {

// Row-block size for the cache-blocked matmul paths. Blocks of the streamed
// operand (block x cols elements) stay L2-resident while the other operand
// is swept.
inline constexpr Index kRowBlock = 128;

// Dot product with eight independent accumulator chains, combined pairwise.
// The unroll is reassociation done in source: the order is fixed, results
// stay deterministic, and the independent chains let the compiler keep
// several FP additions in flight without -ffast-math.
template <class T>
inline T dot(const T* a, const T* b, Index n) {
  T acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
  T acc4 = 0, acc5 = 0, acc6 = 0, acc7 = 0;
  Index k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 += a[k + 0] * b[k + 0];
    acc1 += a[k + 1] * b[k + 1];
    acc2 += a[k + 2] * b[k + 2];
    acc3 += a[k + 3] * b[k + 3];
    acc4 += a[k + 4] * b[k + 4];
    acc5 += a[k + 5] * b[k + 5];
    acc6 += a[k + 6] * b[k + 6];
    acc7 += a[k + 7] * b[k + 7];
  }
  T acc = ((acc0 + acc1) + (acc2 + acc3)) + ((acc4 + acc5) + (acc6 + acc7));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

// y += alpha * x over n elements. No reduction, so this auto-vectorizes.
template <class T>
inline void axpy(T alpha, const T* x, T* y, Index n) {
  for (Index j = 0; j < n; ++j) y[j] += alpha * x[j];
}

}  // namespace detail

// a[BxK] * b[KxM] (or b[MxK] with transpose_b) -> [BxM].
template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b, bool transpose_b = false) {
  const Index inner = transpose_b ? b.cols() : b.rows();
  if (a.cols() != inner) {
    throw ShapeError("matmul: inner dimensions disagree: a is " + a.shape_string() +
                     ", b is " + b.shape_string() +
                     (transpose_b ? " (transpose_b)" : ""));
  }
  const Index out_cols = transpose_b ? b.rows() : b.cols();
  Matrix<T> out(a.rows(), out_cols);
  if (transpose_b) {
    // out(i,j) = <a row i, b row j>; both rows contiguous.
    for (Index j0 = 0; j0 < out_cols; j0 += detail::kRowBlock) {
      const Index j1 = std::min(j0 + detail::kRowBlock, out_cols);
      for (Index i = 0; i < a.rows(); ++i) {
        const T* ai = a.row(i).data();
        T* oi = out.row(i).data();
        for (Index j = j0; j < j1; ++j) {
          oi[j] = detail::dot(ai, b.row(j).data(), a.cols());
        }
      }
    }
  } else {
    // out row i accumulates a(i,k) * b row k, k ascending.
    for (Index k0 = 0; k0 < inner; k0 += detail::kRowBlock) {
      const Index k1 = std::min(k0 + detail::kRowBlock, inner);
      for (Index i = 0; i < a.rows(); ++i) {
        T* oi = out.row(i).data();
        for (Index k = k0; k < k1; ++k) {
          detail::axpy(a(i, k), b.row(k).data(), oi, out_cols);
        }
      }
    }
  }
  return out;
}

// a[BxM]^T * b[BxD] -> [MxD]; the transposed product both backward passes
// need for the scattered target-table gradient rows.
template <class T>
Matrix<T> matmul_ta(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_ta: row counts disagree: a is " + a.shape_string() +
                     ", b is " + b.shape_string());
  }
  Matrix<T> out(a.cols(), b.cols());
  for (Index j0 = 0; j0 < out.rows(); j0 += detail::kRowBlock) {
    const Index j1 = std::min(j0 + detail::kRowBlock, out.rows());
    for (Index i = 0; i < a.rows(); ++i) {
      const T* bi = b.row(i).data();
      for (Index j = j0; j < j1; ++j) {
        detail::axpy(a(i, j), bi, out.row(j).data(), out.cols());
      }
    }
  }
  return out;
}

// Output row j is a copy of table row ids[j]; duplicate ids give duplicate rows.
template <class T>
Matrix<T> row_gather(const Matrix<T>& table, const IndexList& ids) {
  Matrix<T> out(static_cast<Index>(ids.size()), table.cols());
  for (Index j = 0; j < out.rows(); ++j) {
    const Index id = ids[static_cast<std::size_t>(j)];
    if (id < 0 || id >= table.rows()) {
      throw IndexError("row_gather", id, table.rows());
    }
    auto src = table.row(id);
    auto dst = out.row(j);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

// Max-shifted log-sum-exp per row: finite for finite inputs of any magnitude.
template <class T>
std::vector<T> row_logsumexp(const Matrix<T>& m) {
  if (m.cols() < 1) {
    throw ShapeError("row_logsumexp: need at least one column, got " + m.shape_string());
  }
  std::vector<T> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    const T* mi = m.row(i).data();
    T mx = mi[0];
    for (Index j = 1; j < m.cols(); ++j) mx = mi[j] > mx ? mi[j] : mx;
    T sum = 0;
    for (Index j = 0; j < m.cols(); ++j) sum += std::exp(mi[j] - mx);
    out[static_cast<std::size_t>(i)] = mx + std::log(sum);
  }
  return out;
}

// out[i] = <a row i, b row i>.
template <class T>
std::vector<T> row_dot(const Matrix<T>& a, const Matrix<T>& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("row_dot: shapes disagree: a is " + a.shape_string() +
                     ", b is " + b.shape_string());
  }
  std::vector<T> out(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = detail::dot(a.row(i).data(), b.row(i).data(), a.cols());
  }
  return out;
}

}  // namespace ssx
