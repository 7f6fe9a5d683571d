// test_support.hpp
// Shared helpers and the independent oracles the unit suites check against.
#pragma once

#include <random>

#include "penmf/matrix.hpp"

namespace penmf::test {

inline DenseMatrix random_matrix(Index rows, Index cols, unsigned seed, double lo = 0.0,
                                 double hi = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = dist(gen);
  }
  return m;
}

// Entry-by-entry triple loop; deliberately independent of the library's
// product path.
inline DenseMatrix matmul_oracle(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (Index t = 0; t < a.cols(); ++t) sum += a(i, t) * b(t, j);
      out(i, j) = sum;
    }
  }
  return out;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: " + a.shape_str() + " vs " + b.shape_str());
  }
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

inline double min_entry(const DenseMatrix& a) {
  double lo = a(0, 0);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) lo = std::min(lo, a(i, j));
  }
  return lo;
}

}  // namespace penmf::test
