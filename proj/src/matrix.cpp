// matrix.cpp
#include "penmf/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace penmf {

namespace {

std::string shape_of(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, std::string_view op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch (" + a.shape_str() + " vs " +
                     b.shape_str() + ")");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(Index rows, Index cols) {
  if (rows < 0 || cols < 0) {
    throw ParameterError("DenseMatrix: negative dimension " + shape_of(rows, cols));
  }
  m_ = RowMajorMatrix::Zero(rows, cols);
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  DenseMatrix out(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != c) {
      throw ShapeError("from_rows: ragged row " + std::to_string(i) + " (expected " +
                       std::to_string(c) + " entries, got " + std::to_string(row.size()) + ")");
    }
    Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  require_finite(out, "from_rows");
  return out;
}

DenseMatrix DenseMatrix::from_values(Index rows, Index cols, std::vector<double> values) {
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw ShapeError("from_values: " + std::to_string(values.size()) +
                     " values for shape " + shape_of(rows, cols));
  }
  DenseMatrix out(rows, cols);
  std::copy(values.begin(), values.end(), out.eigen().data());
  require_finite(out, "from_values");
  return out;
}

std::string DenseMatrix::shape_str() const { return shape_of(rows(), cols()); }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ (" + a.shape_str() + " vs " +
                     b.shape_str() + ")");
  }
  return DenseMatrix(RowMajorMatrix(a.eigen() * b.eigen()));
}

DenseMatrix transpose(const DenseMatrix& a) {
  return DenseMatrix(RowMajorMatrix(a.eigen().transpose()));
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "hadamard");
  return DenseMatrix(RowMajorMatrix(a.eigen().cwiseProduct(b.eigen())));
}

DenseMatrix safe_divide(const DenseMatrix& num, const DenseMatrix& den, double eps) {
  std::uint64_t ignored = 0;
  return safe_divide(num, den, eps, ignored);
}

DenseMatrix safe_divide(const DenseMatrix& num, const DenseMatrix& den, double eps,
                        std::uint64_t& clamp_count) {
  check_same_shape(num, den, "safe_divide");
  if (!(eps > 0.0)) throw ParameterError("safe_divide: eps must be positive");
  DenseMatrix out(num.rows(), num.cols());
  const double* n = num.eigen().data();
  const double* d = den.eigen().data();
  double* o = out.eigen().data();
  const Index total = num.size();
  for (Index i = 0; i < total; ++i) {
    double dv = d[i];
    if (dv < eps) {
      dv = eps;
      ++clamp_count;
    }
    o[i] = n[i] / dv;
  }
  return out;
}

double frobenius_norm_sq(const DenseMatrix& a) { return a.eigen().squaredNorm(); }

bool is_finite(const DenseMatrix& a) { return a.eigen().allFinite(); }

bool is_nonnegative(const DenseMatrix& a) {
  return a.size() == 0 || a.eigen().minCoeff() >= 0.0;
}

void require_finite(const DenseMatrix& a, std::string_view what) {
  if (!is_finite(a)) {
    throw InputDomainError(std::string(what) + ": matrix contains NaN or infinity");
  }
}

void require_nonnegative(const DenseMatrix& a, std::string_view what) {
  require_finite(a, what);
  if (!is_nonnegative(a)) {
    throw InputDomainError(std::string(what) + ": matrix contains negative entries");
  }
}

}  // namespace penmf
