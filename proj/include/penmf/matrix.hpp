// matrix.hpp
// Dense row-major matrices and the guarded elementwise kernels that the
// multiplicative updates are built from.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "penmf/errors.hpp"

namespace penmf {

using Index = Eigen::Index;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Value type for all matrix data in the toolkit: the data matrix X, the
// factors W and H, and densified Toeplitz structures. Storage is row-major.
class DenseMatrix {
 public:
  DenseMatrix() : m_(0, 0) {}
  DenseMatrix(Index rows, Index cols);  // zero-filled
  explicit DenseMatrix(RowMajorMatrix m) : m_(std::move(m)) {}

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  // Validates length and finiteness of externally supplied values.
  static DenseMatrix from_values(Index rows, Index cols, std::vector<double> values);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  Index size() const { return m_.size(); }

  double operator()(Index i, Index j) const { return m_(i, j); }
  double& operator()(Index i, Index j) { return m_(i, j); }

  std::span<const double> values() const {
    return {m_.data(), static_cast<std::size_t>(m_.size())};
  }

  const RowMajorMatrix& eigen() const { return m_; }
  RowMajorMatrix& eigen() { return m_; }

  std::string shape_str() const;

 private:
  RowMajorMatrix m_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

// Elementwise num / max(den, eps), finite for finite inputs and eps > 0.
// The counting overload adds the number of denominator entries below eps to
// clamp_count; a nonzero count is the warning statistic surfaced per run.
DenseMatrix safe_divide(const DenseMatrix& num, const DenseMatrix& den, double eps);
DenseMatrix safe_divide(const DenseMatrix& num, const DenseMatrix& den, double eps,
                        std::uint64_t& clamp_count);

// Sum of squared entries.
double frobenius_norm_sq(const DenseMatrix& a);

bool is_finite(const DenseMatrix& a);
bool is_nonnegative(const DenseMatrix& a);

// Boundary checks for the finiteness and nonnegativity contracts. `what`
// names the offending argument in the error message.
void require_finite(const DenseMatrix& a, std::string_view what);
void require_nonnegative(const DenseMatrix& a, std::string_view what);

}  // namespace penmf
