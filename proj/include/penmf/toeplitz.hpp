// toeplitz.hpp
// Symmetric unit-diagonal Toeplitz structures with decaying off-diagonal
// correlation, and a matvec that never materializes the dense matrix.
#pragma once

#include <string>
#include <vector>

#include "penmf/matrix.hpp"

namespace penmf {

enum class ToeplitzKind {
  // s_d = rho^d: the AR(1) correlation pattern.
  Geometric,
  // s_d = (-1)^(d+1) * (rho/d)^(nu*d): sign-alternating and banded, with
  // magnitudes shrinking as the band moves away from the diagonal.
  DampedAlternating,
};

std::string toeplitz_kind_name(ToeplitzKind kind);
ToeplitzKind parse_toeplitz_kind(const std::string& name);

// Parametric description of one structure; the operator is represented by
// its generating sequence (first row), O(dim) memory.
struct ToeplitzSpec {
  ToeplitzKind kind = ToeplitzKind::Geometric;
  double rho = 0.0;
  double nu = 1.0;  // used by DampedAlternating only
  Index dim = 1;

  static ToeplitzSpec geometric(double rho, Index dim);
  static ToeplitzSpec damped_alternating(double rho, double nu, Index dim);

  void validate() const;

  // s_{ij}; exactly 1 on the diagonal. Indices are bounds-checked.
  double entry(Index i, Index j) const;

  // The generating sequence s_0 .. s_{dim-1}.
  std::vector<double> first_row() const;
};

// Densify: dim x dim, symmetric, unit diagonal, constant along diagonals.
DenseMatrix build_dense(const ToeplitzSpec& spec);

// Product of the structure with m (m.rows == spec.dim) from the generating
// sequence alone. The geometric kind runs in O(dim) per column via forward
// and backward recurrences; other kinds fall back to the O(dim^2) sum.
DenseMatrix toeplitz_matmul(const ToeplitzSpec& spec, const DenseMatrix& m);

}  // namespace penmf
