// toeplitz.cpp
#include "penmf/toeplitz.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace penmf {

std::string toeplitz_kind_name(ToeplitzKind kind) {
  return kind == ToeplitzKind::Geometric ? "geometric" : "damped-alternating";
}

ToeplitzKind parse_toeplitz_kind(const std::string& name) {
  if (name == "geometric") return ToeplitzKind::Geometric;
  if (name == "damped-alternating") return ToeplitzKind::DampedAlternating;
  throw ParameterError("unknown Toeplitz kind '" + name +
                       "' (expected geometric or damped-alternating)");
}

ToeplitzSpec ToeplitzSpec::geometric(double rho, Index dim) {
  ToeplitzSpec spec{ToeplitzKind::Geometric, rho, 1.0, dim};
  spec.validate();
  return spec;
}

ToeplitzSpec ToeplitzSpec::damped_alternating(double rho, double nu, Index dim) {
  ToeplitzSpec spec{ToeplitzKind::DampedAlternating, rho, nu, dim};
  spec.validate();
  return spec;
}

void ToeplitzSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ParameterError("ToeplitzSpec: rho must lie in [0, 1], got " + std::to_string(rho));
  }
  if (kind == ToeplitzKind::DampedAlternating && !(nu > 0.0)) {
    throw ParameterError("ToeplitzSpec: nu must be positive, got " + std::to_string(nu));
  }
  if (dim < 1) {
    throw ParameterError("ToeplitzSpec: dim must be at least 1, got " + std::to_string(dim));
  }
}

double ToeplitzSpec::entry(Index i, Index j) const {
  if (i < 0 || i >= dim || j < 0 || j >= dim) {
    throw std::out_of_range("ToeplitzSpec::entry: index (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside dimension " + std::to_string(dim));
  }
  if (i == j) return 1.0;
  const double d = static_cast<double>(std::abs(i - j));
  if (kind == ToeplitzKind::Geometric) {
    return std::pow(rho, d);
  }
  const double sign = (std::abs(i - j) % 2 == 1) ? 1.0 : -1.0;  // (-1)^(d+1)
  return sign * std::pow(rho / d, nu * d);
}

std::vector<double> ToeplitzSpec::first_row() const {
  validate();
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (Index j = 0; j < dim; ++j) row[static_cast<std::size_t>(j)] = entry(0, j);
  return row;
}

DenseMatrix build_dense(const ToeplitzSpec& spec) {
  const std::vector<double> seq = spec.first_row();
  DenseMatrix out(spec.dim, spec.dim);
  for (Index i = 0; i < spec.dim; ++i) {
    for (Index j = 0; j < spec.dim; ++j) {
      out(i, j) = seq[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return out;
}

namespace {

// y_i = sum_j rho^|i-j| x_j, split into a forward pass f_i = rho f_{i-1} + x_i
// and a backward pass g_i = rho (g_{i+1} + x_{i+1}); y = f + g. One row vector
// of state per pass, vectorized across columns.
DenseMatrix geometric_matmul(const ToeplitzSpec& spec, const DenseMatrix& m) {
  const Index n = spec.dim;
  const Index k = m.cols();
  DenseMatrix out(n, k);
  Eigen::RowVectorXd state(k);

  state = m.eigen().row(0);
  out.eigen().row(0) = state;
  for (Index i = 1; i < n; ++i) {
    state = spec.rho * state + m.eigen().row(i);
    out.eigen().row(i) = state;
  }

  state.setZero();
  for (Index i = n - 2; i >= 0; --i) {
    state = spec.rho * (state + m.eigen().row(i + 1));
    out.eigen().row(i) += state;
  }
  return out;
}

DenseMatrix generic_matmul(const ToeplitzSpec& spec, const DenseMatrix& m) {
  const std::vector<double> seq = spec.first_row();
  const Index n = spec.dim;
  DenseMatrix out(n, m.cols());
  for (Index i = 0; i < n; ++i) {
    auto row = out.eigen().row(i);
    for (Index j = 0; j < n; ++j) {
      row += seq[static_cast<std::size_t>(std::abs(i - j))] * m.eigen().row(j);
    }
  }
  return out;
}

}  // namespace

DenseMatrix toeplitz_matmul(const ToeplitzSpec& spec, const DenseMatrix& m) {
  spec.validate();
  if (m.rows() != spec.dim) {
    throw ShapeError("toeplitz_matmul: operand has " + std::to_string(m.rows()) +
                     " rows, structure has dimension " + std::to_string(spec.dim));
  }
  if (m.cols() == 0) return DenseMatrix(spec.dim, 0);
  if (spec.kind == ToeplitzKind::Geometric) return geometric_matmul(spec, m);
  return generic_matmul(spec, m);
}

}  // namespace penmf
