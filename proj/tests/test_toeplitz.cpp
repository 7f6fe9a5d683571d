// test_toeplitz.cpp
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "penmf/toeplitz.hpp"
#include "test_support.hpp"

using namespace penmf;
using test::max_abs_diff;
using test::random_matrix;

namespace {

// Closed forms evaluated independently of ToeplitzSpec::entry.
double geometric_oracle(double rho, long d) { return d == 0 ? 1.0 : std::pow(rho, d); }
double damped_oracle(double rho, double nu, long d) {
  if (d == 0) return 1.0;
  return std::pow(-1.0, static_cast<double>(d + 1)) *
         std::pow(rho / static_cast<double>(d), nu * static_cast<double>(d));
}

}  // namespace

TEST_CASE("entry closed forms") {
  const auto geo = ToeplitzSpec::geometric(0.5, 8);
  CHECK(geo.entry(0, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(geo.entry(3, 3) == 1.0);

  const auto damp = ToeplitzSpec::damped_alternating(0.5, 1.0, 8);
  CHECK(damp.entry(3, 3) == 1.0);
  CHECK(damp.entry(0, 1) == doctest::Approx(damped_oracle(0.5, 1.0, 1)).epsilon(1e-15));
  CHECK(damp.entry(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(damp.entry(0, 2) == doctest::Approx(-0.0625).epsilon(1e-15));
  for (long d = 1; d < 8; ++d) {
    CHECK(damp.entry(0, d) == doctest::Approx(damped_oracle(0.5, 1.0, d)).epsilon(1e-14));
    CHECK(geo.entry(0, d) == doctest::Approx(geometric_oracle(0.5, d)).epsilon(1e-14));
  }
}

TEST_CASE("entry is bounds-checked") {
  const auto spec = ToeplitzSpec::geometric(0.5, 4);
  CHECK_THROWS_AS(spec.entry(0, 4), std::out_of_range);
  CHECK_THROWS_AS(spec.entry(-1, 0), std::out_of_range);
}

TEST_CASE("spec parameter validation") {
  CHECK_THROWS_AS(ToeplitzSpec::geometric(-0.1, 4), ParameterError);
  CHECK_THROWS_AS(ToeplitzSpec::geometric(1.5, 4), ParameterError);
  CHECK_THROWS_AS(ToeplitzSpec::geometric(0.5, 0), ParameterError);
  CHECK_THROWS_AS(ToeplitzSpec::damped_alternating(0.5, 0.0, 4), ParameterError);
}

TEST_CASE("build_dense matches the displayed 3x3 pattern") {
  const auto m = build_dense(ToeplitzSpec::geometric(0.5, 3));
  const auto expected = DenseMatrix::from_rows({{1, 0.5, 0.25}, {0.5, 1, 0.5}, {0.25, 0.5, 1}});
  CHECK(max_abs_diff(m, expected) == 0.0);
}

TEST_CASE("build_dense degenerate rho values") {
  const auto eye = build_dense(ToeplitzSpec::geometric(0.0, 5));
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) CHECK(eye(i, j) == (i == j ? 1.0 : 0.0));
  }
  const auto ones = build_dense(ToeplitzSpec::geometric(1.0, 5));
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) CHECK(ones(i, j) == 1.0);
  }
}

TEST_CASE("build_dense symmetry, unit diagonal, diagonal constancy") {
  const ToeplitzSpec specs[] = {
      ToeplitzSpec::geometric(0.37, 64),
      ToeplitzSpec::geometric(1.0, 17),
      ToeplitzSpec::damped_alternating(0.8, 1.5, 64),
      ToeplitzSpec::damped_alternating(1.0, 1.0, 33),
  };
  for (const auto& spec : specs) {
    const auto m = build_dense(spec);
    for (Index i = 0; i < spec.dim; ++i) {
      CHECK(m(i, i) == 1.0);
      for (Index j = 0; j < spec.dim; ++j) {
        CHECK(m(i, j) == m(j, i));
        CHECK(m(i, j) == spec.entry(0, std::abs(i - j)));  // depends on |i-j| only
      }
    }
  }
}

TEST_CASE("geometric kind is positive semidefinite") {
  for (double rho : {0.0, 0.25, 0.5, 0.75, 0.99}) {
    for (Index n : {2, 16, 64}) {
      const auto m = build_dense(ToeplitzSpec::geometric(rho, n));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m.eigen()));
      CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("damped-alternating magnitudes shrink with distance") {
  for (double rho : {0.3, 0.7, 1.0}) {
    for (double nu : {1.0, 2.0}) {
      const auto spec = ToeplitzSpec::damped_alternating(rho, nu, 32);
      for (Index d = 1; d + 1 <= spec.dim - 1; ++d) {
        CHECK(std::abs(spec.entry(0, d + 1)) <= std::abs(spec.entry(0, d)));
      }
    }
  }
}

TEST_CASE("toeplitz_matmul identity and first-column cases") {
  const auto m = random_matrix(6, 3, 31, -1.0, 2.0);
  const auto applied = toeplitz_matmul(ToeplitzSpec::geometric(0.0, 6), m);
  CHECK(max_abs_diff(applied, m) == 0.0);

  const auto e0 = DenseMatrix::from_rows({{1}, {0}, {0}});
  const auto col = toeplitz_matmul(ToeplitzSpec::geometric(0.5, 3), e0);
  CHECK(col(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(col(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(col(2, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("toeplitz_matmul equals the dense product") {
  const auto m = random_matrix(50, 7, 55, 0.0, 1.0);
  const ToeplitzSpec specs[] = {
      ToeplitzSpec::geometric(0.3, 50),
      ToeplitzSpec::geometric(0.99, 50),
      ToeplitzSpec::geometric(1.0, 50),
      ToeplitzSpec::damped_alternating(0.6, 1.0, 50),
  };
  for (const auto& spec : specs) {
    const auto fast = toeplitz_matmul(spec, m);
    const auto dense = matmul(build_dense(spec), m);
    CHECK(max_abs_diff(fast, dense) < 1e-10);
  }
}

TEST_CASE("toeplitz_matmul rejects mismatched dimension") {
  CHECK_THROWS_AS(toeplitz_matmul(ToeplitzSpec::geometric(0.5, 4), random_matrix(5, 2, 1)),
                  ShapeError);
}
