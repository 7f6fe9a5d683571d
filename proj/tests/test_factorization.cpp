// test_factorization.cpp
#include <doctest.h>

#include <cmath>

#include "penmf/factorization.hpp"
#include "gradient_oracle.hpp"
#include "test_support.hpp"

using namespace penmf;
using test::max_abs_diff;
using test::min_entry;
using test::random_matrix;

namespace {

using test::fd_grad_h;
using test::fd_grad_w;
using test::relative_grad_error;

std::vector<PenaltyConfig> all_families(Index n, Index p) {
  return {
      PenaltyConfig::none(),
      PenaltyConfig::frobenius(0.4, 0.6),
      PenaltyConfig::zellner(0.3, 0.7, 7.5),
      PenaltyConfig::toeplitz(0.5, 0.5, ToeplitzKind::Geometric, 0.35, 1.0, n, p),
      PenaltyConfig::toeplitz(0.5, 0.5, ToeplitzKind::DampedAlternating, 0.8, 1.0, n, p),
  };
}

}  // namespace

TEST_CASE("initialize is deterministic and strictly positive") {
  const auto a = initialize(7, 5, 3, 42);
  const auto b = initialize(7, 5, 3, 42);
  CHECK(max_abs_diff(a.w, b.w) == 0.0);
  CHECK(max_abs_diff(a.h, b.h) == 0.0);
  CHECK(a.cost_history.empty());
  CHECK(a.rank == 3);

  const auto c = initialize(7, 5, 3, 43);
  CHECK(max_abs_diff(a.w, c.w) > 0.0);

  CHECK(min_entry(a.w) > 0.0);
  CHECK(min_entry(a.h) > 0.0);

  CHECK_THROWS_AS(initialize(7, 5, 0, 1), ParameterError);
  CHECK_THROWS_AS(initialize(7, 5, 6, 1), ParameterError);
}

TEST_CASE("penalty_value frobenius") {
  const auto w = DenseMatrix::from_rows({{3}, {4}});
  const auto h = DenseMatrix::from_rows({{1, 2}});
  const auto x = DenseMatrix::from_rows({{1, 1}, {1, 1}});
  const auto [j1, j2] = penalty_value(PenaltyConfig::frobenius(0.5, 0.5), w, h, x);
  CHECK(j1 == 25.0);
  CHECK(j2 == 5.0);
}

TEST_CASE("penalty_value zellner shrinks monotonically in g") {
  const auto w = random_matrix(6, 3, 1, 0.1, 1.0);
  const auto h = random_matrix(3, 5, 2, 0.1, 1.0);
  const auto x = random_matrix(6, 5, 3, 0.1, 1.0);
  double prev_j1 = 1e300, prev_j2 = 1e300;
  for (double g : {1.0, 10.0, 100.0, 1e4, 1e8}) {
    const auto [j1, j2] = penalty_value(PenaltyConfig::zellner(0.5, 0.5, g), w, h, x);
    CHECK(j1 > 0.0);
    CHECK(j1 < prev_j1);
    CHECK(j2 < prev_j2);
    prev_j1 = j1;
    prev_j2 = j2;
  }
  CHECK(prev_j1 < 1e-6);  // 1/g drives the penalty to zero
}

TEST_CASE("penalty_value toeplitz at rho=0 reduces to frobenius") {
  const auto w = random_matrix(6, 2, 4, 0.0, 2.0);
  const auto h = random_matrix(2, 5, 5, 0.0, 2.0);
  const auto x = random_matrix(6, 5, 6, 0.0, 2.0);
  const auto toe = penalty_value(
      PenaltyConfig::toeplitz(0.5, 0.5, ToeplitzKind::Geometric, 0.0, 1.0, 6, 5), w, h, x);
  const auto fro = penalty_value(PenaltyConfig::frobenius(0.5, 0.5), w, h, x);
  CHECK(toe.first == fro.first);
  CHECK(toe.second == fro.second);
}

TEST_CASE("penalty gradients: small closed forms") {
  const auto w = DenseMatrix::from_rows({{1, 2}});
  const auto x1 = DenseMatrix::from_rows({{1}});
  const auto gw = penalty_grad_w(PenaltyConfig::frobenius(0.1, 0.1), w, x1);
  CHECK(gw(0, 0) == 2.0);
  CHECK(gw(0, 1) == 4.0);

  const auto h = DenseMatrix::from_rows({{0, 3}});
  const auto gh = penalty_grad_h(PenaltyConfig::frobenius(0.1, 0.1), h, x1);
  CHECK(gh(0, 0) == 0.0);
  CHECK(gh(0, 1) == 6.0);
}

TEST_CASE("penalty gradients: toeplitz rho=0 equals the frobenius branch") {
  const auto w = random_matrix(10, 4, 7, 0.0, 1.0);
  const auto h = random_matrix(4, 8, 8, 0.0, 1.0);
  const auto x = random_matrix(10, 8, 9, 0.0, 1.0);
  const auto toe = PenaltyConfig::toeplitz(0.2, 0.8, ToeplitzKind::Geometric, 0.0, 1.0, 10, 8);
  const auto fro = PenaltyConfig::frobenius(0.2, 0.8);
  CHECK(max_abs_diff(penalty_grad_w(toe, w, x), penalty_grad_w(fro, w, x)) == 0.0);
  CHECK(max_abs_diff(penalty_grad_h(toe, h, x), penalty_grad_h(fro, h, x)) == 0.0);
}

TEST_CASE("penalty gradients match central finite differences") {
  constexpr double kStep = 1e-6;
  constexpr double kTol = 1e-5;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto w = random_matrix(10, 4, 1000 + seed, 0.05, 1.0);
    const auto h = random_matrix(4, 10, 2000 + seed, 0.05, 1.0);
    const auto x = random_matrix(10, 10, 3000 + seed, 0.05, 1.0);
    for (const auto& config : all_families(10, 10)) {
      const std::string family = penalty_family_name(config.family);
      CAPTURE(family);
      CAPTURE(seed);
      const auto aw = penalty_grad_w(config, w, x);
      CHECK(relative_grad_error(aw, fd_grad_w(config, w, h, x, kStep)) < kTol);
      const auto ah = penalty_grad_h(config, h, x);
      CHECK(relative_grad_error(ah, fd_grad_h(config, w, h, x, kStep)) < kTol);
    }
  }
}

TEST_CASE("update_w scalar cases") {
  const auto x = DenseMatrix::from_rows({{1}});
  FactorizationModel model;
  model.rank = 1;
  model.w = DenseMatrix::from_rows({{0.5}});
  model.h = DenseMatrix::from_rows({{1}});
  SolverConfig solver;

  SUBCASE("unpenalized") {
    update_w(model, x, PenaltyConfig::none(), solver);
    CHECK(model.w(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("zellner per the g-scaled W update") {
    // denominator 0.5*1*1 + (0.5/1)*1*1*0.5 = 0.75; 0.5 * (1/0.75) = 2/3
    update_w(model, x, PenaltyConfig::zellner(0.5, 0.5, 1.0), solver);
    CHECK(model.w(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("update_h scalar cases") {
  FactorizationModel model;
  model.rank = 1;
  SolverConfig solver;

  SUBCASE("unpenalized") {
    const auto x = DenseMatrix::from_rows({{2}});
    model.w = DenseMatrix::from_rows({{1}});
    model.h = DenseMatrix::from_rows({{1}});
    update_h(model, x, PenaltyConfig::none(), solver);
    CHECK(model.h(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("zellner per the g-scaled H update") {
    // g H W'X / (g W'WH + beta H X'X) with X=1, W=1, H=0.5, g=2, beta=1:
    // numerator 2*1 = 2, denominator 2*0.5 + 1*0.5 = 1.5, H' = 0.5 * 2/1.5 = 2/3.
    const auto x = DenseMatrix::from_rows({{1}});
    model.w = DenseMatrix::from_rows({{1}});
    model.h = DenseMatrix::from_rows({{0.5}});
    update_h(model, x, PenaltyConfig::zellner(0.5, 1.0, 2.0), solver);
    CHECK(model.h(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("updates leave an exact factorization fixed when unpenalized") {
  const auto w0 = random_matrix(3, 2, 11, 0.5, 1.5);
  const auto h0 = random_matrix(2, 4, 12, 0.5, 1.5);
  const auto x = matmul(w0, h0);
  FactorizationModel model;
  model.rank = 2;
  model.w = w0;
  model.h = h0;
  SolverConfig solver;
  update_w(model, x, PenaltyConfig::none(), solver);
  CHECK(max_abs_diff(model.w, w0) < 1e-12);
  update_h(model, x, PenaltyConfig::none(), solver);
  CHECK(max_abs_diff(model.h, h0) < 1e-12);
}

TEST_CASE("cost small cases and composition") {
  FactorizationModel model;
  model.rank = 1;
  model.w = DenseMatrix::from_rows({{1}});
  model.h = DenseMatrix::from_rows({{1}});
  const auto x = DenseMatrix::from_rows({{2}});
  CHECK(cost(model, x, PenaltyConfig::none()) == 0.5);

  const auto w0 = random_matrix(4, 2, 13, 0.5, 1.5);
  const auto h0 = random_matrix(2, 6, 14, 0.5, 1.5);
  FactorizationModel exact;
  exact.rank = 2;
  exact.w = w0;
  exact.h = h0;
  const auto xe = matmul(w0, h0);
  CHECK(cost(exact, xe, PenaltyConfig::none()) == 0.0);

  // penalized cost = unpenalized + alpha J1 + beta J2
  for (const auto& config : all_families(4, 6)) {
    const auto [j1, j2] = penalty_value(config, exact.w, exact.h, xe);
    const double expected =
        cost(exact, xe, PenaltyConfig::none()) + config.alpha * j1 + config.beta * j2;
    CHECK(cost(exact, xe, config) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("run recovers an exactly factorable rank-1 matrix") {
  const auto u = random_matrix(8, 1, 15, 0.2, 1.2);
  const auto v = random_matrix(1, 6, 16, 0.2, 1.2);
  const auto x = matmul(u, v);
  SolverConfig solver;
  solver.max_iters = 500;
  solver.rel_tol = 0.0;
  solver.seed = 3;
  const auto model = run(x, 1, PenaltyConfig::none(), solver);
  CHECK(model.cost_history.back() < 1e-8 * frobenius_norm_sq(x));
}

TEST_CASE("run cost history is non-increasing for the unpenalized family") {
  for (unsigned seed = 0; seed < 3; ++seed) {
    const auto x = random_matrix(50, 30, 4000 + seed, 0.0, 1.0);
    SolverConfig solver;
    solver.max_iters = 120;
    solver.rel_tol = 0.0;
    solver.check_every = 1;
    solver.seed = seed;
    const auto model = run(x, 5, PenaltyConfig::none(), solver);
    REQUIRE(model.cost_history.size() == 121);
    for (std::size_t t = 1; t < model.cost_history.size(); ++t) {
      CHECK(model.cost_history[t] <= model.cost_history[t - 1] + 1e-10);
    }
  }
}

TEST_CASE("run reductions to the unpenalized trajectory") {
  const auto x = random_matrix(30, 20, 17, 0.0, 1.0);
  SolverConfig solver;
  solver.max_iters = 100;
  solver.rel_tol = 0.0;
  solver.check_every = 10;
  solver.seed = 99;

  const auto plain = run(x, 4, PenaltyConfig::none(), solver);
  const auto cnmf0 = run(x, 4, PenaltyConfig::frobenius(0.0, 0.0), solver);
  CHECK(max_abs_diff(plain.w, cnmf0.w) <= 1e-12);
  CHECK(max_abs_diff(plain.h, cnmf0.h) <= 1e-12);

  const auto znmf0 = run(x, 4, PenaltyConfig::zellner(0.0, 0.0, 7.3), solver);
  CHECK(max_abs_diff(plain.w, znmf0.w) <= 1e-12);
  CHECK(max_abs_diff(plain.h, znmf0.h) <= 1e-12);

  const auto cnmf = run(x, 4, PenaltyConfig::frobenius(0.3, 0.7), solver);
  const auto tnmf0 = run(
      x, 4, PenaltyConfig::toeplitz(0.3, 0.7, ToeplitzKind::Geometric, 0.0, 1.0, 30, 20), solver);
  CHECK(max_abs_diff(cnmf.w, tnmf0.w) <= 1e-12);
  CHECK(max_abs_diff(cnmf.h, tnmf0.h) <= 1e-12);
}

TEST_CASE("run is deterministic in its arguments") {
  const auto x = random_matrix(20, 12, 18, 0.0, 1.0);
  SolverConfig solver;
  solver.max_iters = 60;
  solver.seed = 5;
  const auto config = PenaltyConfig::zellner(0.4, 0.6, 12.0);
  const auto a = run(x, 3, config, solver);
  const auto b = run(x, 3, config, solver);
  REQUIRE(a.cost_history.size() == b.cost_history.size());
  for (std::size_t i = 0; i < a.cost_history.size(); ++i) {
    CHECK(a.cost_history[i] == b.cost_history[i]);
  }
  CHECK(max_abs_diff(a.w, b.w) == 0.0);
  CHECK(max_abs_diff(a.h, b.h) == 0.0);
}

TEST_CASE("run keeps factors nonnegative for every family") {
  const auto x = random_matrix(25, 15, 19, 0.0, 1.0);
  SolverConfig solver;
  solver.max_iters = 80;
  solver.seed = 7;
  for (const auto& config : all_families(25, 15)) {
    const std::string family = penalty_family_name(config.family);
    CAPTURE(family);
    const auto model = run(x, 4, config, solver);
    CHECK(min_entry(model.w) >= 0.0);
    CHECK(min_entry(model.h) >= 0.0);
    CHECK(std::isfinite(model.cost_history.back()));
  }
}

TEST_CASE("run validates input domain") {
  auto x = random_matrix(6, 5, 20, 0.0, 1.0);
  x(3, 2) = -0.5;
  SolverConfig solver;
  CHECK_THROWS_AS(run(x, 2, PenaltyConfig::none(), solver), InputDomainError);

  const auto ok = random_matrix(6, 5, 21, 0.0, 1.0);
  CHECK_THROWS_AS(run(ok, 6, PenaltyConfig::none(), solver), ParameterError);
}

TEST_CASE("run reports the iteration when the cost blows up") {
  // Entries around 1e200 overflow the residual computation immediately.
  DenseMatrix x(3, 3);
  x.eigen().setConstant(1e200);
  SolverConfig solver;
  solver.check_every = 1;
  try {
    run(x, 1, PenaltyConfig::none(), solver);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.iteration() >= 1);
    CHECK(doctest::String(e.what()).size() > 0);
  }
}

TEST_CASE("zellner g preset") {
  CHECK(zellner_g_preset(644, 200) == 40000.0);
  CHECK(zellner_g_preset(4880, 90) == 8100.0);
  CHECK(zellner_g_preset(50000, 10) == 50000.0);
}

TEST_CASE("solver and penalty validation") {
  SolverConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SolverConfig{};
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);

  CHECK_THROWS_AS(PenaltyConfig::zellner(0.5, 0.5, 0.0).validate(3, 3), ParameterError);
  CHECK_THROWS_AS(PenaltyConfig::frobenius(1.5, 0.5).validate(3, 3), ParameterError);
  CHECK_THROWS_AS(
      PenaltyConfig::toeplitz(0.5, 0.5, ToeplitzKind::Geometric, 0.5, 1.0, 4, 3).validate(3, 3),
      ShapeError);
}

TEST_CASE("damped-alternating penalty survives on the denominator clamp") {
  // Weak data under a full-weight sign-indefinite penalty drives update
  // denominators negative; the eps floor must both fire and keep the
  // iterates nonnegative and finite.
  const auto x = random_matrix(20, 12, 100, 0.0, 0.05);
  SolverConfig solver;
  solver.max_iters = 100;
  solver.rel_tol = 0.0;
  solver.seed = 0;
  const auto config =
      PenaltyConfig::toeplitz(1.0, 1.0, ToeplitzKind::DampedAlternating, 0.8, 1.0, 20, 12);
  const auto model = run(x, 3, config, solver);
  CHECK(model.clamp_count > 0);
  CHECK(min_entry(model.w) >= 0.0);
  CHECK(min_entry(model.h) >= 0.0);
  for (double c : model.cost_history) CHECK(std::isfinite(c));
}
