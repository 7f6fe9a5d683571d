// factorization.cpp
#include "penmf/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "penmf/rng.hpp"

namespace penmf {

namespace {

// Floor for the relative-change denominator so a zero cost cannot divide by
// zero; any cost below this is numerically indistinguishable from converged.
constexpr double kTinyCost = 2.2250738585072014e-308;

void check_wh_shapes(const DenseMatrix& w, const DenseMatrix& h, const DenseMatrix& x,
                     std::string_view op) {
  if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows()) {
    throw ShapeError(std::string(op) + ": inconsistent shapes w=" + w.shape_str() +
                     ", h=" + h.shape_str() + ", x=" + x.shape_str());
  }
}

}  // namespace

std::string penalty_family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::None: return "none";
    case PenaltyFamily::Frobenius: return "frobenius";
    case PenaltyFamily::Zellner: return "zellner";
    case PenaltyFamily::Toeplitz: return "toeplitz";
  }
  return "unknown";
}

PenaltyConfig PenaltyConfig::none() { return PenaltyConfig{}; }

PenaltyConfig PenaltyConfig::frobenius(double alpha, double beta) {
  PenaltyConfig config;
  config.family = PenaltyFamily::Frobenius;
  config.alpha = alpha;
  config.beta = beta;
  return config;
}

PenaltyConfig PenaltyConfig::zellner(double alpha, double beta, double g) {
  PenaltyConfig config;
  config.family = PenaltyFamily::Zellner;
  config.alpha = alpha;
  config.beta = beta;
  config.g = g;
  return config;
}

PenaltyConfig PenaltyConfig::toeplitz(double alpha, double beta, ToeplitzKind kind, double rho,
                                      double nu, Index n, Index p) {
  PenaltyConfig config;
  config.family = PenaltyFamily::Toeplitz;
  config.alpha = alpha;
  config.beta = beta;
  config.w_spec = ToeplitzSpec{kind, rho, nu, n};
  config.h_spec = ToeplitzSpec{kind, rho, nu, p};
  return config;
}

void PenaltyConfig::validate(Index n, Index p) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("PenaltyConfig: alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ParameterError("PenaltyConfig: beta must lie in [0, 1], got " + std::to_string(beta));
  }
  if (family == PenaltyFamily::Zellner && !(g > 0.0)) {
    throw ParameterError("PenaltyConfig: zellner g must be positive, got " + std::to_string(g));
  }
  if (family == PenaltyFamily::Toeplitz) {
    w_spec.validate();
    h_spec.validate();
    if (w_spec.dim != n || h_spec.dim != p) {
      throw ShapeError("PenaltyConfig: Toeplitz structures are " + std::to_string(w_spec.dim) +
                       "/" + std::to_string(h_spec.dim) + " but data is " + std::to_string(n) +
                       "x" + std::to_string(p));
    }
    if (w_spec.kind != h_spec.kind || w_spec.rho != h_spec.rho || w_spec.nu != h_spec.nu) {
      throw ParameterError("PenaltyConfig: W and H Toeplitz structures must share kind, rho, nu");
    }
  }
}

double zellner_g_preset(Index n, Index p) {
  return std::max(static_cast<double>(n), static_cast<double>(p) * static_cast<double>(p));
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw ParameterError("SolverConfig: max_iters must be at least 1");
  if (!(eps > 0.0)) throw ParameterError("SolverConfig: eps must be positive");
  if (!(rel_tol >= 0.0)) throw ParameterError("SolverConfig: rel_tol must be nonnegative");
  if (check_every < 1) throw ParameterError("SolverConfig: check_every must be at least 1");
}

FactorizationModel initialize(Index n, Index p, Index k, std::uint64_t seed) {
  if (n < 1 || p < 1) {
    throw ParameterError("initialize: data dimensions must be positive, got " +
                         std::to_string(n) + "x" + std::to_string(p));
  }
  if (k < 1 || k > std::min(n, p)) {
    throw ParameterError("initialize: rank " + std::to_string(k) + " outside [1, min(n, p) = " +
                         std::to_string(std::min(n, p)) + "]");
  }
  FactorizationModel model;
  model.rank = k;
  model.w = DenseMatrix(n, k);
  model.h = DenseMatrix(k, p);
  Rng rng(seed);
  double* w = model.w.eigen().data();
  for (Index i = 0; i < n * k; ++i) w[i] = rng.uniform_pos();
  double* h = model.h.eigen().data();
  for (Index i = 0; i < k * p; ++i) h[i] = rng.uniform_pos();
  return model;
}

std::pair<double, double> penalty_value(const PenaltyConfig& config, const DenseMatrix& w,
                                        const DenseMatrix& h, const DenseMatrix& x) {
  switch (config.family) {
    case PenaltyFamily::None:
      return {0.0, 0.0};
    case PenaltyFamily::Frobenius:
      return {frobenius_norm_sq(w), frobenius_norm_sq(h)};
    case PenaltyFamily::Zellner: {
      check_wh_shapes(w, h, x, "penalty_value");
      // trace(W'XX'W) = |X'W|_F^2 and trace(HX'XH') = |XH'|_F^2.
      const double j1 = (x.eigen().transpose() * w.eigen()).squaredNorm() / config.g;
      const double j2 = (x.eigen() * h.eigen().transpose()).squaredNorm() / config.g;
      return {j1, j2};
    }
    case PenaltyFamily::Toeplitz: {
      const DenseMatrix sw = toeplitz_matmul(config.w_spec, w);
      const double j1 = w.eigen().cwiseProduct(sw.eigen()).sum();
      // H S_p, materialized so the reduction walks H's own layout and the
      // rho = 0 case reproduces the frobenius value bit for bit.
      const DenseMatrix hs = transpose(toeplitz_matmul(config.h_spec, transpose(h)));
      const double j2 = h.eigen().cwiseProduct(hs.eigen()).sum();
      return {j1, j2};
    }
  }
  return {0.0, 0.0};
}

DenseMatrix penalty_grad_w(const PenaltyConfig& config, const DenseMatrix& w,
                           const DenseMatrix& x) {
  switch (config.family) {
    case PenaltyFamily::None:
      return DenseMatrix(w.rows(), w.cols());
    case PenaltyFamily::Frobenius:
      return DenseMatrix(RowMajorMatrix(2.0 * w.eigen()));
    case PenaltyFamily::Zellner: {
      if (x.rows() != w.rows()) {
        throw ShapeError("penalty_grad_w: x=" + x.shape_str() + " incompatible with w=" +
                         w.shape_str());
      }
      return DenseMatrix(RowMajorMatrix((2.0 / config.g) * (x.eigen() *
                                                            (x.eigen().transpose() * w.eigen()))));
    }
    case PenaltyFamily::Toeplitz:
      return DenseMatrix(RowMajorMatrix(2.0 * toeplitz_matmul(config.w_spec, w).eigen()));
  }
  return DenseMatrix(w.rows(), w.cols());
}

DenseMatrix penalty_grad_h(const PenaltyConfig& config, const DenseMatrix& h,
                           const DenseMatrix& x) {
  switch (config.family) {
    case PenaltyFamily::None:
      return DenseMatrix(h.rows(), h.cols());
    case PenaltyFamily::Frobenius:
      return DenseMatrix(RowMajorMatrix(2.0 * h.eigen()));
    case PenaltyFamily::Zellner: {
      if (x.cols() != h.cols()) {
        throw ShapeError("penalty_grad_h: x=" + x.shape_str() + " incompatible with h=" +
                         h.shape_str());
      }
      return DenseMatrix(RowMajorMatrix((2.0 / config.g) * ((h.eigen() * x.eigen().transpose()) *
                                                            x.eigen())));
    }
    case PenaltyFamily::Toeplitz:
      // H S_p, computed as (S_p H')'.
      return DenseMatrix(
          RowMajorMatrix(2.0 * toeplitz_matmul(config.h_spec, transpose(h)).eigen().transpose()));
  }
  return DenseMatrix(h.rows(), h.cols());
}

void update_w(FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config,
              const SolverConfig& solver) {
  check_wh_shapes(model.w, model.h, x, "update_w");
  const auto& w = model.w.eigen();
  const auto& h = model.h.eigen();
  DenseMatrix num(RowMajorMatrix(x.eigen() * h.transpose()));
  DenseMatrix den(RowMajorMatrix(w * (h * h.transpose())));
  if (config.family == PenaltyFamily::Zellner && config.alpha != 0.0) {
    den.eigen().noalias() +=
        (config.alpha / config.g) * (x.eigen() * (x.eigen().transpose() * w));
  } else if (config.family != PenaltyFamily::None && config.alpha != 0.0) {
    den.eigen() += config.alpha * penalty_grad_w(config, model.w, x).eigen();
  }
  model.w = hadamard(model.w, safe_divide(num, den, solver.eps, model.clamp_count));
}

void update_h(FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config,
              const SolverConfig& solver) {
  check_wh_shapes(model.w, model.h, x, "update_h");
  const auto& w = model.w.eigen();
  const auto& h = model.h.eigen();
  DenseMatrix num(RowMajorMatrix(w.transpose() * x.eigen()));
  DenseMatrix den(RowMajorMatrix((w.transpose() * w) * h));
  if (config.family == PenaltyFamily::Zellner && config.beta != 0.0) {
    // g-scaled form: H <- g H . [W'X / (g W'WH + beta H X'X)]; the g factors
    // cancel exactly when beta is zero, hence the branch above this one.
    num.eigen() *= config.g;
    den.eigen() *= config.g;
    den.eigen().noalias() += config.beta * ((h * x.eigen().transpose()) * x.eigen());
  } else if (config.family != PenaltyFamily::None && config.beta != 0.0) {
    den.eigen() += config.beta * penalty_grad_h(config, model.h, x).eigen();
  }
  model.h = hadamard(model.h, safe_divide(num, den, solver.eps, model.clamp_count));
}

double cost(const FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config) {
  check_wh_shapes(model.w, model.h, x, "cost");
  const double residual = (x.eigen() - model.w.eigen() * model.h.eigen()).squaredNorm();
  if (config.family == PenaltyFamily::None) return 0.5 * residual;
  const auto [j1, j2] = penalty_value(config, model.w, model.h, x);
  return 0.5 * residual + config.alpha * j1 + config.beta * j2;
}

FactorizationModel run(const DenseMatrix& x, Index k, const PenaltyConfig& config,
                       const SolverConfig& solver) {
  solver.validate();
  require_nonnegative(x, "run: x");
  const Index n = x.rows();
  const Index p = x.cols();
  config.validate(n, p);

  FactorizationModel model = initialize(n, p, k, solver.seed);
  double checkpoint_cost = cost(model, x, config);
  model.cost_history.push_back(checkpoint_cost);

  for (int t = 1; t <= solver.max_iters; ++t) {
    update_w(model, x, config, solver);
    update_h(model, x, config, solver);
    model.iterations_run = t;
    if (t % solver.check_every == 0 || t == solver.max_iters) {
      const double c = cost(model, x, config);
      if (!std::isfinite(c)) {
        throw NumericalError("run: cost became non-finite", t);
      }
      model.cost_history.push_back(c);
      const double rel = std::abs(checkpoint_cost - c) / std::max(std::abs(checkpoint_cost), kTinyCost);
      checkpoint_cost = c;
      if (rel < solver.rel_tol) break;
    }
  }
  return model;
}

}  // namespace penmf
