// factorization.hpp
// The penalized multiplicative-update engine: plain NMF plus three penalty
// families layered on the same W/H update loop.
//
//   none       unpenalized Lee-Seung updates
//   frobenius  J1 = |W|_F^2, J2 = |H|_F^2                        ("CNMF")
//   zellner    J1 = trace(W'XX'W)/g, J2 = trace(HX'XH')/g        ("ZNMF")
//   toeplitz   J1 = trace(W' S_n W), J2 = trace(H S_p H')        ("TNMF")
//
// For frobenius and toeplitz the update denominators carry the full penalty
// gradient (with its factor of 2). The zellner updates are implemented in
// their g-scaled form, whose H denominator absorbs the factor of 2 into the
// regularization weights; both conventions collapse to the unpenalized
// updates when the weights are zero.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "penmf/matrix.hpp"
#include "penmf/toeplitz.hpp"

namespace penmf {

enum class PenaltyFamily { None, Frobenius, Zellner, Toeplitz };

std::string penalty_family_name(PenaltyFamily family);

struct PenaltyConfig {
  PenaltyFamily family = PenaltyFamily::None;
  double alpha = 0.0;
  double beta = 0.0;
  double g = 1.0;       // zellner only
  ToeplitzSpec w_spec;  // toeplitz only, dimension n
  ToeplitzSpec h_spec;  // toeplitz only, dimension p, same kind/rho/nu

  static PenaltyConfig none();
  static PenaltyConfig frobenius(double alpha, double beta);
  static PenaltyConfig zellner(double alpha, double beta, double g);
  static PenaltyConfig toeplitz(double alpha, double beta, ToeplitzKind kind, double rho,
                                double nu, Index n, Index p);

  // Checks parameter ranges and, for toeplitz, that the structures match the
  // data dimensions n x p.
  void validate(Index n, Index p) const;
};

// The g = max(n, p^2) preset for the zellner family.
double zellner_g_preset(Index n, Index p);

struct SolverConfig {
  int max_iters = 500;
  double rel_tol = 1e-6;    // relative cost change per checkpoint window
  double eps = 1e-12;       // denominator floor
  std::uint64_t seed = 0;
  int check_every = 10;     // cost checkpoint spacing, in iterations

  void validate() const;
};

struct FactorizationModel {
  DenseMatrix w;  // n x k, nonnegative
  DenseMatrix h;  // k x p, nonnegative
  Index rank = 0;
  int iterations_run = 0;
  std::vector<double> cost_history;  // cost at iteration 0 and at checkpoints
  std::uint64_t clamp_count = 0;     // update denominators floored at eps
};

// W and H filled with uniform draws from (0, 1], W first then H, row-major.
FactorizationModel initialize(Index n, Index p, Index k, std::uint64_t seed);

// (J1(W), J2(H)) for the configured family, unweighted.
std::pair<double, double> penalty_value(const PenaltyConfig& config, const DenseMatrix& w,
                                        const DenseMatrix& h, const DenseMatrix& x);

// dJ1/dW and dJ2/dH, carrying the factor of 2 of the quadratic forms.
DenseMatrix penalty_grad_w(const PenaltyConfig& config, const DenseMatrix& w,
                           const DenseMatrix& x);
DenseMatrix penalty_grad_h(const PenaltyConfig& config, const DenseMatrix& h,
                           const DenseMatrix& x);

// One multiplicative sweep over W (resp. H), in place. update_h uses the
// already-updated W of the same iteration.
void update_w(FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config,
              const SolverConfig& solver);
void update_h(FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config,
              const SolverConfig& solver);

// 0.5 |X - WH|_F^2 + alpha J1(W) + beta J2(H).
double cost(const FactorizationModel& model, const DenseMatrix& x, const PenaltyConfig& config);

// Seeded initialization, then alternating W/H sweeps until max_iters or until
// the relative cost change between checkpoints drops below rel_tol. Pure in
// its arguments: equal inputs give bitwise-equal factors and cost history.
FactorizationModel run(const DenseMatrix& x, Index k, const PenaltyConfig& config,
                       const SolverConfig& solver);

}  // namespace penmf
