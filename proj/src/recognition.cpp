// recognition.cpp
#include "penmf/recognition.hpp"

#include <cmath>
#include <limits>

#include "penmf/rng.hpp"

namespace penmf {

std::string metric_name(Metric metric) {
  return metric == Metric::Cosine ? "cosine" : "euclidean";
}

Metric parse_metric(const std::string& name) {
  if (name == "cosine") return Metric::Cosine;
  if (name == "euclidean") return Metric::Euclidean;
  throw ParameterError("unknown metric '" + name + "' (expected cosine or euclidean)");
}

DenseMatrix project(const DenseMatrix& w, const DenseMatrix& x_test, const SolverConfig& solver,
                    std::uint64_t* clamp_count) {
  solver.validate();
  require_nonnegative(w, "project: w");
  require_nonnegative(x_test, "project: x_test");
  if (w.rows() != x_test.rows()) {
    throw ShapeError("project: w=" + w.shape_str() + " vs x_test=" + x_test.shape_str());
  }
  const Index k = w.cols();
  const Index m = x_test.cols();
  if (m == 0) return DenseMatrix(k, 0);

  DenseMatrix h(k, m);
  Rng rng(solver.seed);
  double* hd = h.eigen().data();
  for (Index i = 0; i < k * m; ++i) hd[i] = rng.uniform_pos();

  const RowMajorMatrix wtx = w.eigen().transpose() * x_test.eigen();
  const RowMajorMatrix wtw = w.eigen().transpose() * w.eigen();
  const DenseMatrix num(wtx);

  std::uint64_t clamps = 0;
  auto reconstruction_cost = [&]() {
    return 0.5 * (x_test.eigen() - w.eigen() * h.eigen()).squaredNorm();
  };
  double checkpoint_cost = reconstruction_cost();
  for (int t = 1; t <= solver.max_iters; ++t) {
    DenseMatrix den(RowMajorMatrix(wtw * h.eigen()));
    h = hadamard(h, safe_divide(num, den, solver.eps, clamps));
    if (t % solver.check_every == 0 || t == solver.max_iters) {
      const double c = reconstruction_cost();
      if (!std::isfinite(c)) throw NumericalError("project: cost became non-finite", t);
      const double rel =
          std::abs(checkpoint_cost - c) / std::max(std::abs(checkpoint_cost), 2.225e-308);
      checkpoint_cost = c;
      if (rel < solver.rel_tol) break;
    }
  }
  if (clamp_count != nullptr) *clamp_count += clamps;
  return h;
}

std::vector<std::string> classify(const DenseMatrix& h_test, const DenseMatrix& h_train,
                                  const std::vector<std::string>& labels, Metric metric) {
  if (h_train.cols() == 0 || labels.empty()) {
    throw ParameterError("classify: empty training set");
  }
  if (h_test.rows() != h_train.rows()) {
    throw ShapeError("classify: coefficient ranks differ (" + h_test.shape_str() + " vs " +
                     h_train.shape_str() + ")");
  }
  if (static_cast<Index>(labels.size()) != h_train.cols()) {
    throw ParameterError("classify: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(h_train.cols()) + " training columns");
  }

  const Index m = h_test.cols();
  const Index q = h_train.cols();
  std::vector<std::string> predicted;
  predicted.reserve(static_cast<std::size_t>(m));

  Eigen::VectorXd train_norms(q);
  for (Index j = 0; j < q; ++j) train_norms(j) = h_train.eigen().col(j).norm();

  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) {
    const auto test_col = h_test.eigen().col(i);
    const double test_norm = test_col.norm();
    Index best = 0;
    double best_dist = kInf;
    for (Index j = 0; j < q; ++j) {
      double dist;
      if (metric == Metric::Cosine) {
        const double denom = test_norm * train_norms(j);
        dist = denom > 0.0 ? 1.0 - test_col.dot(h_train.eigen().col(j)) / denom : kInf;
      } else {
        dist = (test_col - h_train.eigen().col(j)).norm();
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    predicted.push_back(labels[static_cast<std::size_t>(best)]);
  }
  return predicted;
}

double accuracy(const std::vector<std::string>& predicted,
                const std::vector<std::string>& actual) {
  if (predicted.empty() || predicted.size() != actual.size()) {
    throw ParameterError("accuracy: label lists must be nonempty and of equal length (" +
                         std::to_string(predicted.size()) + " vs " +
                         std::to_string(actual.size()) + ")");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == actual[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace penmf
