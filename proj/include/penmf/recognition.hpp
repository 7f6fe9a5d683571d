// recognition.hpp
// From a trained basis to an accuracy number: nonnegative projection of test
// columns onto a frozen W, nearest-neighbor classification in coefficient
// space, and the recognition rate.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "penmf/factorization.hpp"
#include "penmf/matrix.hpp"

namespace penmf {

enum class Metric { Cosine, Euclidean };

std::string metric_name(Metric metric);
Metric parse_metric(const std::string& name);

// Coefficients for x_test against a frozen nonnegative basis w: H_test is
// seeded uniform on (0, 1] and refined by the unpenalized multiplicative
// H-sweep until the solver's stopping criteria; the reconstruction error
// 0.5 |X_test - W H_test|_F^2 is non-increasing. If clamp_count is given,
// denominator clampings are added to it.
DenseMatrix project(const DenseMatrix& w, const DenseMatrix& x_test, const SolverConfig& solver,
                    std::uint64_t* clamp_count = nullptr);

// Label of the nearest training column per test column. Cosine distance is
// 1 - cosine similarity with zero vectors maximally distant; ties go to the
// lowest training-column index.
std::vector<std::string> classify(const DenseMatrix& h_test, const DenseMatrix& h_train,
                                  const std::vector<std::string>& labels, Metric metric);

// Fraction of positions where predicted == actual.
double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& actual);

}  // namespace penmf
