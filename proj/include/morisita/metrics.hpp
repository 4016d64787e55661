#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morisita/dataset.hpp"

namespace morisita {

// B x B contingency table; rows are actual classes, columns predicted.
class ConfusionMatrix {
 public:
  static ConfusionMatrix from_labels(const std::vector<std::string>& actual,
                                     const std::vector<std::string>& predicted);

  const std::vector<std::string>& classes() const { return classes_; }
  std::uint64_t count(std::size_t actual, std::size_t predicted) const {
    return counts_[actual * classes_.size() + predicted];
  }
  std::uint64_t n_test() const { return n_test_; }
  std::uint64_t row_sum(std::size_t c) const;  // G_c
  std::uint64_t col_sum(std::size_t c) const;  // P_c
  std::uint64_t diagonal_sum() const;

 private:
  std::vector<std::string> classes_;  // sorted, shared by both axes
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_test_ = 0;
};

// Fraction of the diagonal.
double overall_accuracy(const ConfusionMatrix& cm);

// Chance-corrected agreement; nullopt when the chance term equals N^2
// (single class on both axes).
std::optional<double> cohen_kappa(const ConfusionMatrix& cm);

// k-nearest-neighbour majority vote with Euclidean distance. Vote ties
// break on the smallest class label, distance ties on the lowest training
// row. Feature scaling is the caller's concern.
std::vector<std::string> baseline_classify(
    const FeatureMatrix& train, const std::vector<std::string>& train_labels,
    const FeatureMatrix& test, int k);

struct EvalReport {
  int repeats = 0;
  double oa_mean = 0.0;     // percent
  double oa_sd = 0.0;
  double kappa_mean = 0.0;  // x100
  double kappa_sd = 0.0;
  std::vector<double> oa_runs;     // fractions in [0,1]
  std::vector<double> kappa_runs;  // in [-1,1]
  std::vector<int> chosen_k;
};

struct EvalConfig {
  int repeats = 20;
  double test_fraction = 0.2;
  std::vector<int> k_grid = {1, 3, 5, 7, 9};
  std::uint64_t seed = 0;
  int cv_folds = 10;
};

// Repeated holdout protocol: per repeat, a seeded 20% test split,
// cross-validated choice of k on the remainder, then test OA and kappa.
// Rescaling uses training min/max; out-of-range test values clamp to [0,1].
EvalReport evaluate_subset(const FeatureMatrix& m,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& subset,
                           const EvalConfig& cfg);

}  // namespace morisita
