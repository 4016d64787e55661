#include "morisita/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "morisita/errors.hpp"
#include "morisita/rng.hpp"

namespace morisita {

ConfusionMatrix ConfusionMatrix::from_labels(
    const std::vector<std::string>& actual,
    const std::vector<std::string>& predicted) {
  if (actual.empty()) throw ValidationError("empty label vectors");
  if (actual.size() != predicted.size())
    throw ValidationError("label vectors differ in length");

  std::set<std::string> label_set(actual.begin(), actual.end());
  label_set.insert(predicted.begin(), predicted.end());

  ConfusionMatrix cm;
  cm.classes_.assign(label_set.begin(), label_set.end());
  const std::size_t b = cm.classes_.size();
  cm.counts_.assign(b * b, 0);
  auto index_of = [&](const std::string& s) {
    return static_cast<std::size_t>(
        std::lower_bound(cm.classes_.begin(), cm.classes_.end(), s) -
        cm.classes_.begin());
  };
  for (std::size_t i = 0; i < actual.size(); ++i)
    ++cm.counts_[index_of(actual[i]) * b + index_of(predicted[i])];
  cm.n_test_ = actual.size();
  return cm;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes_.size(); ++j) s += count(c, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) s += count(i, c);
  return s;
}

std::uint64_t ConfusionMatrix::diagonal_sum() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) s += count(i, i);
  return s;
}

double overall_accuracy(const ConfusionMatrix& cm) {
  if (cm.n_test() == 0) throw ValidationError("empty confusion matrix");
  return static_cast<double>(cm.diagonal_sum()) /
         static_cast<double>(cm.n_test());
}

std::optional<double> cohen_kappa(const ConfusionMatrix& cm) {
  if (cm.n_test() == 0) throw ValidationError("empty confusion matrix");
  const double n = static_cast<double>(cm.n_test());
  double chance = 0.0;
  for (std::size_t c = 0; c < cm.classes().size(); ++c)
    chance += static_cast<double>(cm.row_sum(c)) *
              static_cast<double>(cm.col_sum(c));
  const double denom = n * n - chance;
  if (denom == 0.0) return std::nullopt;
  return (n * static_cast<double>(cm.diagonal_sum()) - chance) / denom;
}

std::vector<std::string> baseline_classify(
    const FeatureMatrix& train, const std::vector<std::string>& train_labels,
    const FeatureMatrix& test, int k) {
  const std::size_t n_train = train.n_rows();
  if (train_labels.size() != n_train)
    throw ValidationError("training labels length mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > n_train)
    throw ValidationError("k must lie in [1, training size]");
  if (train.n_cols() != test.n_cols())
    throw ValidationError("train/test feature count mismatch");

  const std::size_t dim = train.n_cols();
  std::vector<std::string> predictions;
  predictions.reserve(test.n_rows());

  std::vector<std::pair<double, std::size_t>> dist(n_train);
  for (std::size_t t = 0; t < test.n_rows(); ++t) {
    for (std::size_t i = 0; i < n_train; ++i) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < dim; ++f) {
        const double diff =
            train.column(f).values[i] - test.column(f).values[t];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::map<std::string, int> votes;
    for (int j = 0; j < k; ++j) ++votes[train_labels[dist[j].second]];
    // std::map iterates in label order, so the first maximal entry is
    // the smallest class label.
    auto best = votes.begin();
    for (auto it = std::next(votes.begin()); it != votes.end(); ++it)
      if (it->second > best->second) best = it;
    predictions.push_back(best->first);
  }
  return predictions;
}

namespace {

FeatureMatrix take_rows(const FeatureMatrix& m,
                        const std::vector<std::size_t>& rows) {
  std::vector<Column> cols;
  cols.reserve(m.n_cols());
  for (const auto& c : m.columns()) {
    Column out{c.name, {}};
    out.values.reserve(rows.size());
    for (std::size_t r : rows) out.values.push_back(c.values[r]);
    cols.push_back(std::move(out));
  }
  return FeatureMatrix::from_columns(std::move(cols));
}

// Rescales train to [0,1] per column and applies the same affine map to
// test, clamping out-of-range values.
std::pair<FeatureMatrix, FeatureMatrix> rescale_pair(
    const FeatureMatrix& train, const FeatureMatrix& test) {
  std::vector<Column> tr_cols, te_cols;
  for (std::size_t f = 0; f < train.n_cols(); ++f) {
    const auto& c = train.column(f);
    auto [mn_it, mx_it] = std::minmax_element(c.values.begin(), c.values.end());
    const double mn = *mn_it, mx = *mx_it;
    const double inv = mx > mn ? 1.0 / (mx - mn) : 0.0;
    Column tr{c.name, {}};
    for (double v : c.values) tr.values.push_back((v - mn) * inv);
    Column te{c.name, {}};
    for (double v : test.column(f).values)
      te.values.push_back(std::clamp((v - mn) * inv, 0.0, 1.0));
    tr_cols.push_back(std::move(tr));
    te_cols.push_back(std::move(te));
  }
  return {FeatureMatrix::from_columns(std::move(tr_cols)),
          FeatureMatrix::from_columns(std::move(te_cols))};
}

std::vector<std::string> take_labels(const std::vector<std::string>& labels,
                                     const std::vector<std::size_t>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

// Stratified, seeded fold assignment: within each class, rows are
// shuffled and dealt round-robin.
std::vector<int> assign_folds(const std::vector<std::string>& labels,
                              int n_folds, SplitRng rng) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(i);
  std::vector<int> fold(labels.size(), 0);
  int deal = 0;
  for (auto& [cls, rows] : by_class) {
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      fold[rows[i]] = (deal + static_cast<int>(i)) % n_folds;
    deal = (deal + static_cast<int>(rows.size())) % n_folds;
  }
  return fold;
}

}  // namespace

EvalReport evaluate_subset(const FeatureMatrix& m,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& subset,
                           const EvalConfig& cfg) {
  if (cfg.repeats < 1) throw ValidationError("repeats must be >= 1");
  if (labels.size() != m.n_rows())
    throw ValidationError("labels length mismatch");
  if (cfg.k_grid.empty()) throw ValidationError("empty k grid");

  const FeatureMatrix features = m.select_columns(subset);
  SplitRng master(cfg.seed);

  EvalReport report;
  report.repeats = cfg.repeats;

  for (int rep = 0; rep < cfg.repeats; ++rep) {
    SplitRng rep_rng = master.split(static_cast<std::uint64_t>(rep));
    const auto split =
        split_holdout(labels, cfg.test_fraction, rep_rng.next_u64());

    const auto dev_features = take_rows(features, split.train_indices);
    const auto dev_labels = take_labels(labels, split.train_indices);
    const auto test_features = take_rows(features, split.test_indices);
    const auto test_labels = take_labels(labels, split.test_indices);

    // Cross-validated choice of k on the development side.
    const auto fold = assign_folds(dev_labels, cfg.cv_folds,
                                   rep_rng.split(1));
    int best_k = cfg.k_grid.front();
    double best_oa = -1.0;
    for (int k : cfg.k_grid) {
      std::uint64_t correct = 0, total = 0;
      for (int f = 0; f < cfg.cv_folds; ++f) {
        std::vector<std::size_t> tr, va;
        for (std::size_t i = 0; i < dev_labels.size(); ++i)
          (fold[i] == f ? va : tr).push_back(i);
        if (va.empty() || tr.empty() ||
            static_cast<std::size_t>(k) > tr.size())
          continue;
        auto [tr_m, va_m] = rescale_pair(take_rows(dev_features, tr),
                                         take_rows(dev_features, va));
        const auto pred =
            baseline_classify(tr_m, take_labels(dev_labels, tr), va_m, k);
        for (std::size_t i = 0; i < va.size(); ++i) {
          if (pred[i] == dev_labels[va[i]]) ++correct;
          ++total;
        }
      }
      const double oa =
          total ? static_cast<double>(correct) / static_cast<double>(total)
                : 0.0;
      if (oa > best_oa) {  // k_grid order breaks ties: smallest k wins
        best_oa = oa;
        best_k = k;
      }
    }

    auto [train_m, test_m] = rescale_pair(dev_features, test_features);
    const auto predictions =
        baseline_classify(train_m, dev_labels, test_m, best_k);
    const auto cm = ConfusionMatrix::from_labels(test_labels, predictions);

    report.oa_runs.push_back(overall_accuracy(cm));
    const auto kappa = cohen_kappa(cm);
    report.kappa_runs.push_back(kappa.value_or(0.0));
    report.chosen_k.push_back(best_k);
  }

  auto mean_sd = [](const std::vector<double>& v, double scale) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd =
        v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair<double, double>{mean * scale, sd * scale};
  };
  std::tie(report.oa_mean, report.oa_sd) = mean_sd(report.oa_runs, 100.0);
  std::tie(report.kappa_mean, report.kappa_sd) =
      mean_sd(report.kappa_runs, 100.0);
  return report;
}

}  // namespace morisita
