#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace morisita {

struct Column {
  std::string name;
  std::vector<double> values;
};

// N x E numeric table with named columns. Column-major storage; every
// column has the same length and all values are finite.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  // Validates lengths, names and finiteness; throws ValidationError.
  static FeatureMatrix from_columns(std::vector<Column> cols);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return cols_.size(); }
  const Column& column(std::size_t i) const { return cols_[i]; }
  Column& column(std::size_t i) { return cols_[i]; }
  const std::vector<Column>& columns() const { return cols_; }

  // Index of the named column, or nullopt.
  std::optional<std::size_t> find_column(const std::string& name) const;

  FeatureMatrix select_columns(const std::vector<std::string>& names) const;

 private:
  std::vector<Column> cols_;
  std::size_t n_rows_ = 0;
};

struct ColumnScaling {
  double original_min = 0.0;
  double original_max = 0.0;
};

// A FeatureMatrix mapped column-wise into [0,1]. Constant columns become
// all-zero and are listed in degenerate_columns.
struct RescaledMatrix {
  FeatureMatrix matrix;
  std::vector<ColumnScaling> scaling;
  std::vector<std::string> degenerate_columns;
};

RescaledMatrix rescale_unit_interval(const FeatureMatrix& m);

struct ButterflyConfig {
  std::size_t n_points = 1000;
  std::uint64_t seed = 0;
  double noise_fraction = 0.0;  // fraction of the per-feature sample sd
  std::vector<std::string> shuffle_columns;
};

// Synthetic 8-feature benchmark with 3 degrees of freedom: F1, F2, F6
// uniform on (-5,5); F3 = log10(F1+5); F4 = F1^2-F2^2; F5 = F1^4-F2^4;
// F7 = log10(F6+5); F8 = F6+F7. Optional Gaussian corruption of the
// derived features F3, F4, F5, F7, F8, then optional per-column shuffles.
// Bit-deterministic for a given config.
FeatureMatrix gen_butterfly(const ButterflyConfig& cfg);

struct LoadedTable {
  FeatureMatrix matrix;
  std::vector<std::string> labels;  // empty unless a label column was named
};

// Comma-separated, "." decimal point, optional header. The label column,
// when named, may hold arbitrary strings and is returned separately.
LoadedTable load_table(const std::string& path, bool has_header,
                       const std::string& label_column = "");

void write_csv(const FeatureMatrix& m, const std::string& path,
               const std::vector<std::string>* labels = nullptr,
               const std::string& label_name = "class");

struct HoldoutSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  // Classes present overall but absent from the training side.
  std::vector<std::string> missing_train_classes;
};

// Seeded holdout split; |test| = round(test_fraction * N), rounding half
// away from zero.
HoldoutSplit split_holdout(const std::vector<std::string>& labels,
                           double test_fraction, std::uint64_t seed);

}  // namespace morisita
