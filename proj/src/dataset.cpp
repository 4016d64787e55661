#include "morisita/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "morisita/errors.hpp"
#include "morisita/rng.hpp"

namespace morisita {

FeatureMatrix FeatureMatrix::from_columns(std::vector<Column> cols) {
  if (cols.empty()) throw ValidationError("matrix has no columns");
  const std::size_t n = cols.front().values.size();
  if (n < 2) throw ValidationError("matrix needs at least 2 rows");
  std::unordered_set<std::string> seen;
  for (const auto& c : cols) {
    if (c.name.empty()) throw ValidationError("empty column name");
    if (!seen.insert(c.name).second)
      throw ValidationError("duplicate column name: " + c.name);
    if (c.values.size() != n)
      throw ValidationError("column " + c.name + " has length " +
                            std::to_string(c.values.size()) + ", expected " +
                            std::to_string(n));
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      if (!std::isfinite(c.values[i]))
        throw ValidationError("non-finite value in column " + c.name +
                              ", row " + std::to_string(i + 1));
    }
  }
  FeatureMatrix m;
  m.cols_ = std::move(cols);
  m.n_rows_ = n;
  return m;
}

std::optional<std::size_t> FeatureMatrix::find_column(
    const std::string& name) const {
  for (std::size_t i = 0; i < cols_.size(); ++i)
    if (cols_[i].name == name) return i;
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::select_columns(
    const std::vector<std::string>& names) const {
  std::vector<Column> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    auto idx = find_column(name);
    if (!idx) throw ValidationError("unknown column: " + name);
    out.push_back(cols_[*idx]);
  }
  return from_columns(std::move(out));
}

RescaledMatrix rescale_unit_interval(const FeatureMatrix& m) {
  RescaledMatrix out;
  std::vector<Column> cols;
  cols.reserve(m.n_cols());
  out.scaling.reserve(m.n_cols());
  for (const auto& c : m.columns()) {
    auto [mn_it, mx_it] = std::minmax_element(c.values.begin(), c.values.end());
    const double mn = *mn_it, mx = *mx_it;
    out.scaling.push_back({mn, mx});
    Column rc{c.name, {}};
    rc.values.reserve(c.values.size());
    if (mx == mn) {
      rc.values.assign(c.values.size(), 0.0);
      out.degenerate_columns.push_back(c.name);
    } else {
      const double inv = 1.0 / (mx - mn);
      for (double v : c.values) rc.values.push_back((v - mn) * inv);
    }
    cols.push_back(std::move(rc));
  }
  out.matrix = FeatureMatrix::from_columns(std::move(cols));
  return out;
}

namespace {

double sample_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

FeatureMatrix gen_butterfly(const ButterflyConfig& cfg) {
  if (cfg.n_points < 2)
    throw ValidationError("butterfly needs at least 2 points");
  const std::size_t n = cfg.n_points;
  SplitRng master(cfg.seed);

  std::vector<Column> cols(8);
  for (int i = 0; i < 8; ++i) {
    cols[i].name = "F" + std::to_string(i + 1);
    cols[i].values.resize(n);
  }

  // Base draws come from per-column substreams so that adding noise or
  // shuffling one column never perturbs another.
  for (int src : {0, 1, 5}) {  // F1, F2, F6
    SplitRng rng = master.split(static_cast<std::uint64_t>(src));
    for (std::size_t r = 0; r < n; ++r)
      cols[src].values[r] = rng.uniform_open(-5.0, 5.0);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double f1 = cols[0].values[r];
    const double f2 = cols[1].values[r];
    const double f6 = cols[5].values[r];
    cols[2].values[r] = std::log10(f1 + 5.0);
    cols[3].values[r] = f1 * f1 - f2 * f2;
    cols[4].values[r] = f1 * f1 * f1 * f1 - f2 * f2 * f2 * f2;
    cols[6].values[r] = std::log10(f6 + 5.0);
    cols[7].values[r] = f6 + cols[6].values[r];
  }

  if (cfg.noise_fraction < 0.0)
    throw ValidationError("noise_fraction must be non-negative");
  if (cfg.noise_fraction > 0.0) {
    for (int idx : {2, 3, 4, 6, 7}) {  // derived features only
      const double sd = cfg.noise_fraction * sample_sd(cols[idx].values);
      SplitRng rng = master.split(100 + static_cast<std::uint64_t>(idx));
      for (double& v : cols[idx].values) v += rng.normal(0.0, sd);
    }
  }

  for (const auto& name : cfg.shuffle_columns) {
    int idx = -1;
    for (int i = 0; i < 8; ++i)
      if (cols[i].name == name) idx = i;
    if (idx < 0)
      throw ValidationError("shuffle column not part of the butterfly: " +
                            name);
    SplitRng rng = master.split(200 + static_cast<std::uint64_t>(idx));
    rng.shuffle(cols[idx].values);
  }

  return FeatureMatrix::from_columns(std::move(cols));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LoadedTable load_table(const std::string& path, bool has_header,
                       const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string line;
  std::vector<std::string> names;
  std::size_t line_no = 0;
  std::size_t n_fields = 0;

  if (has_header) {
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    ++line_no;
    for (auto& f : split_fields(line)) names.push_back(trim(f));
    n_fields = names.size();
  }

  std::vector<std::vector<std::string>> raw;  // column-major strings
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (n_fields == 0) {
      n_fields = fields.size();
      names.resize(n_fields);
      for (std::size_t i = 0; i < n_fields; ++i)
        names[i] = "C" + std::to_string(i + 1);
    }
    if (fields.size() != n_fields)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(n_fields) + " fields, got " +
                       std::to_string(fields.size()));
    if (raw.empty()) raw.resize(n_fields);
    for (std::size_t i = 0; i < n_fields; ++i)
      raw[i].push_back(trim(fields[i]));
  }
  if (raw.empty()) throw ParseError(path + ": no data rows");

  int label_idx = -1;
  if (!label_column.empty()) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == label_column) label_idx = static_cast<int>(i);
    if (label_idx < 0)
      throw ValidationError(path + ": label column not found: " +
                            label_column);
  }

  LoadedTable out;
  std::vector<Column> cols;
  const std::size_t header_off = has_header ? 1 : 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (static_cast<int>(i) == label_idx) {
      out.labels = raw[i];
      continue;
    }
    Column c{names[i], {}};
    c.values.reserve(raw[i].size());
    for (std::size_t r = 0; r < raw[i].size(); ++r) {
      const std::string& cell = raw[i][r];
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw ParseError(path + ": row " + std::to_string(r + 1 + header_off) +
                         ", column " + names[i] + ": not a number: '" + cell +
                         "'");
      }
      if (pos != cell.size())
        throw ParseError(path + ": row " + std::to_string(r + 1 + header_off) +
                         ", column " + names[i] + ": trailing characters: '" +
                         cell + "'");
      if (!std::isfinite(v))
        throw ParseError(path + ": row " + std::to_string(r + 1 + header_off) +
                         ", column " + names[i] + ": non-finite value '" +
                         cell + "'");
      c.values.push_back(v);
    }
    cols.push_back(std::move(c));
  }
  out.matrix = FeatureMatrix::from_columns(std::move(cols));
  return out;
}

void write_csv(const FeatureMatrix& m, const std::string& path,
               const std::vector<std::string>* labels,
               const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out.precision(17);
  for (std::size_t i = 0; i < m.n_cols(); ++i) {
    if (i) out << ',';
    out << m.column(i).name;
  }
  if (labels) out << ',' << label_name;
  out << '\n';
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    for (std::size_t i = 0; i < m.n_cols(); ++i) {
      if (i) out << ',';
      out << m.column(i).values[r];
    }
    if (labels) out << ',' << (*labels)[r];
    out << '\n';
  }
}

HoldoutSplit split_holdout(const std::vector<std::string>& labels,
                           double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("test_fraction must lie in (0,1)");
  const std::size_t n = labels.size();
  if (n < 2) throw ValidationError("need at least 2 rows to split");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SplitRng rng(seed);
  rng.shuffle(perm);

  auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::min(std::max<std::size_t>(n_test, 1), n - 1);

  HoldoutSplit out;
  out.test_indices.assign(perm.begin(), perm.begin() + n_test);
  out.train_indices.assign(perm.begin() + n_test, perm.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());

  std::unordered_set<std::string> train_classes;
  for (std::size_t i : out.train_indices) train_classes.insert(labels[i]);
  std::unordered_set<std::string> reported;
  for (std::size_t i : out.test_indices) {
    if (!train_classes.count(labels[i]) && reported.insert(labels[i]).second)
      out.missing_train_classes.push_back(labels[i]);
  }
  std::sort(out.missing_train_classes.begin(), out.missing_train_classes.end());
  return out;
}

}  // namespace morisita
