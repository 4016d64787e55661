#include "morisita/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "morisita/errors.hpp"

using namespace morisita;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/morisita_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("feature matrix validation") {
  CHECK_THROWS_AS(FeatureMatrix::from_columns({}), ValidationError);
  CHECK_THROWS_AS(
      FeatureMatrix::from_columns({{"a", {1.0, 2.0}}, {"a", {3.0, 4.0}}}),
      ValidationError);
  CHECK_THROWS_AS(
      FeatureMatrix::from_columns({{"a", {1.0, 2.0}}, {"b", {3.0}}}),
      ValidationError);
  CHECK_THROWS_AS(FeatureMatrix::from_columns({{"a", {1.0, NAN}}}),
                  ValidationError);
  CHECK_THROWS_AS(FeatureMatrix::from_columns({{"", {1.0, 2.0}}}),
                  ValidationError);
}

TEST_CASE("load_table parses a small CSV") {
  TempFile f("small.csv", "a,b\n1,2\n3,4\n5,6\n");
  const auto t = load_table(f.path, true);
  CHECK(t.matrix.n_rows() == 3);
  CHECK(t.matrix.n_cols() == 2);
  CHECK(t.matrix.column(0).name == "a");
  CHECK(t.matrix.column(1).values == std::vector<double>{2, 4, 6});
  CHECK(t.labels.empty());
}

TEST_CASE("load_table reports NaN cells with row and column") {
  TempFile f("nan.csv", "a,b\n1,2\n3,NaN\n");
  try {
    load_table(f.path, true);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column b") != std::string::npos);
  }
}

TEST_CASE("load_table extracts a categorical label column") {
  TempFile f("labeled.csv", "x,y,class\n1,2,pos\n3,4,neg\n5,6,pos\n");
  const auto t = load_table(f.path, true, "class");
  CHECK(t.matrix.n_cols() == 2);
  CHECK(t.labels == std::vector<std::string>{"pos", "neg", "pos"});
}

TEST_CASE("load_table rejects ragged rows") {
  TempFile f("ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(load_table(f.path, true), ParseError);
}

TEST_CASE("csv round trip") {
  ButterflyConfig cfg;
  cfg.n_points = 50;
  cfg.seed = 3;
  const auto m = gen_butterfly(cfg);
  TempFile f("roundtrip.csv", "");
  write_csv(m, f.path);
  const auto t = load_table(f.path, true);
  REQUIRE(t.matrix.n_cols() == 8);
  REQUIRE(t.matrix.n_rows() == 50);
  for (std::size_t c = 0; c < 8; ++c)
    for (std::size_t r = 0; r < 50; ++r)
      CHECK(t.matrix.column(c).values[r] ==
            doctest::Approx(m.column(c).values[r]).epsilon(1e-15));
}

TEST_CASE("rescale maps columns onto [0,1]") {
  const auto m = FeatureMatrix::from_columns(
      {{"a", {2, 4, 6}}, {"b", {7, 7, 7}}, {"c", {0.0, 0.25, 1.0}}});
  const auto r = rescale_unit_interval(m);
  CHECK(r.matrix.column(0).values == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(r.matrix.column(1).values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(r.degenerate_columns == std::vector<std::string>{"b"});
  CHECK(r.matrix.column(2).values == std::vector<double>{0.0, 0.25, 1.0});
  CHECK(r.scaling[0].original_min == 2.0);
  CHECK(r.scaling[0].original_max == 6.0);
}

TEST_CASE("rescaling is idempotent on non-degenerate matrices") {
  ButterflyConfig cfg;
  cfg.n_points = 200;
  cfg.seed = 9;
  const auto once = rescale_unit_interval(gen_butterfly(cfg));
  const auto twice = rescale_unit_interval(once.matrix);
  for (std::size_t c = 0; c < once.matrix.n_cols(); ++c)
    for (std::size_t r = 0; r < once.matrix.n_rows(); ++r)
      CHECK(twice.matrix.column(c).values[r] ==
            doctest::Approx(once.matrix.column(c).values[r]).epsilon(1e-12));
}

TEST_CASE("butterfly identities hold exactly on clean data") {
  ButterflyConfig cfg;
  cfg.n_points = 500;
  cfg.seed = 21;
  const auto m = gen_butterfly(cfg);
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    const double f1 = m.column(0).values[r];
    const double f2 = m.column(1).values[r];
    const double f6 = m.column(5).values[r];
    CHECK(m.column(2).values[r] == std::log10(f1 + 5.0));
    CHECK(m.column(3).values[r] == f1 * f1 - f2 * f2);
    CHECK(m.column(4).values[r] == f1 * f1 * f1 * f1 - f2 * f2 * f2 * f2);
    CHECK(m.column(6).values[r] == std::log10(f6 + 5.0));
    CHECK(m.column(7).values[r] == f6 + m.column(6).values[r]);
    CHECK(f1 > -5.0);
    CHECK(f1 < 5.0);
  }
}

TEST_CASE("butterfly generation is bit-deterministic") {
  ButterflyConfig cfg;
  cfg.n_points = 100;
  cfg.seed = 77;
  cfg.noise_fraction = 0.1;
  cfg.shuffle_columns = {"F5"};
  const auto a = gen_butterfly(cfg);
  const auto b = gen_butterfly(cfg);
  for (std::size_t c = 0; c < 8; ++c)
    CHECK(a.column(c).values == b.column(c).values);
}

TEST_CASE("noise amplitude tracks the clean column sd") {
  ButterflyConfig clean_cfg;
  clean_cfg.n_points = 10000;
  clean_cfg.seed = 13;
  auto noisy_cfg = clean_cfg;
  noisy_cfg.noise_fraction = 0.1;
  const auto clean = gen_butterfly(clean_cfg);
  const auto noisy = gen_butterfly(noisy_cfg);
  for (int idx : {2, 3, 4, 6, 7}) {
    std::vector<double> delta;
    for (std::size_t r = 0; r < clean.n_rows(); ++r)
      delta.push_back(noisy.column(idx).values[r] -
                      clean.column(idx).values[r]);
    const double ratio = sample_sd(delta) / sample_sd(clean.column(idx).values);
    CHECK(ratio > 0.08);
    CHECK(ratio < 0.12);
  }
  // Undisturbed columns stay bit-identical.
  for (int idx : {0, 1, 5})
    CHECK(clean.column(idx).values == noisy.column(idx).values);
}

TEST_CASE("shuffling permutes values without changing their multiset") {
  ButterflyConfig cfg;
  cfg.n_points = 300;
  cfg.seed = 31;
  auto shuffled_cfg = cfg;
  shuffled_cfg.shuffle_columns = {"F5", "F7"};
  const auto plain = gen_butterfly(cfg);
  const auto shuffled = gen_butterfly(shuffled_cfg);
  for (int idx : {4, 6}) {
    auto a = plain.column(idx).values;
    auto b = shuffled.column(idx).values;
    CHECK(a != b);  // the permutation actually moved something
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
  for (int idx : {0, 1, 2, 3, 5, 7})
    CHECK(plain.column(idx).values == shuffled.column(idx).values);
}

TEST_CASE("butterfly rejects tiny n and unknown shuffle columns") {
  ButterflyConfig cfg;
  cfg.n_points = 1;
  CHECK_THROWS_AS(gen_butterfly(cfg), ValidationError);
  cfg.n_points = 10;
  cfg.shuffle_columns = {"F9"};
  CHECK_THROWS_AS(gen_butterfly(cfg), ValidationError);
}

TEST_CASE("holdout split arithmetic and determinism") {
  std::vector<std::string> labels(10, "a");
  for (int i = 0; i < 5; ++i) labels[i] = "b";

  const auto s = split_holdout(labels, 0.2, 42);
  CHECK(s.test_indices.size() == 2);
  CHECK(s.train_indices.size() == 8);

  const auto s2 = split_holdout(labels, 0.2, 42);
  CHECK(s.test_indices == s2.test_indices);
  CHECK(s.train_indices == s2.train_indices);

  // Rounding half away from zero: N=101, fraction 0.5 -> 51 test rows.
  std::vector<std::string> many(101, "a");
  const auto s3 = split_holdout(many, 0.5, 1);
  CHECK(s3.test_indices.size() == 51);
  CHECK(s3.train_indices.size() == 50);
}

TEST_CASE("holdout split reports classes missing from training") {
  std::vector<std::string> labels = {"a", "a", "a", "a", "rare"};
  bool saw_missing = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_holdout(labels, 0.2, seed);
    if (!s.missing_train_classes.empty()) {
      CHECK(s.missing_train_classes == std::vector<std::string>{"rare"});
      saw_missing = true;
    }
  }
  CHECK(saw_missing);  // the rare row lands in the test side eventually
}

TEST_CASE("select_columns pulls named columns in order") {
  const auto m = FeatureMatrix::from_columns(
      {{"a", {1, 2}}, {"b", {3, 4}}, {"c", {5, 6}}});
  const auto sub = m.select_columns({"c", "a"});
  CHECK(sub.n_cols() == 2);
  CHECK(sub.column(0).name == "c");
  CHECK(sub.column(1).name == "a");
  CHECK_THROWS_AS(m.select_columns({"zzz"}), ValidationError);
}
