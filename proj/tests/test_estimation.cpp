#include "morisita/estimation.hpp"

#include <cmath>

#include "doctest.h"
#include "morisita/errors.hpp"
#include "morisita/rng.hpp"
#include "oracle.hpp"

using namespace morisita;

namespace {

RescaledMatrix wrap_unit(std::vector<Column> cols) {
  RescaledMatrix m;
  m.matrix = FeatureMatrix::from_columns(std::move(cols));
  m.scaling.assign(m.matrix.n_cols(), {0.0, 1.0});
  return m;
}

RescaledMatrix uniform_matrix(std::size_t n, std::size_t dim,
                              std::uint64_t seed) {
  SplitRng master(seed);
  std::vector<Column> cols;
  for (std::size_t d = 0; d < dim; ++d) {
    SplitRng rng = master.split(d);
    Column c{"u" + std::to_string(d + 1), {}};
    c.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) c.values.push_back(rng.uniform01());
    cols.push_back(std::move(c));
  }
  return wrap_unit(std::move(cols));
}

RescaledMatrix identical_points(std::size_t n, std::size_t dim) {
  std::vector<Column> cols;
  for (std::size_t d = 0; d < dim; ++d)
    cols.push_back({"c" + std::to_string(d), std::vector<double>(n, 0.37)});
  return wrap_unit(std::move(cols));
}

}  // namespace

TEST_CASE("curve for identical points is the exact Q line") {
  const auto m = identical_points(10, 2);
  const auto curve = compute_curve(m, ScaleSet::from_values({1, 2, 4}));
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].log_index == doctest::Approx(0.0));
  CHECK(curve.points[1].log_index ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(curve.points[2].log_index ==
        doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-12));
  CHECK(curve.dropped_scales.empty());
}

TEST_CASE("scales beyond the pairing limit are dropped") {
  // Two clusters separate at scale 2; only co-located pairs survive finer
  // grids, and here there are none.
  const auto m = wrap_unit({{"x", {0.1, 0.2, 0.6, 0.7}}});
  const auto curve = compute_curve(m, ScaleSet::from_values({1, 2, 8}));
  CHECK(curve.points.size() == 2);
  CHECK(curve.dropped_scales == std::vector<int>{8});
}

TEST_CASE("curve with fewer than two valid scales is infeasible") {
  const auto m = wrap_unit({{"x", {0.1, 0.9}}});
  CHECK_THROWS_AS(compute_curve(m, ScaleSet::from_values({2, 4, 8})),
                  InfeasibleError);
}

TEST_CASE("fit_slope recovers an exact line") {
  MorisitaCurve curve;
  curve.dim = 1;
  curve.n_points = 10;
  for (double x : {0.0, 0.5, 1.0, 1.7})
    curve.points.push_back({1, x, 2.0 * x + 1.0});
  const auto fit = fit_slope(curve);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two points always fit perfectly") {
  MorisitaCurve curve;
  curve.points = {{1, 0.0, 0.3}, {2, 0.7, 1.9}};
  const auto fit = fit_slope(curve);
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("identical points give slope E and ID zero") {
  const auto m = identical_points(20, 3);
  const auto est = estimate_id(m, ScaleSet::from_values({1, 2, 4, 8}));
  CHECK(est.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(est.id_value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(est.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the ID identity holds exactly") {
  SplitRng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = uniform_matrix(200, 1 + rng.bounded_u64(3), rng.next_u64());
    const auto est = estimate_id(m, ScaleSet::from_values({1, 2, 4}));
    CHECK(est.id_value ==
          static_cast<double>(m.matrix.n_cols()) -
              est.slope / static_cast<double>(est.m_order - 1));
  }
}

TEST_CASE("uniform 2-D data estimates ID near 2") {
  const auto m = uniform_matrix(100000, 2, 99);
  const auto est =
      estimate_id(m, ScaleSet::from_values({1, 2, 4, 8, 16, 32}));
  CHECK(est.id_value > 1.9);
  CHECK(est.id_value < 2.05);
}

TEST_CASE("uniform data on a d-dimensional subspace estimates d") {
  // d informative axes, the rest pinned to a constant.
  SplitRng seeds(123);
  for (std::size_t d = 1; d <= 3; ++d) {
    const std::size_t total = d + 3;
    auto m = uniform_matrix(100000, total, seeds.next_u64());
    for (std::size_t c = d; c < total; ++c)
      m.matrix.column(c).values.assign(m.matrix.n_rows(), 0.5);
    const auto est =
        estimate_id(m, ScaleSet::from_values({1, 2, 4, 8, 16, 32}));
    CHECK(std::abs(est.id_value - static_cast<double>(d)) <= 0.1);
  }
}

TEST_CASE("column permutation leaves the estimate unchanged") {
  ButterflyConfig cfg;
  cfg.n_points = 2000;
  cfg.seed = 4;
  const auto base = gen_butterfly(cfg);
  std::vector<Column> reversed(base.columns().rbegin(),
                               base.columns().rend());
  const auto a = rescale_unit_interval(base);
  const auto b =
      rescale_unit_interval(FeatureMatrix::from_columns(std::move(reversed)));
  const auto scales = ScaleSet::from_values({1, 2, 4, 8});
  CHECK(estimate_id(a, scales).id_value ==
        doctest::Approx(estimate_id(b, scales).id_value).epsilon(1e-12));
}

TEST_CASE("duplicating a column leaves the estimate unchanged") {
  SplitRng rng(8);
  auto m = uniform_matrix(150, 2, 17);
  auto cols = m.matrix.columns();
  Column dup = cols[0];
  dup.name = "copy";
  cols.push_back(dup);
  const auto extended = wrap_unit(std::move(cols));
  const auto scales = ScaleSet::from_values({1, 2, 4, 8});
  const auto base_est = estimate_id(m, scales);
  const auto ext_est = estimate_id(extended, scales);
  CHECK(ext_est.id_value ==
        doctest::Approx(base_est.id_value).epsilon(1e-9));
  // Cross-checked against the pair oracle: a duplicated axis shifts
  // every log-index by exactly log(scale).
  for (int scale : {2, 4, 8}) {
    CHECK(oracle::log_index_pairs(extended, scale) ==
          doctest::Approx(oracle::log_index_pairs(m, scale) +
                          std::log(static_cast<double>(scale)))
              .epsilon(1e-12));
  }
}

TEST_CASE("suggest_scales follows the bound and ratio rules") {
  SUBCASE("duplicated points push the bound to the cap") {
    const auto m = wrap_unit({{"x", {0.4, 0.4, 0.9}}});
    const auto s13 = suggest_scales(m, 1, 13);
    std::vector<int> expect;
    for (int i = 1; i <= 13; ++i) expect.push_back(i);
    CHECK(s13.values == expect);

    const auto s2048 = suggest_scales(m, 2, 2048);
    std::vector<int> geo;
    for (int v = 1; v <= 2048; v *= 2) geo.push_back(v);
    CHECK(s2048.values == geo);
  }
  SUBCASE("ratio 2 below 30 still yields powers of two") {
    const auto m = wrap_unit({{"x", {0.4, 0.4, 0.9}}});
    CHECK(suggest_scales(m, 2, 13).values == std::vector<int>{1, 2, 4, 8});
  }
  SUBCASE("large bound forces the geometric sequence even at ratio 1") {
    const auto m = wrap_unit({{"x", {0.4, 0.4, 0.9}}});
    const auto s = suggest_scales(m, 1, 64);
    CHECK(s.values == std::vector<int>{1, 2, 4, 8, 16, 32, 64});
  }
  SUBCASE("two separated points cannot support any grid") {
    const auto m = wrap_unit({{"x", {0.0, 1.0}}});
    CHECK_THROWS_AS(suggest_scales(m, 1, 64), InfeasibleError);
  }
}

TEST_CASE("linear-scale retention drops the anchored origin point") {
  ButterflyConfig cfg;
  cfg.n_points = 10000;
  cfg.seed = 2;
  const auto m = rescale_unit_interval(gen_butterfly(cfg));
  const auto s = auto_scales(m, 1, 4096);
  REQUIRE(s.values.size() >= 3);
  CHECK(s.values.front() > 1);  // the (0,0) point is off the scaling regime
  const auto est = estimate_id(m, s);
  CHECK(est.id_value > 2.8);
  CHECK(est.id_value < 3.2);
}

TEST_CASE("retention keeps everything when the curve is already linear") {
  const auto m = identical_points(50, 2);
  const auto scales = ScaleSet::from_values({1, 2, 4, 8, 16});
  const auto s = retain_linear_scales(m, scales);
  CHECK(s.values == scales.values);  // exact line, every window ties
}

TEST_CASE("low R-squared raises the linearity warning but not an error") {
  // A curve bent by construction: two clusters at different densities.
  std::vector<double> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(0.011 * i);
  for (int i = 0; i < 4; ++i) xs.push_back(0.9 + 0.024 * i);
  const auto m = wrap_unit({{"x", xs}});
  const auto est = estimate_id(m, ScaleSet::from_values({1, 2, 4, 8, 16, 32}));
  CHECK(est.r_squared < 0.95);
  CHECK(est.linearity_warning);
}
