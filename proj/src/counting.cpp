#include "morisita/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "morisita/errors.hpp"

namespace morisita {

ScaleSet ScaleSet::from_values(std::vector<int> v) {
  if (v.empty()) throw ValidationError("empty scale set");
  if (v.front() < 1) throw ValidationError("scales must be >= 1");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1])
      throw ValidationError("scales must be strictly increasing");
  return ScaleSet{std::move(v)};
}

namespace {

std::vector<const std::vector<double>*> resolve_columns(
    const RescaledMatrix& m, const ColumnSubset& subset) {
  std::vector<const std::vector<double>*> cols;
  if (subset.empty()) {
    cols.reserve(m.matrix.n_cols());
    for (std::size_t i = 0; i < m.matrix.n_cols(); ++i)
      cols.push_back(&m.matrix.column(i).values);
  } else {
    cols.reserve(subset.size());
    for (std::size_t i : subset) {
      if (i >= m.matrix.n_cols())
        throw ValidationError("column index out of range");
      cols.push_back(&m.matrix.column(i).values);
    }
  }
  return cols;
}

inline std::uint32_t axis_index(double x, int scale) {
  auto idx = static_cast<std::int64_t>(
      std::floor(x * static_cast<double>(scale)));
  if (idx >= scale) idx = scale - 1;  // x == 1.0 lands in the last cell
  if (idx < 0) idx = 0;
  return static_cast<std::uint32_t>(idx);
}

}  // namespace

CellOccupancy count_cells(const RescaledMatrix& m, int scale,
                          const ColumnSubset& subset) {
  if (scale < 1) throw ValidationError("scale must be >= 1");
  const auto cols = resolve_columns(m, subset);
  const std::size_t dim = cols.size();
  const std::size_t n = m.matrix.n_rows();

  CellOccupancy occ;
  occ.scale = scale;
  occ.n_points = n;
  occ.dim = dim;

  if (scale == 1) {  // one cell spans the whole unit cube
    occ.counts.push_back(static_cast<std::uint32_t>(n));
    return occ;
  }

  const int bits = std::bit_width(static_cast<unsigned>(scale - 1));
  if (static_cast<std::size_t>(bits) * dim <= 64) {
    // Packed 64-bit keys into a sparse hash map.
    std::unordered_map<std::uint64_t, std::uint32_t> cells;
    cells.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::uint64_t key = 0;
      for (std::size_t d = 0; d < dim; ++d)
        key = (key << bits) | axis_index((*cols[d])[r], scale);
      ++cells[key];
    }
    occ.counts.reserve(cells.size());
    for (const auto& [key, c] : cells) occ.counts.push_back(c);
  } else {
    // Wide keys: sort index tuples and count runs.
    std::vector<std::uint32_t> keys(n * dim);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t d = 0; d < dim; ++d)
        keys[r * dim + d] = axis_index((*cols[d])[r], scale);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto row_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(
          keys.begin() + a * dim, keys.begin() + (a + 1) * dim,
          keys.begin() + b * dim, keys.begin() + (b + 1) * dim);
    };
    std::sort(order.begin(), order.end(), row_less);
    auto row_equal = [&](std::size_t a, std::size_t b) {
      return std::equal(keys.begin() + a * dim, keys.begin() + (a + 1) * dim,
                        keys.begin() + b * dim);
    };
    std::uint32_t run = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (row_equal(order[i], order[i - 1])) {
        ++run;
      } else {
        occ.counts.push_back(run);
        run = 1;
      }
    }
    occ.counts.push_back(run);
  }

  // Sorted counts give a canonical histogram independent of row order.
  std::sort(occ.counts.begin(), occ.counts.end());
  return occ;
}

LogIndex morisita_index(const CellOccupancy& occ, int m_order) {
  if (m_order < 2) throw ValidationError("m_order must be >= 2");
  if (occ.n_points < static_cast<std::size_t>(m_order))
    throw ValidationError("need at least m_order points");

  long double numerator = 0.0L;
  for (std::uint32_t n_i : occ.counts) {
    if (n_i < static_cast<std::uint32_t>(m_order)) continue;
    long double prod = 1.0L;
    for (int j = 0; j < m_order; ++j)
      prod *= static_cast<long double>(n_i - static_cast<std::uint32_t>(j));
    numerator += prod;
  }

  LogIndex out;
  if (numerator <= 0.0L) return out;  // index fell to zero at this scale

  long double log_denominator = 0.0L;
  for (int j = 0; j < m_order; ++j)
    log_denominator +=
        std::log(static_cast<long double>(occ.n_points) - j);

  const long double log_q_term =
      static_cast<long double>(m_order - 1) *
      static_cast<long double>(occ.dim) *
      std::log(static_cast<long double>(occ.scale));

  out.value = static_cast<double>(log_q_term + std::log(numerator) -
                                  log_denominator);
  out.valid = true;
  return out;
}

MaxScaleResult max_valid_scale(const RescaledMatrix& m, int cap,
                               const ColumnSubset& subset) {
  if (cap < 1) throw ValidationError("cap must be >= 1");
  if (m.matrix.n_rows() < 2)
    throw ValidationError("need at least 2 points");

  std::vector<int> candidates;
  for (long long s = 1; s <= cap; s *= 2) candidates.push_back(static_cast<int>(s));
  if (candidates.back() != cap) candidates.push_back(cap);

  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    const auto occ = count_cells(m, *it, subset);
    const bool has_pair =
        std::any_of(occ.counts.begin(), occ.counts.end(),
                    [](std::uint32_t c) { return c >= 2; });
    if (has_pair) return {*it, *it == cap};
  }
  return {1, false};  // scale 1 always holds all N >= 2 points together
}

}  // namespace morisita
