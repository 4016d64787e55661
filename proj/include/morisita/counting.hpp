#pragma once

#include <cstdint>
#include <vector>

#include "morisita/dataset.hpp"

namespace morisita {

// Ordered grid resolutions (cells per axis). Strictly increasing, >= 1.
struct ScaleSet {
  std::vector<int> values;

  static ScaleSet from_values(std::vector<int> v);  // validates
  std::size_t size() const { return values.size(); }
};

// Occupancy histogram of one grid: per-cell point counts for occupied
// cells only. At most N cells are ever materialized.
struct CellOccupancy {
  int scale = 1;
  std::vector<std::uint32_t> counts;
  std::size_t n_points = 0;
  std::size_t dim = 0;
};

// Lightweight column-subset view used by the selection loop; indices
// refer to columns of the rescaled matrix.
using ColumnSubset = std::vector<std::size_t>;

// Assigns each point the per-axis index floor(x * scale), with x == 1
// clamped into the last cell, and aggregates counts over a hashed sparse
// map. An empty subset means all columns.
CellOccupancy count_cells(const RescaledMatrix& m, int scale,
                          const ColumnSubset& subset = {});

struct LogIndex {
  double value = 0.0;  // natural log of the index; meaningful iff valid
  bool valid = false;  // false when no cell holds m_order points
};

// log I_{m,scale} = (m-1)*E*log(scale) + log(sum_i n_i^(m)) - log(N^(m)),
// with x^(m) the falling factorial. Carried entirely in log space: the
// cell total Q = scale^E overflows any fixed-width type at high E.
LogIndex morisita_index(const CellOccupancy& occ, int m_order = 2);

struct MaxScaleResult {
  int scale = 1;
  bool cap_reached = false;  // even the cap keeps two points together
};

// Largest resolution in {1, 2, 4, ..., cap} at which some cell still
// holds at least two points.
MaxScaleResult max_valid_scale(const RescaledMatrix& m, int cap,
                               const ColumnSubset& subset = {});

}  // namespace morisita
