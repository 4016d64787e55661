#pragma once

#include <vector>

#include "morisita/counting.hpp"
#include "morisita/dataset.hpp"

namespace morisita {

struct CurvePoint {
  int scale = 1;
  double log_inv_ell = 0.0;
  double log_index = 0.0;
};

// The log-log curve feeding the slope regression. Scales whose index is
// zero (no cell with m points) are dropped, not clamped.
struct MorisitaCurve {
  std::vector<CurvePoint> points;
  std::vector<int> dropped_scales;
  std::size_t dim = 0;
  std::size_t n_points = 0;
};

MorisitaCurve compute_curve(const RescaledMatrix& m, const ScaleSet& scales,
                            const ColumnSubset& subset = {}, int m_order = 2);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// OLS of log-index on log-resolution; r_squared defined as 1 when the
// responses are constant.
FitResult fit_slope(const MorisitaCurve& curve);

struct IDEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double id_value = 0.0;  // dim - slope / (m_order - 1)
  int m_order = 2;
  ScaleSet scales_used;
  std::vector<int> dropped_scales;
  bool linearity_warning = false;  // r_squared below 0.95
  bool range_warning = false;      // id_value outside [0, dim] by > 0.1
};

IDEstimate estimate_id(const RescaledMatrix& m, const ScaleSet& scales,
                       int m_order = 2, const ColumnSubset& subset = {});

// Resolutions from 1 up to the largest usable one: every integer when that
// bound is below 30 and ratio is 1, otherwise powers of 2. Throws
// InfeasibleError when the bound is 1.
ScaleSet suggest_scales(const RescaledMatrix& m, int ratio, int max_cap);

// Keeps the scales spanning the most linear stretch of the log-log curve:
// the longest run of consecutive segments whose slopes stay within
// slope_tolerance of each other (ties: tightest run, then earliest).
// Trims the anchored (0,0) point at resolution 1 and noise-bent tails;
// always keeps at least 3 scales when the input has them.
ScaleSet retain_linear_scales(const RescaledMatrix& m, const ScaleSet& scales,
                              double slope_tolerance = 1.0);

// suggest_scales followed by retain_linear_scales: the fully automatic
// scale choice used by the CLI and the selection pipeline.
ScaleSet auto_scales(const RescaledMatrix& m, int ratio, int max_cap);

}  // namespace morisita
