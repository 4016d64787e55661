#include "morisita/estimation.hpp"

#include <cmath>

#include "morisita/errors.hpp"

namespace morisita {

MorisitaCurve compute_curve(const RescaledMatrix& m, const ScaleSet& scales,
                            const ColumnSubset& subset, int m_order) {
  MorisitaCurve curve;
  curve.n_points = m.matrix.n_rows();
  curve.dim = subset.empty() ? m.matrix.n_cols() : subset.size();
  for (int scale : scales.values) {
    const auto occ = count_cells(m, scale, subset);
    const auto idx = morisita_index(occ, m_order);
    if (idx.valid) {
      curve.points.push_back(
          {scale, std::log(static_cast<double>(scale)), idx.value});
    } else {
      curve.dropped_scales.push_back(scale);
    }
  }
  if (curve.points.size() < 2)
    throw InfeasibleError(
        "fewer than 2 valid scales remain; no slope can be fitted");
  return curve;
}

FitResult fit_slope(const MorisitaCurve& curve) {
  const std::size_t n = curve.points.size();
  if (n < 2) throw ValidationError("slope fit needs at least 2 points");

  double sx = 0.0, sy = 0.0;
  for (const auto& p : curve.points) {
    sx += p.log_inv_ell;
    sy += p.log_index;
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : curve.points) {
    const double dx = p.log_inv_ell - mx;
    const double dy = p.log_index - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ValidationError("degenerate x values in slope fit");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  if (syy == 0.0) {
    fit.r_squared = 1.0;  // constant responses: the fit is exact
  } else {
    double ss_res = 0.0;
    for (const auto& p : curve.points) {
      const double resid =
          p.log_index - (fit.intercept + fit.slope * p.log_inv_ell);
      ss_res += resid * resid;
    }
    fit.r_squared = 1.0 - ss_res / syy;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
  }
  return fit;
}

IDEstimate estimate_id(const RescaledMatrix& m, const ScaleSet& scales,
                       int m_order, const ColumnSubset& subset) {
  const auto curve = compute_curve(m, scales, subset, m_order);
  const auto fit = fit_slope(curve);

  IDEstimate est;
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.r_squared = fit.r_squared;
  est.m_order = m_order;
  est.id_value = static_cast<double>(curve.dim) -
                 fit.slope / static_cast<double>(m_order - 1);
  est.dropped_scales = curve.dropped_scales;
  {
    std::vector<int> used;
    used.reserve(curve.points.size());
    for (const auto& p : curve.points) used.push_back(p.scale);
    est.scales_used = ScaleSet::from_values(std::move(used));
  }
  est.linearity_warning = est.r_squared < 0.95;
  est.range_warning = est.id_value < -0.1 ||
                      est.id_value > static_cast<double>(curve.dim) + 0.1;
  return est;
}

ScaleSet suggest_scales(const RescaledMatrix& m, int ratio, int max_cap) {
  if (ratio != 1 && ratio != 2)
    throw ValidationError("scale ratio must be 1 or 2");
  if (max_cap < 1) throw ValidationError("max_cap must be >= 1");

  const auto bound = max_valid_scale(m, max_cap);
  if (bound.scale <= 1)
    throw InfeasibleError(
        "ID not computable; N too small relative to E (no resolution above 1 "
        "keeps two points in one cell)");

  std::vector<int> values;
  if (bound.scale < 30 && ratio == 1) {
    for (int s = 1; s <= bound.scale; ++s) values.push_back(s);
  } else {
    for (long long s = 1; s <= bound.scale; s *= 2)
      values.push_back(static_cast<int>(s));
  }
  return ScaleSet::from_values(std::move(values));
}

ScaleSet retain_linear_scales(const RescaledMatrix& m, const ScaleSet& scales,
                              double slope_tolerance) {
  auto curve = compute_curve(m, scales);

  // Scales supported by only a handful of same-cell pairs carry more
  // count noise than scaling signal; require a minimal pair support.
  constexpr double kMinOrderedPairs = 20.0;
  {
    std::vector<CurvePoint> kept;
    for (const auto& p : curve.points) {
      const auto occ = count_cells(m, p.scale);
      double ordered_pairs = 0.0;
      for (auto c : occ.counts)
        ordered_pairs += static_cast<double>(c) * (c - 1.0);
      if (ordered_pairs >= kMinOrderedPairs) kept.push_back(p);
    }
    if (kept.size() >= 3) curve.points = std::move(kept);
  }

  const auto& pts = curve.points;
  if (pts.size() < 4) {
    std::vector<int> vals;
    for (const auto& p : pts) vals.push_back(p.scale);
    return ScaleSet::from_values(std::move(vals));
  }

  std::vector<double> seg(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    seg[i] = (pts[i + 1].log_index - pts[i].log_index) /
             (pts[i + 1].log_inv_ell - pts[i].log_inv_ell);

  // Longest window of segments with consistent slopes; among equal
  // lengths the tightest, then the earliest, wins.
  std::size_t best_begin = 0, best_len = 1;
  double best_spread = 0.0;
  for (std::size_t begin = 0; begin < seg.size(); ++begin) {
    double lo = seg[begin], hi = seg[begin];
    for (std::size_t end = begin; end < seg.size(); ++end) {
      lo = std::min(lo, seg[end]);
      hi = std::max(hi, seg[end]);
      if (hi - lo > slope_tolerance) break;
      const std::size_t len = end - begin + 1;
      if (len > best_len || (len == best_len && hi - lo < best_spread)) {
        best_begin = begin;
        best_len = len;
        best_spread = hi - lo;
      }
    }
  }

  // A lone segment is two points; widen to the tightest 3-point window.
  if (best_len < 2) {
    best_len = 2;
    best_begin = 0;
    best_spread = std::abs(seg[1] - seg[0]);
    for (std::size_t begin = 1; begin + 1 < seg.size(); ++begin) {
      const double spread = std::abs(seg[begin + 1] - seg[begin]);
      if (spread < best_spread) {
        best_begin = begin;
        best_spread = spread;
      }
    }
  }

  std::vector<int> vals;
  for (std::size_t i = best_begin; i <= best_begin + best_len; ++i)
    vals.push_back(pts[i].scale);
  return ScaleSet::from_values(std::move(vals));
}

ScaleSet auto_scales(const RescaledMatrix& m, int ratio, int max_cap) {
  return retain_linear_scales(m, suggest_scales(m, ratio, max_cap));
}

}  // namespace morisita
