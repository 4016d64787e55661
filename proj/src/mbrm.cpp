#include "morisita/mbrm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "morisita/errors.hpp"
#include "morisita/estimation.hpp"
#include "morisita/rng.hpp"

namespace morisita {

namespace {

// Runs fn(i) for i in [0, n) on up to jobs workers. Results must be
// written to preallocated slots so the outcome is schedule-independent.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(jobs, n);
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

SelectionTrace mbrm_select(const RescaledMatrix& m,
                           const SelectionConfig& cfg) {
  const std::size_t n_features = m.matrix.n_cols();
  std::size_t max_steps =
      cfg.max_steps == 0 ? n_features : cfg.max_steps;
  if (max_steps > n_features)
    throw ValidationError("max_steps exceeds the number of features");
  if (!(cfg.cutoff_epsilon > 0.0 && cfg.cutoff_epsilon < 1.0))
    throw ValidationError("cutoff_epsilon must lie in (0,1)");

  SelectionTrace trace;
  trace.full_id = cfg.known_full_id
                      ? *cfg.known_full_id
                      : estimate_id(m, cfg.scales).id_value;

  ColumnSubset selected;
  std::vector<std::size_t> remaining(n_features);
  for (std::size_t i = 0; i < n_features; ++i) remaining[i] = i;

  double prev_id = 0.0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::vector<double> candidate_id(remaining.size());
    parallel_for(remaining.size(), cfg.jobs, [&](std::size_t c) {
      ColumnSubset subset = selected;
      subset.push_back(remaining[c]);
      candidate_id[c] = estimate_id(m, cfg.scales, 2, subset).id_value;
    });

    // Argmin of |full_id - id|; ties break on the lowest original
    // column index, which is the iteration order of `remaining`.
    std::size_t best = 0;
    double best_diff = std::abs(trace.full_id - candidate_id[0]);
    for (std::size_t c = 1; c < remaining.size(); ++c) {
      const double diff = std::abs(trace.full_id - candidate_id[c]);
      if (diff < best_diff) {
        best = c;
        best_diff = diff;
      }
    }

    SelectionStep s;
    s.column_index = remaining[best];
    s.feature = m.matrix.column(remaining[best]).name;
    s.cumulative_id = candidate_id[best];
    s.diff = best_diff;
    s.marginal_gain = candidate_id[best] - prev_id;
    prev_id = candidate_id[best];
    trace.steps.push_back(std::move(s));

    selected.push_back(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }

  const auto cut = cutoff_count(trace, cfg.cutoff_epsilon);
  trace.selected_count = cut.count;
  trace.no_cutoff = cut.no_cutoff;
  return trace;
}

CutoffResult cutoff_count(const SelectionTrace& trace, double epsilon,
                          double gain_threshold) {
  if (trace.steps.empty()) throw ValidationError("empty selection trace");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ValidationError("epsilon must lie in (0,1)");
  const double tolerance = epsilon * std::max(trace.full_id, 1.0);
  const std::size_t n = trace.steps.size();

  // flat_after[k]: every step past k gains less than gain_threshold.
  std::vector<bool> flat_after(n, false);
  bool flat = true;
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 == n) {
      flat_after[k] = false;  // vacuously flat; not evidence of a cut-off
    } else {
      flat = flat && std::abs(trace.steps[k + 1].marginal_gain) <
                         gain_threshold;
      flat_after[k] = flat;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (trace.steps[k].diff <= tolerance || flat_after[k])
      return {k + 1, false};
  }
  return {n, true};
}

MonteCarloSummary monte_carlo_selection(const MonteCarloConfig& cfg) {
  if (cfg.n_runs < 1) throw ValidationError("n_runs must be >= 1");

  std::vector<SelectionTrace> traces(static_cast<std::size_t>(cfg.n_runs));
  SplitRng master(cfg.base.seed);
  std::vector<std::uint64_t> run_seeds(traces.size());
  for (std::size_t r = 0; r < traces.size(); ++r)
    run_seeds[r] = master.split(r).next_u64();

  // One scale vector, chosen on a reference realization, is reused by
  // every run; per-run scale choices would add spread the experiment is
  // not meant to measure.
  ScaleSet scales;
  {
    ButterflyConfig bc = cfg.base;
    bc.seed = run_seeds[0];
    scales = auto_scales(rescale_unit_interval(gen_butterfly(bc)),
                         cfg.scale_ratio, cfg.scale_cap);
  }

  // Runs are independent; the inner candidate loop stays sequential here
  // and the run loop takes the workers instead.
  parallel_for(traces.size(), cfg.jobs, [&](std::size_t r) {
    ButterflyConfig bc = cfg.base;
    bc.seed = run_seeds[r];
    const auto data = rescale_unit_interval(gen_butterfly(bc));
    SelectionConfig sel;
    sel.scales = scales;
    sel.max_steps = cfg.max_steps;
    sel.cutoff_epsilon = cfg.cutoff_epsilon;
    sel.jobs = 1;
    traces[r] = mbrm_select(data, sel);
  });

  MonteCarloSummary out;
  out.n_runs = traces.size();
  const std::size_t n_steps = traces.front().steps.size();

  std::vector<double> full_ids;
  full_ids.reserve(traces.size());
  for (const auto& t : traces) {
    if (t.steps.size() != n_steps)
      throw ValidationError("inconsistent trace lengths across runs");
    full_ids.push_back(t.full_id);
  }

  auto mean_sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd =
        v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair<double, double>{mean, sd};
  };

  auto [fm, fs] = mean_sd(full_ids);
  out.full_id_mean = fm;
  out.full_id_sd = fs;

  for (std::size_t k = 0; k < n_steps; ++k) {
    std::vector<double> ids;
    ids.reserve(traces.size());
    for (const auto& t : traces) ids.push_back(t.steps[k].cumulative_id);
    auto [mean, sd] = mean_sd(ids);
    out.step_mean_id.push_back(mean);
    out.step_sd_id.push_back(sd);
  }

  for (const auto& t : traces) {
    std::set<std::string> triplet;
    for (std::size_t k = 0; k < std::min<std::size_t>(3, t.steps.size()); ++k)
      triplet.insert(t.steps[k].feature);
    ++out.triplet_counts[triplet];
  }
  return out;
}

}  // namespace morisita
