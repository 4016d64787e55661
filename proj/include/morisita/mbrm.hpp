#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morisita/counting.hpp"
#include "morisita/dataset.hpp"

namespace morisita {

struct SelectionConfig {
  ScaleSet scales;                      // frozen; chosen on the full matrix
  std::size_t max_steps = 0;            // 0 means all columns
  std::optional<double> known_full_id;  // skip the full-matrix estimate
  double cutoff_epsilon = 0.02;
  std::size_t jobs = 1;                 // workers for the candidate loop
};

struct SelectionStep {
  std::string feature;
  std::size_t column_index = 0;  // original column position
  double cumulative_id = 0.0;    // ID of the selected prefix
  double diff = 0.0;             // |full_id - cumulative_id|
  double marginal_gain = 0.0;    // cumulative_id minus previous step's
};

struct SelectionTrace {
  double full_id = 0.0;
  std::vector<SelectionStep> steps;
  std::size_t selected_count = 0;  // from the cutoff rule
  bool no_cutoff = false;
};

// Greedy forward selection: at each step, the remaining feature whose
// addition brings the prefix ID closest to the full-data ID is taken.
// Ties break on the lowest original column index. The candidate loop may
// run on cfg.jobs workers; the result is identical for any job count.
SelectionTrace mbrm_select(const RescaledMatrix& m, const SelectionConfig& cfg);

struct CutoffResult {
  std::size_t count = 0;
  bool no_cutoff = false;
};

// Smallest k whose diff is within epsilon * max(full_id, 1), or failing
// that the smallest k after which every marginal gain stays below
// gain_threshold (the curve has flattened; vacuous at the final step).
// Trace length with the no_cutoff flag when neither fires. The gain
// clause covers noisy data, where the full-data ID rises above what any
// informative prefix can reach while the curve still flattens clearly.
CutoffResult cutoff_count(const SelectionTrace& trace, double epsilon,
                          double gain_threshold = 1.0 / 3.0);

struct MonteCarloSummary {
  std::size_t n_runs = 0;
  std::vector<double> step_mean_id;
  std::vector<double> step_sd_id;
  double full_id_mean = 0.0;
  double full_id_sd = 0.0;
  // First-three-feature sets (order-insensitive) with occurrence counts.
  std::map<std::set<std::string>, int> triplet_counts;
};

struct MonteCarloConfig {
  ButterflyConfig base;  // seed acts as the master seed
  int n_runs = 100;
  std::size_t max_steps = 0;
  double cutoff_epsilon = 0.02;
  std::size_t jobs = 1;
  int scale_ratio = 1;
  int scale_cap = 4096;
};

// Repeated seeded generation + selection; per-run seeds derive from the
// master seed, so runs are independent and reproducible.
MonteCarloSummary monte_carlo_selection(const MonteCarloConfig& cfg);

}  // namespace morisita
