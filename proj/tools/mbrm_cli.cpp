// Command-line front-end: butterfly generation, ID estimation, MBRM
// feature selection, log-log curve export and subset evaluation.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "morisita/dataset.hpp"
#include "morisita/errors.hpp"
#include "morisita/estimation.hpp"
#include "morisita/mbrm.hpp"
#include "morisita/metrics.hpp"

#ifndef MBRM_TOOL_VERSION
#define MBRM_TOOL_VERSION "dev"
#endif

using nlohmann::json;
using namespace morisita;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

struct ManifestWriter {
  json flags = json::object();
  std::string command;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write(const std::string& primary_output) const {
    json m;
    m["command"] = command;
    m["flags"] = flags;
    m["tool_version"] = MBRM_TOOL_VERSION;
    m["output"] = primary_output;
    m["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ofstream out(primary_output + ".manifest.json");
    out << m.dump(2) << '\n';
  }
};

ScaleSet resolve_scales(const RescaledMatrix& data, const std::string& scales,
                        int ratio, int cap) {
  if (!scales.empty()) return ScaleSet::from_values(parse_int_list(scales));
  return auto_scales(data, ratio, cap);
}

json estimate_to_json(const IDEstimate& est) {
  json j;
  j["id"] = est.id_value;
  j["slope"] = est.slope;
  j["intercept"] = est.intercept;
  j["r_squared"] = est.r_squared;
  j["m_order"] = est.m_order;
  j["scales"] = est.scales_used.values;
  j["dropped_scales"] = est.dropped_scales;
  j["linearity_warning"] = est.linearity_warning;
  j["range_warning"] = est.range_warning;
  return j;
}

json trace_to_json(const SelectionTrace& trace) {
  json j;
  j["full_id"] = trace.full_id;
  j["selected_count"] = trace.selected_count;
  j["no_cutoff"] = trace.no_cutoff;
  j["steps"] = json::array();
  for (const auto& s : trace.steps) {
    j["steps"].push_back({{"feature", s.feature},
                          {"column_index", s.column_index},
                          {"cumulative_id", s.cumulative_id},
                          {"diff", s.diff},
                          {"marginal_gain", s.marginal_gain}});
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"Morisita intrinsic-dimension estimation and MBRM feature "
               "selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MBRM_TOOL_VERSION);

  // gen-butterfly
  auto* gen = app.add_subcommand("gen-butterfly",
                                 "Generate the butterfly benchmark data set");
  std::size_t gen_n = 1000;
  std::uint64_t gen_seed = 0;
  double gen_noise = 0.0;
  std::string gen_shuffle, gen_out = "butterfly.csv";
  gen->add_option("--n", gen_n, "Number of points");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--noise", gen_noise,
                  "Gaussian noise sd as a fraction of each derived "
                  "feature's sd");
  gen->add_option("--shuffle", gen_shuffle,
                  "Comma-separated columns to permute (e.g. F5,F7)");
  gen->add_option("--out", gen_out, "Output CSV path");

  // shared input/scale flags
  struct CommonIn {
    std::string input;
    std::string scales;
    int ratio = 1;
    int cap = 4096;
    std::string label_column;
  };

  auto add_input_flags = [](CLI::App* cmd, CommonIn& in, bool with_scales) {
    cmd->add_option("--input", in.input, "Input CSV path")->required();
    cmd->add_option("--label-column", in.label_column,
                    "Name of a non-feature label column to ignore");
    if (with_scales) {
      cmd->add_option("--scales", in.scales,
                      "Explicit comma-separated grid resolutions "
                      "(default: chosen automatically)");
      cmd->add_option("--ratio", in.ratio,
                      "Automatic scale sequence ratio (1 or 2)");
      cmd->add_option("--cap", in.cap, "Automatic scale search cap");
    }
  };

  // estimate
  auto* est_cmd = app.add_subcommand("estimate",
                                     "Estimate the intrinsic dimension");
  CommonIn est_in;
  int est_m_order = 2;
  std::string est_out = "estimate.json";
  add_input_flags(est_cmd, est_in, true);
  est_cmd->add_option("--m-order", est_m_order, "Morisita index order");
  est_cmd->add_option("--out", est_out, "Output JSON path");

  // select
  auto* sel_cmd = app.add_subcommand("select", "Run MBRM feature selection");
  CommonIn sel_in;
  std::size_t sel_steps = 0;
  double sel_epsilon = 0.02;
  std::size_t sel_jobs = 1;
  std::string sel_out = "selection.json";
  add_input_flags(sel_cmd, sel_in, true);
  sel_cmd->add_option("--c-steps", sel_steps,
                      "Number of forward-selection steps (0 = all)");
  sel_cmd->add_option("--epsilon", sel_epsilon, "Cut-off threshold");
  sel_cmd->add_option("--jobs", sel_jobs, "Worker threads");
  sel_cmd->add_option("--out", sel_out, "Output JSON path (.csv twin "
                      "written alongside)");

  // curve
  auto* cur_cmd = app.add_subcommand("curve",
                                     "Export the log-log curve as CSV");
  CommonIn cur_in;
  std::string cur_out = "curve.csv";
  add_input_flags(cur_cmd, cur_in, true);
  cur_cmd->add_option("--out", cur_out, "Output CSV path");

  // evaluate
  auto* ev_cmd = app.add_subcommand(
      "evaluate", "Evaluate a feature subset with the holdout protocol");
  CommonIn ev_in;
  std::string ev_subset, ev_subset_file, ev_out = "evaluation.json";
  int ev_repeats = 20;
  std::uint64_t ev_seed = 0;
  std::string ev_k_grid = "1,3,5,7,9";
  add_input_flags(ev_cmd, ev_in, false);
  ev_cmd->get_option("--label-column")->required();
  ev_cmd->add_option("--subset", ev_subset,
                     "Comma-separated feature names (default: all)");
  ev_cmd->add_option("--subset-file", ev_subset_file,
                     "File with one feature name per line");
  ev_cmd->add_option("--repeats", ev_repeats, "Holdout repeats");
  ev_cmd->add_option("--seed", ev_seed, "Master seed");
  ev_cmd->add_option("--k-grid", ev_k_grid,
                     "Candidate neighbour counts for the baseline");
  ev_cmd->add_option("--out", ev_out, "Output JSON path");

  // montecarlo
  auto* mc_cmd = app.add_subcommand(
      "montecarlo", "Repeated butterfly generation + selection summary");
  std::size_t mc_n = 1000;
  int mc_runs = 100;
  std::uint64_t mc_seed = 0;
  double mc_noise = 0.0;
  std::string mc_shuffle;
  std::size_t mc_steps = 0, mc_jobs = 1;
  double mc_epsilon = 0.02;
  std::string mc_out = "montecarlo.csv";
  mc_cmd->add_option("--n", mc_n, "Points per run");
  mc_cmd->add_option("--runs", mc_runs, "Number of runs");
  mc_cmd->add_option("--seed", mc_seed, "Master seed");
  mc_cmd->add_option("--noise", mc_noise, "Noise fraction");
  mc_cmd->add_option("--shuffle", mc_shuffle, "Columns to permute");
  mc_cmd->add_option("--c-steps", mc_steps, "Selection steps (0 = all)");
  mc_cmd->add_option("--epsilon", mc_epsilon, "Cut-off threshold");
  mc_cmd->add_option("--jobs", mc_jobs, "Worker threads");
  mc_cmd->add_option("--out", mc_out,
                     "Per-step summary CSV (triplet CSV written alongside)");

  CLI11_PARSE(app, argc, argv);

  ManifestWriter manifest;

  auto load_features = [](const CommonIn& in) {
    auto table = load_table(in.input, true, in.label_column);
    return table;
  };

  if (gen->parsed()) {
    manifest.command = "gen-butterfly";
    manifest.flags = {{"n", gen_n}, {"seed", gen_seed}, {"noise", gen_noise},
                      {"shuffle", gen_shuffle}, {"out", gen_out}};
    ButterflyConfig cfg;
    cfg.n_points = gen_n;
    cfg.seed = gen_seed;
    cfg.noise_fraction = gen_noise;
    cfg.shuffle_columns = split_list(gen_shuffle);
    write_csv(gen_butterfly(cfg), gen_out);
    manifest.write(gen_out);
  } else if (est_cmd->parsed()) {
    manifest.command = "estimate";
    manifest.flags = {{"input", est_in.input}, {"scales", est_in.scales},
                      {"ratio", est_in.ratio}, {"cap", est_in.cap},
                      {"m_order", est_m_order}, {"out", est_out}};
    const auto table = load_features(est_in);
    const auto data = rescale_unit_interval(table.matrix);
    const auto scales =
        resolve_scales(data, est_in.scales, est_in.ratio, est_in.cap);
    const auto est = estimate_id(data, scales, est_m_order);
    write_text(est_out, estimate_to_json(est).dump(2) + "\n");
    std::cout << estimate_to_json(est).dump(2) << '\n';
    manifest.write(est_out);
  } else if (sel_cmd->parsed()) {
    manifest.command = "select";
    manifest.flags = {{"input", sel_in.input}, {"scales", sel_in.scales},
                      {"ratio", sel_in.ratio}, {"cap", sel_in.cap},
                      {"c_steps", sel_steps}, {"epsilon", sel_epsilon},
                      {"jobs", sel_jobs}, {"out", sel_out}};
    const auto table = load_features(sel_in);
    const auto data = rescale_unit_interval(table.matrix);
    SelectionConfig cfg;
    cfg.scales = resolve_scales(data, sel_in.scales, sel_in.ratio, sel_in.cap);
    cfg.max_steps = sel_steps;
    cfg.cutoff_epsilon = sel_epsilon;
    cfg.jobs = sel_jobs;
    const auto trace = mbrm_select(data, cfg);
    write_text(sel_out, trace_to_json(trace).dump(2) + "\n");

    std::ostringstream csv;
    csv << "step,feature,cumulative_id,diff,marginal_gain\n";
    csv.precision(17);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const auto& s = trace.steps[i];
      csv << (i + 1) << ',' << s.feature << ',' << s.cumulative_id << ','
          << s.diff << ',' << s.marginal_gain << '\n';
    }
    write_text(sel_out + ".csv", csv.str());

    std::cout << "selected:";
    for (std::size_t i = 0; i < trace.selected_count; ++i)
      std::cout << ' ' << trace.steps[i].feature;
    std::cout << (trace.no_cutoff ? " (no cut-off reached)" : "") << '\n';
    manifest.write(sel_out);
  } else if (cur_cmd->parsed()) {
    manifest.command = "curve";
    manifest.flags = {{"input", cur_in.input}, {"scales", cur_in.scales},
                      {"ratio", cur_in.ratio}, {"cap", cur_in.cap},
                      {"out", cur_out}};
    const auto table = load_features(cur_in);
    const auto data = rescale_unit_interval(table.matrix);
    const auto scales =
        resolve_scales(data, cur_in.scales, cur_in.ratio, cur_in.cap);
    const auto curve = compute_curve(data, scales);
    std::ostringstream csv;
    csv << "scale,log_inv_ell,log_index,valid\n";
    csv.precision(17);
    for (const auto& p : curve.points)
      csv << p.scale << ',' << p.log_inv_ell << ',' << p.log_index << ",1\n";
    for (int s : curve.dropped_scales) csv << s << ",,,0\n";
    write_text(cur_out, csv.str());
    manifest.write(cur_out);
  } else if (ev_cmd->parsed()) {
    manifest.command = "evaluate";
    manifest.flags = {{"input", ev_in.input},
                      {"label_column", ev_in.label_column},
                      {"subset", ev_subset}, {"subset_file", ev_subset_file},
                      {"repeats", ev_repeats}, {"seed", ev_seed},
                      {"k_grid", ev_k_grid}, {"out", ev_out}};
    const auto table = load_table(ev_in.input, true, ev_in.label_column);
    std::vector<std::string> subset = split_list(ev_subset);
    if (!ev_subset_file.empty()) {
      std::ifstream in(ev_subset_file);
      if (!in) throw ParseError("cannot open " + ev_subset_file);
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) subset.push_back(line);
    }
    if (subset.empty())
      for (const auto& c : table.matrix.columns()) subset.push_back(c.name);
    EvalConfig cfg;
    cfg.repeats = ev_repeats;
    cfg.seed = ev_seed;
    cfg.k_grid = parse_int_list(ev_k_grid);
    const auto report = evaluate_subset(table.matrix, table.labels, subset,
                                        cfg);
    json j = {{"repeats", report.repeats},
              {"oa_mean_percent", report.oa_mean},
              {"oa_sd_percent", report.oa_sd},
              {"kappa_mean_x100", report.kappa_mean},
              {"kappa_sd_x100", report.kappa_sd},
              {"chosen_k", report.chosen_k},
              {"oa_runs", report.oa_runs},
              {"kappa_runs", report.kappa_runs}};
    write_text(ev_out, j.dump(2) + "\n");

    // One-row CSV in the "mean (sd)" table layout.
    std::ostringstream csv;
    csv << "oa_mean,oa_sd,kappa_mean,kappa_sd\n";
    csv << report.oa_mean << " (" << report.oa_sd << ")," << report.oa_sd
        << ',' << report.kappa_mean << " (" << report.kappa_sd << "),"
        << report.kappa_sd << '\n';
    write_text(ev_out + ".csv", csv.str());
    std::cout << j.dump(2) << '\n';
    manifest.write(ev_out);
  } else if (mc_cmd->parsed()) {
    manifest.command = "montecarlo";
    manifest.flags = {{"n", mc_n}, {"runs", mc_runs}, {"seed", mc_seed},
                      {"noise", mc_noise}, {"shuffle", mc_shuffle},
                      {"c_steps", mc_steps}, {"epsilon", mc_epsilon},
                      {"jobs", mc_jobs}, {"out", mc_out}};
    MonteCarloConfig cfg;
    cfg.base.n_points = mc_n;
    cfg.base.seed = mc_seed;
    cfg.base.noise_fraction = mc_noise;
    cfg.base.shuffle_columns = split_list(mc_shuffle);
    cfg.n_runs = mc_runs;
    cfg.max_steps = mc_steps;
    cfg.cutoff_epsilon = mc_epsilon;
    cfg.jobs = mc_jobs;
    const auto summary = monte_carlo_selection(cfg);

    std::ostringstream csv;
    csv << "step,mean_id,sd_id\n";
    csv.precision(17);
    for (std::size_t i = 0; i < summary.step_mean_id.size(); ++i)
      csv << (i + 1) << ',' << summary.step_mean_id[i] << ','
          << summary.step_sd_id[i] << '\n';
    write_text(mc_out, csv.str());

    std::ostringstream tcsv;
    tcsv << "triplet,count\n";
    for (const auto& [triplet, count] : summary.triplet_counts) {
      std::string joined;
      for (const auto& f : triplet) {
        if (!joined.empty()) joined += '+';
        joined += f;
      }
      tcsv << joined << ',' << count << '\n';
    }
    write_text(mc_out + ".triplets.csv", tcsv.str());
    manifest.write(mc_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 4;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
