#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cumdiff/csv.hpp"
#include "cumdiff/report.hpp"
#include "cumdiff/summary.hpp"
#include "cumdiff/svg.hpp"
#include "cumdiff/synthetic.hpp"
#include "cumdiff/version.hpp"

namespace cumdiff {

namespace cli_detail {

struct CommonOptions {
  std::string input_path;
  std::string full_path;
  ColumnSpec columns;
  std::uint64_t seed = 0;
  std::size_t trials = 10000;
  std::string json_path;
  std::string svg_path;
  bool show_baseline = false;
};

inline void add_column_flags(CLI::App& cmd, ColumnSpec& columns) {
  cmd.add_option("--score-col", columns.score_column, "Header name of the score column")
      ->capture_default_str();
  cmd.add_option("--response-col", columns.response_column, "Header name of the response column")
      ->capture_default_str();
  cmd.add_option("--weight-col", columns.weight_column,
                 "Header name of the weight column (omit for unit weights)");
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write file: " + path);
}

inline void print_warnings(const NullModel& null, std::ostream& err) {
  for (const std::string& w : null.warnings) err << "warning: " << w << "\n";
}

inline void print_summary(const AnalysisReport& report, std::ostream& out) {
  out.precision(17);
  out << "mode:        " << mode_name(report.mode) << "\n"
      << "records:     " << report.n_records << "\n"
      << "groups:      " << report.n_groups << "\n"
      << "sigma_n:     " << report.curve.sigma_n << "\n"
      << "max_abs:     " << report.summary.max_abs_stat
      << "  (p_asymptotic " << report.summary.p_max_abs_asymptotic
      << ", p_mc " << report.summary.p_max_abs_mc << ")\n"
      << "range:       " << report.summary.range_stat
      << "  (p_mc " << report.summary.p_range_mc << ")\n"
      << "mc_trials:   " << report.summary.mc_trials
      << "  seed: " << report.summary.mc_seed << "\n";
}

inline int run_analysis(const CommonOptions& opt, Mode mode, std::ostream& out,
                        std::ostream& err) {
  const std::vector<ScoredRecord> parsed = parse_records(read_file(opt.input_path), opt.columns);
  const ValidatedDataset dataset = validate_and_sort(parsed, mode);
  const AggregatedDataset agg = aggregate_ties(dataset);

  NullModel null;
  Provenance prov;
  prov.input_file = opt.input_path;
  if (mode == Mode::calibration) {
    null = calibration_null(agg);
  } else {
    const std::vector<ScoredRecord> full_parsed =
        parse_records(read_file(opt.full_path), opt.columns);
    const FullPopulationReference full{validate_and_sort(full_parsed, Mode::subpopulation)};
    null = subpopulation_null(agg, full);
    prov.full_population_file = opt.full_path;
  }
  print_warnings(null, err);

  AnalysisReport report = build_report(dataset, agg, null, opt.trials, opt.seed, prov);
  if (opt.show_baseline) {
    report.baseline = baseline_curve(dataset, agg, null, opt.seed);
  }
  print_summary(report, out);
  if (!opt.json_path.empty()) write_file(opt.json_path, emit_json(report));
  if (!opt.svg_path.empty()) write_file(opt.svg_path, emit_svg(report));
  return 0;
}

inline int run_check_equivalence(const CommonOptions& opt, const std::vector<std::uint64_t>& seeds,
                                 std::ostream& out, std::ostream& err) {
  const Mode mode = opt.full_path.empty() ? Mode::calibration : Mode::subpopulation;
  const ValidatedDataset dataset =
      validate_and_sort(parse_records(read_file(opt.input_path), opt.columns), mode);
  const AggregatedDataset agg = aggregate_ties(dataset);
  NullModel null;
  if (mode == Mode::calibration) {
    null = calibration_null(agg);
  } else {
    const FullPopulationReference full{
        validate_and_sort(parse_records(read_file(opt.full_path), opt.columns),
                          Mode::subpopulation)};
    null = subpopulation_null(agg, full);
  }
  print_warnings(null, err);

  const CumulativeCurve curve = cumulative_differences(agg, null);
  out.precision(17);
  double worst = 0.0;
  for (const std::uint64_t seed : seeds) {
    const BaselineCurve base = baseline_curve(dataset, agg, null, seed);
    const double discrepancy = equivalence_report(curve, base);
    worst = std::max(worst, discrepancy);
    out << "seed " << seed << ": max boundary discrepancy " << discrepancy << "\n";
  }
  out << "max over seeds: " << worst << (worst <= 1e-12 ? "  (consistent)" : "  (EXCEEDS 1e-12)")
      << "\n";
  return worst <= 1e-12 ? 0 : 2;
}

struct SimulateOptions {
  std::size_t groups = 200;
  std::size_t max_multiplicity = 5;
  std::size_t replicates = 200;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string json_path;
};

// Null-calibration experiment: repeatedly draw a perfectly calibrated
// Bernoulli dataset over a fixed synthetic score/weight/tie structure and
// record the Monte Carlo P-value of the max-abs statistic. Under the null
// the P-values should be close to uniform on (0, 1).
inline int run_simulate(const SimulateOptions& opt, std::ostream& out) {
  SyntheticSpec spec;
  spec.n_groups = opt.groups;
  spec.max_multiplicity = opt.max_multiplicity;
  ValidatedDataset dataset = make_synthetic_dataset(spec, opt.seed);

  std::vector<double> pvalues;
  pvalues.reserve(opt.replicates);
  SplitMix64 response_rng(derive_stream(opt.seed, 0x7265706c69636174ULL));
  for (std::size_t rep = 0; rep < opt.replicates; ++rep) {
    resample_bernoulli_responses(dataset, response_rng);
    const AggregatedDataset agg = aggregate_ties(dataset);
    const NullModel null = calibration_null(agg);
    const CumulativeCurve curve = cumulative_differences(agg, null);
    const ScalarStats stats = scalar_statistics(curve);
    pvalues.push_back(pvalue_monte_carlo(StatKind::max_abs, stats.max_abs, agg, null, opt.trials,
                                         derive_stream(opt.seed, rep + 1)));
  }

  double mean = 0.0;
  for (const double p : pvalues) mean += p;
  mean /= static_cast<double>(pvalues.size());
  out.precision(6);
  out << "replicates: " << pvalues.size() << "  trials per replicate: " << opt.trials << "\n";
  out << "mean p-value: " << mean << "\n";
  out << "empirical CDF at deciles (target = decile):\n";
  double worst = 0.0;
  for (int d = 1; d <= 9; ++d) {
    const double q = d / 10.0;
    std::size_t count = 0;
    for (const double p : pvalues) count += (p <= q);
    const double ecdf = static_cast<double>(count) / static_cast<double>(pvalues.size());
    worst = std::max(worst, std::fabs(ecdf - q));
    out << "  F(" << q << ") = " << ecdf << "\n";
  }
  out << "max |ecdf - decile|: " << worst << "\n";

  if (!opt.json_path.empty()) {
    std::string json = "{\n  \"mean_p\": ";
    detail::append_number(json, mean);
    json += ",\n  \"pvalues\": ";
    detail::append_number_array(json, pvalues);
    json += "\n}\n";
    write_file(opt.json_path, json);
  }
  return 0;
}

}  // namespace cli_detail

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 usage error, 2 data or I/O error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Cumulative-difference statistics for weighted scored data with tied scores"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  cli_detail::CommonOptions opt;

  CLI::App* calib = app.add_subcommand(
      "calib", "Assess calibration of scores against [0,1] responses");
  calib->add_option("input", opt.input_path, "CSV file with header")->required();
  cli_detail::add_column_flags(*calib, opt.columns);
  calib->add_option("--seed", opt.seed, "Seed for Monte Carlo and tie permutation");
  calib->add_option("--trials", opt.trials, "Monte Carlo trials")->capture_default_str();
  calib->add_option("--json", opt.json_path, "Write the analysis report as JSON");
  calib->add_option("--svg", opt.svg_path, "Write the cumulative-difference plot as SVG");
  calib->add_flag("--show-baseline", opt.show_baseline,
                  "Overlay the per-record randomized-tiebreak curve in the SVG");

  CLI::App* subpop = app.add_subcommand(
      "subpop", "Assess deviation of a subpopulation from the full population");
  subpop->add_option("input", opt.input_path, "Subpopulation CSV file")->required();
  subpop->add_option("--full", opt.full_path, "Full-population CSV file")->required();
  cli_detail::add_column_flags(*subpop, opt.columns);
  subpop->add_option("--seed", opt.seed, "Seed for Monte Carlo and tie permutation");
  subpop->add_option("--trials", opt.trials, "Monte Carlo trials")->capture_default_str();
  subpop->add_option("--json", opt.json_path, "Write the analysis report as JSON");
  subpop->add_option("--svg", opt.svg_path, "Write the cumulative-difference plot as SVG");
  subpop->add_flag("--show-baseline", opt.show_baseline,
                   "Overlay the per-record randomized-tiebreak curve in the SVG");

  std::vector<std::uint64_t> seeds{0, 1, 2};
  CLI::App* check = app.add_subcommand(
      "check-equivalence",
      "Verify that the aggregated curve matches the randomized-tiebreak curve at group "
      "boundaries");
  check->add_option("input", opt.input_path, "CSV file with header")->required();
  check->add_option("--full", opt.full_path,
                    "Full-population CSV file (switches to subpopulation mode)");
  cli_detail::add_column_flags(*check, opt.columns);
  check->add_option("--seeds", seeds, "Permutation seeds to try")->capture_default_str();

  cli_detail::SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Null-calibration experiment: P-value uniformity under a simulated exact null");
  simulate->add_option("--groups", sim.groups, "Distinct scores")->capture_default_str();
  simulate->add_option("--max-multiplicity", sim.max_multiplicity, "Largest tie multiplicity")
      ->capture_default_str();
  simulate->add_option("--replicates", sim.replicates, "Simulated datasets")
      ->capture_default_str();
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials per replicate")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--json", sim.json_path, "Write the P-values as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (calib->parsed()) return cli_detail::run_analysis(opt, Mode::calibration, out, err);
    if (subpop->parsed()) return cli_detail::run_analysis(opt, Mode::subpopulation, out, err);
    if (check->parsed()) return cli_detail::run_check_equivalence(opt, seeds, out, err);
    if (simulate->parsed()) return cli_detail::run_simulate(sim, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace cumdiff
