#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cumdiff/curve.hpp"
#include "cumdiff/dataset.hpp"
#include "cumdiff/summary.hpp"
#include "cumdiff/version.hpp"

namespace cumdiff {

struct Provenance {
  std::string input_file;
  std::string full_population_file;  // empty in calibration mode
  std::string tool_version = kVersion;
};

// Everything one analysis produced: the curve (raw and normalized by
// sigma_n), the scalar summary, and where the data came from. The optional
// baseline is kept for SVG overlays only and never serialized.
struct AnalysisReport {
  Mode mode = Mode::calibration;
  std::size_t n_groups = 0;
  std::size_t n_records = 0;
  CumulativeCurve curve;
  std::vector<double> normalized;
  SummaryReport summary;
  Provenance provenance;
  std::optional<BaselineCurve> baseline;
};

inline AnalysisReport build_report(const ValidatedDataset& dataset, const AggregatedDataset& agg,
                                   const NullModel& null, std::size_t trials, std::uint64_t seed,
                                   Provenance provenance) {
  AnalysisReport report;
  report.mode = dataset.mode;
  report.n_groups = agg.groups.size();
  report.n_records = dataset.records.size();
  report.curve = cumulative_differences(agg, null);
  report.normalized.reserve(report.curve.ordinates.size());
  for (const double c : report.curve.ordinates) {
    report.normalized.push_back(c / report.curve.sigma_n);
  }
  report.summary = summarize(report.curve, agg, null, trials, seed);
  report.provenance = std::move(provenance);
  return report;
}

namespace detail {

// 17 significant digits: enough to reproduce any double bit-exactly on
// parse, and a fixed width so identical values always print identically.
inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline void append_integer(std::string& out, std::uint64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

inline void append_number_array(std::string& out, std::span<const double> values) {
  out.push_back('[');
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    append_number(out, values[i]);
  }
  out.push_back(']');
}

}  // namespace detail

// Canonical UTF-8 JSON form of a report: fixed key order, numbers with 17
// significant digits, no whitespace variation. Serializing the same report
// always yields the same bytes, and parse_report() inverts it losslessly.
inline std::string emit_json(const AnalysisReport& report) {
  std::string out;
  out.reserve(256 + 80 * report.curve.ordinates.size());
  out += "{\n  \"mode\": ";
  detail::append_json_string(out, mode_name(report.mode));
  out += ",\n  \"n_groups\": ";
  detail::append_integer(out, report.n_groups);
  out += ",\n  \"n_records\": ";
  detail::append_integer(out, report.n_records);
  out += ",\n  \"abscissae\": ";
  detail::append_number_array(out, report.curve.abscissae);
  out += ",\n  \"cumulative\": ";
  detail::append_number_array(out, report.curve.ordinates);
  out += ",\n  \"cumulative_normalized\": ";
  detail::append_number_array(out, report.normalized);
  out += ",\n  \"sigma\": ";
  detail::append_number_array(out, report.curve.sigma);
  out += ",\n  \"sigma_n\": ";
  detail::append_number(out, report.curve.sigma_n);
  out += ",\n  \"statistics\": {\"max_abs\": ";
  detail::append_number(out, report.summary.max_abs_stat);
  out += ", \"range\": ";
  detail::append_number(out, report.summary.range_stat);
  out += ", \"p_max_abs_asymptotic\": ";
  detail::append_number(out, report.summary.p_max_abs_asymptotic);
  out += ", \"p_max_abs_mc\": ";
  detail::append_number(out, report.summary.p_max_abs_mc);
  out += ", \"p_range_mc\": ";
  detail::append_number(out, report.summary.p_range_mc);
  out += ", \"mc_trials\": ";
  detail::append_integer(out, report.summary.mc_trials);
  out += ", \"seed\": ";
  detail::append_integer(out, report.summary.mc_seed);
  out += "},\n  \"provenance\": {\"input\": ";
  detail::append_json_string(out, report.provenance.input_file);
  out += ", \"full_population\": ";
  if (report.provenance.full_population_file.empty()) {
    out += "null";
  } else {
    detail::append_json_string(out, report.provenance.full_population_file);
  }
  out += ", \"tool_version\": ";
  detail::append_json_string(out, report.provenance.tool_version);
  out += "}\n}\n";
  return out;
}

// Reads a report back from its JSON form (the baseline overlay is not part
// of the format). Unknown or missing keys raise.
inline AnalysisReport parse_report(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  AnalysisReport report;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "calibration") {
    report.mode = Mode::calibration;
  } else if (mode == "subpopulation") {
    report.mode = Mode::subpopulation;
  } else {
    throw std::runtime_error("unknown mode: " + mode);
  }
  report.n_groups = j.at("n_groups").get<std::size_t>();
  report.n_records = j.at("n_records").get<std::size_t>();
  report.curve.abscissae = j.at("abscissae").get<std::vector<double>>();
  report.curve.ordinates = j.at("cumulative").get<std::vector<double>>();
  report.normalized = j.at("cumulative_normalized").get<std::vector<double>>();
  report.curve.sigma = j.at("sigma").get<std::vector<double>>();
  report.curve.sigma_n = j.at("sigma_n").get<double>();
  const nlohmann::json& stats = j.at("statistics");
  report.summary.max_abs_stat = stats.at("max_abs").get<double>();
  report.summary.range_stat = stats.at("range").get<double>();
  report.summary.p_max_abs_asymptotic = stats.at("p_max_abs_asymptotic").get<double>();
  report.summary.p_max_abs_mc = stats.at("p_max_abs_mc").get<double>();
  report.summary.p_range_mc = stats.at("p_range_mc").get<double>();
  report.summary.mc_trials = stats.at("mc_trials").get<std::size_t>();
  report.summary.mc_seed = stats.at("seed").get<std::uint64_t>();
  const nlohmann::json& prov = j.at("provenance");
  report.provenance.input_file = prov.at("input").get<std::string>();
  if (!prov.at("full_population").is_null()) {
    report.provenance.full_population_file = prov.at("full_population").get<std::string>();
  }
  report.provenance.tool_version = prov.at("tool_version").get<std::string>();
  return report;
}

}  // namespace cumdiff
