#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cumdiff/dataset.hpp"

namespace cumdiff {

// Which header names hold the three fields. An empty weight column name
// means the file carries no weights and every record gets weight 1 (the
// unweighted case).
struct ColumnSpec {
  std::string score_column = "score";
  std::string response_column = "response";
  std::string weight_column;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line_no, std::string_view column) {
  std::string_view body = field;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse '" << std::string(field)
        << "' as a number (column '" << std::string(column) << "')";
    throw std::runtime_error(msg.str());
  }
  return value;
}

inline std::size_t find_column(const std::vector<std::string_view>& header,
                               const std::string& name) {
  std::size_t found = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      if (found != header.size()) {
        throw std::runtime_error("column '" + name + "' appears more than once in the header");
      }
      found = i;
    }
  }
  if (found == header.size()) {
    throw std::runtime_error("column '" + name + "' not found in header");
  }
  return found;
}

}  // namespace detail

// Parses comma-separated text (first line is the header, '.' decimal
// separator, scientific notation accepted) into records in file order.
// Lines are numbered from 1 including the header, so diagnostics match
// what an editor shows.
inline std::vector<ScoredRecord> parse_records(std::string_view text, const ColumnSpec& spec) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t score_idx = 0, response_idx = 0, weight_idx = 0;
  std::size_t n_columns = 0;
  const bool has_weight = !spec.weight_column.empty();
  std::vector<ScoredRecord> records;

  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (detail::trim(raw).empty()) continue;

    const std::vector<std::string_view> fields = detail::split_fields(raw);
    if (!have_header) {
      score_idx = detail::find_column(fields, spec.score_column);
      response_idx = detail::find_column(fields, spec.response_column);
      if (has_weight) weight_idx = detail::find_column(fields, spec.weight_column);
      n_columns = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != n_columns) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << n_columns << " fields, got " << fields.size();
      throw std::runtime_error(msg.str());
    }
    ScoredRecord rec;
    rec.score = detail::parse_number(fields[score_idx], line_no, spec.score_column);
    rec.response = detail::parse_number(fields[response_idx], line_no, spec.response_column);
    rec.weight =
        has_weight ? detail::parse_number(fields[weight_idx], line_no, spec.weight_column) : 1.0;
    records.push_back(rec);
  }
  if (!have_header) {
    throw std::runtime_error("input has no header line");
  }
  return records;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace cumdiff
