#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pwts/errors.hpp"

namespace pwts {

/// Observations stored row-major. The final column is the dependent variable,
/// the first k columns are explanatory.
class DataTable {
 public:
  DataTable() = default;

  DataTable(std::vector<std::string> column_names, std::vector<double> cells)
      : names_(std::move(column_names)), cells_(std::move(cells)) {
    const std::size_t cols = names_.size();
    if (cols < 2) throw std::invalid_argument("a table needs at least one explanatory column");
    if (cells_.size() % cols != 0) throw std::invalid_argument("cell count is not a multiple of the column count");
    if (points() < cols + 1) throw std::invalid_argument("a table needs at least k+2 rows");
    for (double v : cells_)
      if (!std::isfinite(v)) throw std::invalid_argument("table cells must be finite");
  }

  std::size_t points() const noexcept { return names_.empty() ? 0 : cells_.size() / names_.size(); }
  std::size_t explanatory() const noexcept { return names_.empty() ? 0 : names_.size() - 1; }
  std::size_t columns() const noexcept { return names_.size(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {cells_.data() + i * columns(), columns()};
  }
  double at(std::size_t i, std::size_t col) const noexcept { return cells_[i * columns() + col]; }
  double y(std::size_t i) const noexcept { return at(i, explanatory()); }

  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const std::vector<double>& cells() const noexcept { return cells_; }

  friend bool operator==(const DataTable&, const DataTable&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> cells_;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

inline void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// Parses a header line followed by numeric rows. Cells are tab separated when the
/// header contains a tab, otherwise comma separated.
inline DataTable parse_table(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = end + 1;
    }
  }
  // Trailing blank lines carry no data (spreadsheet pastes often end with several).
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(ParseError::Kind::EmptyInput, 0, 0, "input is empty");

  const std::string_view header = lines.front();
  const char delim = header.find('\t') != std::string_view::npos ? '\t' : ',';
  std::vector<std::string> names;
  for (auto cell : detail::split(header, delim)) names.emplace_back(detail::trim(cell));
  if (names.size() < 2)
    throw ParseError(ParseError::Kind::TooFewColumns, 1, 0,
                     "line 1: need at least one explanatory column and one dependent column");

  const std::size_t cols = names.size();
  std::vector<double> cells;
  cells.reserve((lines.size() - 1) * cols);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto parts = detail::split(lines[li], delim);
    if (parts.size() != cols)
      throw ParseError(ParseError::Kind::RaggedRows, line_no, 0,
                       "line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                           " cells, found " + std::to_string(parts.size()));
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!detail::parse_double(parts[c], v))
        throw ParseError(ParseError::Kind::NonNumericCell, line_no, c + 1,
                         "line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                             ": '" + std::string(detail::trim(parts[c])) + "' is not a finite number");
      cells.push_back(v);
    }
  }
  const std::size_t m = cells.size() / cols;
  if (m < cols + 1)
    throw ParseError(ParseError::Kind::TooFewRows, lines.size(), 0,
                     "need at least " + std::to_string(cols + 1) + " data rows for " +
                         std::to_string(cols - 1) + " explanatory column(s), found " + std::to_string(m));
  return DataTable(std::move(names), std::move(cells));
}

/// Tab-separated text with a header row and shortest round-trip decimals.
inline std::string serialize_table(const DataTable& table) {
  std::string out;
  const auto& names = table.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += '\t';
    out += names[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < table.points(); ++i) {
    const auto r = table.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += '\t';
      detail::append_double(out, r[c]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

/// Forward map u = (v - offset) / span per column.
struct NormalizationParams {
  std::vector<double> offset;
  std::vector<double> span;

  double forward(std::size_t col, double v) const { return (v - offset[col]) / span[col]; }
  double inverse(std::size_t col, double u) const { return offset[col] + span[col] * u; }
};

class NormalizedTable {
 public:
  NormalizedTable() = default;
  NormalizedTable(std::vector<std::string> names, std::vector<double> cells, NormalizationParams params)
      : names_(std::move(names)), cells_(std::move(cells)), params_(std::move(params)) {}

  std::size_t points() const noexcept { return names_.empty() ? 0 : cells_.size() / names_.size(); }
  std::size_t explanatory() const noexcept { return names_.empty() ? 0 : names_.size() - 1; }
  std::size_t columns() const noexcept { return names_.size(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {cells_.data() + i * columns(), columns()};
  }
  double at(std::size_t i, std::size_t col) const noexcept { return cells_[i * columns() + col]; }
  double y(std::size_t i) const noexcept { return at(i, explanatory()); }

  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const std::vector<double>& cells() const noexcept { return cells_; }
  const NormalizationParams& params() const noexcept { return params_; }

  /// The rows listed in `members`, in that order, sharing this table's parameters.
  NormalizedTable subset(std::span<const std::size_t> members) const {
    std::vector<double> cells;
    cells.reserve(members.size() * columns());
    for (std::size_t i : members) {
      const auto r = row(i);
      cells.insert(cells.end(), r.begin(), r.end());
    }
    return NormalizedTable(names_, std::move(cells), params_);
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> cells_;
  NormalizationParams params_;
};

/// Min-max scaling of every column onto [0,1]. Constant columns map to 0.5 with span 1.
inline NormalizedTable normalize(const DataTable& table) {
  const std::size_t cols = table.columns();
  const std::size_t m = table.points();
  NormalizationParams params;
  params.offset.resize(cols);
  params.span.resize(cols);
  std::vector<bool> constant(cols, false);
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = table.at(0, c), hi = lo;
    for (std::size_t i = 1; i < m; ++i) {
      lo = std::min(lo, table.at(i, c));
      hi = std::max(hi, table.at(i, c));
    }
    if (hi > lo) {
      params.offset[c] = lo;
      params.span[c] = hi - lo;
    } else {
      params.offset[c] = lo - 0.5;
      params.span[c] = 1.0;
      constant[c] = true;
    }
  }
  std::vector<double> cells(m * cols);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      const double u = constant[c] ? 0.5 : params.forward(c, table.at(i, c));
      cells[i * cols + c] = std::clamp(u, 0.0, 1.0);
    }
  return NormalizedTable(table.column_names(), std::move(cells), std::move(params));
}

/// Maps normalized rows back to original units.
inline DataTable denormalize(const NormalizedTable& table) {
  std::vector<double> cells(table.cells().size());
  const std::size_t cols = table.columns();
  for (std::size_t i = 0; i < table.points(); ++i)
    for (std::size_t c = 0; c < cols; ++c) cells[i * cols + c] = table.params().inverse(c, table.at(i, c));
  return DataTable(table.column_names(), std::move(cells));
}

}  // namespace pwts
