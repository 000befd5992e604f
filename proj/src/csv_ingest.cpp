#include "susci/csv_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "susci/errors.hpp"

namespace susci {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::optional<double> parse_real(const std::string& cell) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || p != end || cell.empty()) return std::nullopt;
  return v;
}

std::optional<int> parse_int(const std::string& cell) {
  int v = 0;
  const char* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || p != end || cell.empty()) return std::nullopt;
  return v;
}

bool is_blank_row(const std::vector<std::string>& row) {
  return std::all_of(row.begin(), row.end(), [](const std::string& c) { return trim(c).empty(); });
}

// Q-number named by a header cell such as "Q7" or "q7", else 0.
int header_item(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.size() < 2 || (t[0] != 'Q' && t[0] != 'q')) return 0;
  auto n = parse_int(t.substr(1));
  return n && *n >= 1 && *n <= 10 ? *n : 0;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;

  auto end_row = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    if (!is_blank_row(row)) rows.push_back(std::move(row));
    row.clear();
    cell_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell_started || trim(cell).empty()) {
          cell.clear();
          quoted = true;
          quote_line = line;
        } else {
          cell += c;
        }
        cell_started = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        cell_started = false;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) {
    throw ValidationError(fmt::format("unterminated quoted field starting on line {}", quote_line),
                          {0, 0, "csv", "unterminated quoted field"});
  }
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<std::string> split_columns_flag(std::string_view flag) {
  std::vector<std::string> out;
  std::string current;
  for (char c : flag) {
    if (c == ',') {
      out.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!trim(current).empty() || !out.empty()) out.push_back(trim(current));
  return out;
}

InputFile ingest_csv_text(std::string_view text, const IngestOptions& options,
                          std::string source) {
  InputFile input;
  input.mode = options.mode;
  input.source = std::move(source);
  auto rows = parse_csv(text);
  std::vector<ValidationIssue> issues;

  // A first row containing any non-numeric cell is a header.
  std::size_t first_data = 0;
  if (!rows.empty()) {
    const bool header = std::any_of(rows[0].begin(), rows[0].end(), [](const std::string& c) {
      return !parse_real(trim(c)).has_value();
    });
    if (header) {
      std::vector<std::string> names;
      for (const auto& c : rows[0]) names.push_back(trim(c));
      input.header = std::move(names);
      first_data = 1;
    }
  }
  if (rows.size() == first_data) {
    throw ValidationError({{0, 0, "data", "file contains no data rows"}});
  }

  // Resolve which file columns to read.
  std::vector<std::size_t> cols;  // 0-based
  for (const auto& token : options.columns) {
    if (auto idx = parse_int(token); idx && *idx >= 1) {
      cols.push_back(static_cast<std::size_t>(*idx - 1));
      continue;
    }
    bool found = false;
    if (input.header) {
      const auto& h = *input.header;
      auto it = std::find(h.begin(), h.end(), token);
      if (it != h.end()) {
        cols.push_back(static_cast<std::size_t>(it - h.begin()));
        found = true;
      }
    }
    if (!found) {
      throw ValidationError(
          {{0, 0, "columns", fmt::format("column '{}' is not an index or header name", token)}});
    }
  }
  const std::size_t width = rows[first_data].size();
  if (cols.empty()) {
    for (std::size_t c = 0; c < width; ++c) cols.push_back(c);
  }

  if (options.mode == InputMode::PreScored) {
    if (cols.size() != 1) {
      throw ValidationError({{0, 0, "columns",
                              fmt::format("pre-scored files need exactly one score column, found {}",
                                          cols.size())}});
    }
    for (std::size_t r = first_data; r < rows.size(); ++r) {
      const std::size_t data_row = r - first_data + 1;
      const auto& row = rows[r];
      if (cols[0] >= row.size()) {
        issues.push_back({data_row, cols[0] + 1, "score",
                          fmt::format("row {}: missing score column {}", data_row, cols[0] + 1)});
        continue;
      }
      const std::string cell = trim(row[cols[0]]);
      auto v = parse_real(cell);
      if (!v) {
        issues.push_back({data_row, cols[0] + 1, "score",
                          fmt::format("row {}, column score: '{}' is not a number", data_row, cell)});
      } else if (!(*v >= kScoreMin && *v <= kScoreMax)) {
        issues.push_back({data_row, cols[0] + 1, "score",
                          fmt::format("row {}, column score: value {} outside 0..100", data_row, cell)});
      } else {
        input.scores.push_back(*v);
      }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return input;
  }

  // Raw responses: 10 items, or 9 with one item omitted uniformly.
  const std::size_t items = cols.size();
  if (items != 10 && items != 9) {
    throw ValidationError({{0, 0, "columns",
                            fmt::format("expected 10 (or 9) response columns, found {}", items)}});
  }
  // Q-number for each selected column, in order.
  std::vector<int> item_of(items);
  int omitted = 0;
  if (items == 10) {
    for (std::size_t k = 0; k < items; ++k) item_of[k] = static_cast<int>(k) + 1;
  } else {
    omitted = options.omitted_item;
    if (input.header) {
      std::vector<bool> seen(11, false);
      for (std::size_t c : cols) {
        if (c < input.header->size()) {
          if (int q = header_item((*input.header)[c])) seen[q] = true;
        }
      }
      if (std::count(seen.begin() + 1, seen.end(), true) == 9) {
        omitted = static_cast<int>(std::find(seen.begin() + 1, seen.end(), false) - seen.begin());
      }
    }
    if (omitted < 1 || omitted > 10) {
      throw ValidationError({{0, 0, "omitted_item",
                              fmt::format("omitted item {} outside 1..10", omitted)}});
    }
    int q = 1;
    for (std::size_t k = 0; k < items; ++k, ++q) {
      if (q == omitted) ++q;
      item_of[k] = q;
    }
  }

  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const std::size_t data_row = r - first_data + 1;
    const auto& row = rows[r];
    if (row.size() != width) {
      const bool mixed = (row.size() == 9 || row.size() == 10) && (width == 9 || width == 10);
      issues.push_back(
          {data_row, 0, "row",
           mixed ? fmt::format("row {}: {} cells but earlier rows have {} (mixed 9/10-item rows)",
                               data_row, row.size(), width)
                 : fmt::format("row {}: {} cells, expected {}", data_row, row.size(), width)});
      continue;
    }
    std::vector<int> answers;
    bool ok = true;
    for (std::size_t k = 0; k < items; ++k) {
      const std::size_t c = cols[k];
      const std::string field = fmt::format("Q{}", item_of[k]);
      if (c >= row.size()) {
        issues.push_back({data_row, c + 1, field,
                          fmt::format("row {}, column {}: missing", data_row, field)});
        ok = false;
        continue;
      }
      const std::string cell = trim(row[c]);
      auto v = parse_int(cell);
      if (!v) {
        issues.push_back({data_row, c + 1, field,
                          fmt::format("row {}, column {}: '{}' is not an integer 1..5", data_row,
                                      field, cell)});
        ok = false;
      } else if (*v < 1 || *v > 5) {
        issues.push_back({data_row, c + 1, field,
                          fmt::format("row {}, column {}: response {} outside 1..5", data_row,
                                      field, *v)});
        ok = false;
      } else {
        answers.push_back(*v);
      }
    }
    if (!ok) continue;
    input.sheets.push_back(items == 10 ? ResponseSheet::ten_item(std::move(answers), data_row)
                                       : ResponseSheet::nine_item(std::move(answers), omitted,
                                                                  data_row));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return input;
}

InputFile ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(fmt::format("cannot read {}", path.string()),
                          {0, 0, "file", fmt::format("cannot read {}", path.string())});
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ingest_csv_text(ss.str(), options, path.string());
}

std::vector<double> input_scores(const InputFile& input, ScoreOptions options) {
  if (input.mode == InputMode::PreScored) return input.scores;
  std::vector<double> out;
  for (const auto& s : score_sheets(input.sheets, options)) out.push_back(s.value);
  return out;
}

}  // namespace susci
