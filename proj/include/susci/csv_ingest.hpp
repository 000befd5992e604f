#pragma once

// CSV ingestion for raw questionnaire responses or pre-computed scores.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "susci/sus_core.hpp"

namespace susci {

enum class InputMode { RawResponses, PreScored };

// Rows of an RFC 4180 document (quoted fields, "" escapes, CRLF or LF).
// Blank lines are dropped. Throws ValidationError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct IngestOptions {
  InputMode mode = InputMode::RawResponses;
  // File columns holding Q1..Q10 (or the score column in pre-scored mode),
  // given as 1-based indices or header names. Empty: columns in file order.
  std::vector<std::string> columns;
  // Item dropped from nine-item files when the header does not name it.
  int omitted_item = 8;
};

struct InputFile {
  InputMode mode = InputMode::RawResponses;
  std::vector<ResponseSheet> sheets;  // RawResponses
  std::vector<double> scores;         // PreScored
  std::optional<std::vector<std::string>> header;
  std::string source;

  std::size_t rows() const noexcept {
    return mode == InputMode::RawResponses ? sheets.size() : scores.size();
  }
};

// All-or-nothing: every problem is collected into one ValidationError with
// 1-based data-row and file-column coordinates.
InputFile ingest_csv_text(std::string_view text, const IngestOptions& options,
                          std::string source = "<memory>");
InputFile ingest_csv(const std::filesystem::path& path, const IngestOptions& options = {});

std::vector<double> input_scores(const InputFile& input, ScoreOptions options = {});

// "3,4,5" or "Q1,Q2" -> tokens.
std::vector<std::string> split_columns_flag(std::string_view flag);

}  // namespace susci
