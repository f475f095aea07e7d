#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace musent {

/// A header-keyed table read from comma- or tab-separated text.
///
/// Fields may be double-quoted ("a, b" or "say ""hi"""). Blank lines are
/// skipped. Header names are trimmed and lowercased; cell values are trimmed.
struct DelimitedTable {
  char delimiter = ',';
  std::vector<std::string> header;
  struct Row {
    std::size_t line = 0;  // 1-based line in the source
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads `path`. When `delimiter` is not given it is tab if the header line
/// contains one and comma otherwise. Throws IoError if the file cannot be
/// opened and ParseError on a ragged row or an unterminated quote.
DelimitedTable read_delimited(const std::filesystem::path& path,
                              std::optional<char> delimiter = std::nullopt);
DelimitedTable parse_delimited(std::string_view text, std::optional<char> delimiter,
                               std::string_view source_name = "<memory>");

/// Quotes `field` if it contains the delimiter, a quote or a newline.
std::string escape_field(std::string_view field, char delimiter);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Parses a finite double, rejecting trailing garbage.
std::optional<double> parse_double(std::string_view s);

}  // namespace musent
