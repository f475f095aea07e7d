#include "musent/delimited.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "musent/errors.hpp"

namespace musent {

namespace {

// Splits one logical record starting at `pos`; advances `pos` past its line
// terminator. Quoted fields may span lines.
std::vector<std::string> next_record(std::string_view text, std::size_t& pos, char delim,
                                     std::size_t& line, std::string_view source) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool quoted_field = false;
  const std::size_t start_line = line;
  while (pos < text.size()) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      cur.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && trim(cur).empty()) {
      cur.clear();
      in_quotes = true;
      quoted_field = true;
      ++pos;
      continue;
    }
    if (c == delim) {
      fields.push_back(quoted_field ? cur : trim(cur));
      cur.clear();
      quoted_field = false;
      ++pos;
      continue;
    }
    if (c == '\r') {
      ++pos;
      continue;
    }
    if (c == '\n') {
      ++pos;
      ++line;
      fields.push_back(quoted_field ? cur : trim(cur));
      return fields;
    }
    cur.push_back(c);
    ++pos;
  }
  if (in_quotes) {
    throw ParseError(std::string(source) + ":" + std::to_string(start_line) + ": unterminated quote");
  }
  fields.push_back(quoted_field ? cur : trim(cur));
  ++line;
  return fields;
}

bool blank(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return f.empty(); });
}

}  // namespace

std::optional<std::size_t> DelimitedTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), to_lower(trim(name)));
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

DelimitedTable read_delimited(const std::filesystem::path& path, std::optional<char> delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_delimited(buf.str(), delimiter, path.string());
}

DelimitedTable parse_delimited(std::string_view text, std::optional<char> delimiter,
                               std::string_view source_name) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  DelimitedTable table;
  if (delimiter) {
    table.delimiter = *delimiter;
  } else {
    const auto eol = text.find('\n');
    const auto first = text.substr(0, eol);
    table.delimiter = first.find('\t') != std::string_view::npos ? '\t' : ',';
  }

  std::size_t pos = 0;
  std::size_t line = 1;
  while (pos < text.size()) {
    auto fields = next_record(text, pos, table.delimiter, line, source_name);
    if (blank(fields)) continue;
    for (auto& f : fields) f = to_lower(f);
    table.header = std::move(fields);
    break;
  }
  if (table.header.empty()) {
    throw ParseError(std::string(source_name) + ": missing header row");
  }

  while (pos < text.size()) {
    const std::size_t row_line = line;
    auto fields = next_record(text, pos, table.delimiter, line, source_name);
    if (blank(fields)) continue;
    if (fields.size() != table.header.size()) {
      throw ParseError(std::string(source_name) + ":" + std::to_string(row_line) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    table.rows.push_back({row_line, std::move(fields)});
  }
  return table;
}

std::string escape_field(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto end = s.find(sep, start);
    out.emplace_back(s.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace musent
