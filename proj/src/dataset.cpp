#include "eiv/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "eiv/error.hpp"

namespace eiv {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  const bool comma = line.find(',') != std::string_view::npos;
  while (i <= line.size()) {
    if (comma) {
      const std::size_t end = std::min(line.find(',', i), line.size());
      fields.push_back(line.substr(i, end - i));
      i = end + 1;
    } else {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t end = i;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      fields.push_back(line.substr(i, end - i));
      i = end;
    }
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

Dataset parse_dataset(std::string_view text, std::size_t min_points) {
  Dataset data;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_fields(line);
    double a = 0.0;
    double b = 0.0;
    const bool numeric = fields.size() == 2 && parse_number(fields[0], a) && parse_number(fields[1], b);
    if (!numeric) {
      // Only the first non-blank line may be a header, and only if none of
      // its cells parse as numbers.
      if (!seen_content) {
        seen_content = true;
        bool any_number = false;
        for (auto f : fields) {
          double ignored = 0.0;
          any_number = any_number || parse_number(f, ignored);
        }
        if (!any_number) continue;
      }
      if (fields.size() != 2) {
        throw ParseError(line_no, "expected 2 columns, found " + std::to_string(fields.size()));
      }
      throw ParseError(line_no, "non-numeric value in '" + std::string(line) + "'");
    }
    seen_content = true;
    data.push_back(a, b);
  }
  if (data.size() < min_points) {
    fail(ErrorCode::TooFewPoints, "dataset has " + std::to_string(data.size()) +
                                      " rows; at least " + std::to_string(min_points) +
                                      " are required");
  }
  return data;
}

Dataset read_dataset(const std::filesystem::path& path, std::size_t min_points) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open input file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), min_points);
}

}  // namespace eiv
