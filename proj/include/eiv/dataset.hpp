#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

namespace eiv {

/// n paired observations (y1_i, y2_i), row order preserved.
struct Dataset {
  std::vector<double> y1;
  std::vector<double> y2;

  std::size_t size() const noexcept { return y1.size(); }

  void push_back(double a, double b) {
    y1.push_back(a);
    y2.push_back(b);
  }

  /// The same observations with the coordinates interchanged.
  Dataset swapped() const { return Dataset{y2, y1}; }
};

/// Two numeric columns, comma- or whitespace-delimited, with an optional
/// single header line. Blank lines and lines starting with '#' are ignored.
/// Throws ParseError (with the offending line) or Error(TooFewPoints) when
/// fewer than `min_points` rows are present.
Dataset parse_dataset(std::string_view text, std::size_t min_points = 3);

Dataset read_dataset(const std::filesystem::path& path, std::size_t min_points = 3);

}  // namespace eiv
