#pragma once

#include "korea/dataset.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace korea {

/// One-dimensional benchmark data sets compiled into the library from data/.
struct RealDataset {
  std::string name;
  std::vector<double> values;
  std::size_t expected_count = 0;
  std::string source;

  Dataset as_dataset() const;
};

struct BuiltinInfo {
  std::string name;
  std::size_t expected_count = 0;
  bool available = false;  // false when the data file was not vendored
  std::string source;
};

std::vector<BuiltinInfo> list_builtin();

/// Throws UnknownDataset for an unrecognized name, DatasetUnavailable when the
/// numbers were not vendored, CountMismatch when the vendored file is corrupt.
RealDataset load_builtin(std::string_view name);

/// Parses the vendored text format: '#' comments, one value per line.
std::vector<double> parse_value_list(std::string_view text);

}  // namespace korea
