#include "korea/builtin.hpp"

#include "korea/errors.hpp"
#include "korea/io.hpp"

#include <array>
#include <string>

namespace korea {

namespace detail {
extern const std::string_view kGalaxyText;
extern const std::string_view kEnzymeText;
extern const std::string_view kAcidityText;
}  // namespace detail

namespace {

struct Entry {
  std::string_view name;
  std::size_t expected_count;
  const std::string_view* text;
  std::string_view source;
};

const std::array<Entry, 3>& registry() {
  static const std::array<Entry, 3> entries{{
      {"enzyme", 245, &detail::kEnzymeText, "Bechtel et al. (1993), enzymatic activity in the blood of 245 individuals"},
      {"acidity", 155, &detail::kAcidityText, "Crawford et al. (1992), acidity index of 155 lakes in the Northeastern US"},
      {"galaxy", 82, &detail::kGalaxyText, "Roeder (1990), velocities of 82 galaxies (MASS::galaxies)"},
  }};
  return entries;
}

bool has_values(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') return true;
    pos = end + 1;
  }
  return false;
}

}  // namespace

Dataset RealDataset::as_dataset() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return Dataset(std::move(m));
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      out.push_back(parse_double(line.substr(first, last - first + 1)));
    } catch (const Error&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + line + "'");
    }
  }
  return out;
}

std::vector<BuiltinInfo> list_builtin() {
  std::vector<BuiltinInfo> out;
  for (const auto& e : registry()) {
    out.push_back({std::string(e.name), e.expected_count, has_values(*e.text), std::string(e.source)});
  }
  return out;
}

RealDataset load_builtin(std::string_view name) {
  for (const auto& e : registry()) {
    if (e.name != name) continue;
    if (!has_values(*e.text)) {
      throw Error(ErrorCode::DatasetUnavailable,
                  std::string(name) + " was not vendored (add data/" + std::string(name) + ".txt and reconfigure)");
    }
    RealDataset ds;
    ds.name = std::string(e.name);
    ds.expected_count = e.expected_count;
    ds.source = std::string(e.source);
    ds.values = parse_value_list(*e.text);
    if (ds.values.size() != ds.expected_count) {
      throw Error(ErrorCode::CountMismatch, ds.name + " has " + std::to_string(ds.values.size()) + " values, expected " +
                                                std::to_string(ds.expected_count));
    }
    return ds;
  }
  throw Error(ErrorCode::UnknownDataset, "'" + std::string(name) + "' (known: enzyme, acidity, galaxy)");
}

}  // namespace korea
