#pragma once

#include "korea/dataset.hpp"
#include "korea/em_gmm.hpp"
#include "korea/model_select.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace korea {

struct CsvTable {
  Dataset data;
  std::optional<std::vector<int>> labels;  // 0-based; the file stores 1-based labels
  std::vector<std::string> header;         // feature column names, empty without a header row
};

/// Comma-separated numeric table. Rows are reported 1-based by file line,
/// columns 1-based. `label_column` is a 0-based column index.
CsvTable parse_csv(std::istream& in, bool has_header, std::optional<std::size_t> label_column = std::nullopt);
CsvTable load_csv(const std::filesystem::path& path, bool has_header,
                  std::optional<std::size_t> label_column = std::nullopt);

/// Writes a header row (x1..xd[,label]) then shortest round-trip decimals.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::optional<std::vector<int>>& labels = std::nullopt);

/// Shortest decimal that reads back to the same double; inf/nan spelled
/// "inf", "-inf", "nan".
std::string format_double(double v);
double parse_double(const std::string& s);

enum class Format { csv, json };
Format parse_format(const std::string& s);

inline constexpr int kSchemaVersion = 1;

void emit_posterior(const ModelOrderPosterior& post, const std::filesystem::path& path, Format format);
ModelOrderPosterior read_posterior(const std::filesystem::path& path, Format format);

void emit_curve(const CriterionCurve& curve, const std::filesystem::path& path, Format format);
CriterionCurve read_curve(const std::filesystem::path& path, Format format);

struct ModelExport {
  GmmParams params;
  std::optional<double> elbo;
  std::optional<double> loglik;
  int iterations = 0;
  std::vector<std::string> fallbacks;
};

void emit_model_json(const ModelExport& model, const std::filesystem::path& path);
ModelExport read_model_json(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// `<dir>/<stem><suffix><ext>`; used for sibling outputs.
std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix);

}  // namespace korea
