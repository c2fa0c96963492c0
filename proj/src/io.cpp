#include "korea/io.hpp"

#include "korea/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace korea {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + " col " + std::to_string(col);
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double as_double(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

std::vector<double> as_doubles(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_double(v));
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = as_doubles(j);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size()));
  for (Eigen::Index i = 0; i < rows; ++i) m.row(i) = vector_from(j.at(static_cast<std::size_t>(i))).transpose();
  return m;
}

void check_schema(const json& j, const std::string& kind) {
  if (j.value("schema_version", 0) != kSchemaVersion || j.value("kind", std::string()) != kind) {
    throw Error(ErrorCode::ParseError, "expected a '" + kind + "' document with schema_version " +
                                           std::to_string(kSchemaVersion));
  }
}

json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

/// Reads a CSV with a header into named columns of strings.
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    const std::vector<std::string>& expected_header) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || split_commas(line) != expected_header) {
    throw Error(ErrorCode::ParseError, path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_commas(line));
    if (rows.back().size() != expected_header.size()) throw Error(ErrorCode::RaggedRows, path.string());
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
  }
  return v;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + s + "' (expected csv or json)");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix) {
  auto out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

CsvTable parse_csv(std::istream& in, bool has_header, std::optional<std::size_t> label_column) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (header_pending) {
      header_pending = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!label_column || c != *label_column) table.header.push_back(cells[c]);
      }
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                             " columns, expected " + std::to_string(width));
    }
    if (label_column && *label_column >= width) {
      throw Error(ErrorCode::ParseError, "label column " + std::to_string(*label_column + 1) + " out of range");
    }
    std::vector<double> values;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      try {
        v = parse_double(cells[c]);
      } catch (const Error&) {
        throw Error(ErrorCode::ParseError, location(line_no, c + 1) + ": cannot parse '" + cells[c] + "'");
      }
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, location(line_no, c + 1));
      if (label_column && c == *label_column) {
        if (v != std::floor(v) || v < 1.0) {
          throw Error(ErrorCode::ParseError, location(line_no, c + 1) + ": labels must be positive integers");
        }
        labels.push_back(static_cast<int>(v) - 1);
      } else {
        values.push_back(v);
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  if (d == 0) throw Error(ErrorCode::ParseError, "no feature columns");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < d; ++c) m(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  table.data = Dataset(std::move(m));
  if (label_column) table.labels = std::move(labels);
  return table;
}

CsvTable load_csv(const std::filesystem::path& path, bool has_header, std::optional<std::size_t> label_column) {
  std::istringstream in(read_text(path));
  try {
    return parse_csv(in, has_header, label_column);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()));
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, const std::optional<std::vector<int>>& labels) {
  std::ostringstream out;
  for (Eigen::Index c = 0; c < data.dim(); ++c) out << (c ? "," : "") << "x" << (c + 1);
  if (labels) out << ",label";
  out << "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.dim(); ++c) out << (c ? "," : "") << format_double(data.values()(i, c));
    if (labels) out << "," << (*labels)[static_cast<std::size_t>(i)] + 1;
    out << "\n";
  }
  write_text(path, out.str());
}

void emit_posterior(const ModelOrderPosterior& post, const std::filesystem::path& path, Format format) {
  if (format == Format::csv) {
    std::ostringstream out;
    out << "K,log_score,prob\n";
    for (std::size_t i = 0; i < post.k_values.size(); ++i) {
      out << post.k_values[i] << "," << format_double(post.log_scores[i]) << "," << format_double(post.probs[i]) << "\n";
    }
    write_text(path, out.str());
    return;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "model_order_posterior";
  j["k_max"] = post.k_max_requested;
  j["k_star"] = post.k_star;
  j["k_values"] = post.k_values;
  j["log_scores"] = json::array();
  j["probs"] = json::array();
  for (std::size_t i = 0; i < post.k_values.size(); ++i) {
    j["log_scores"].push_back(number(post.log_scores[i]));
    j["probs"].push_back(number(post.probs[i]));
  }
  j["diagnostics"] = json::array();
  for (const auto& d : post.diagnostics) {
    j["diagnostics"].push_back({{"k", d.k},
                                {"log_score", number(d.log_score)},
                                {"log_joint", number(d.log_joint)},
                                {"log_prior", number(d.log_prior)},
                                {"log_q", number(d.log_q)},
                                {"elbo", number(d.elbo)},
                                {"iterations", d.iterations},
                                {"restart", d.restart},
                                {"fallbacks", d.fallbacks}});
  }
  write_text(path, j.dump(2) + "\n");
}

ModelOrderPosterior read_posterior(const std::filesystem::path& path, Format format) {
  ModelOrderPosterior post;
  if (format == Format::csv) {
    for (const auto& row : read_csv_rows(path, {"K", "log_score", "prob"})) {
      post.k_values.push_back(static_cast<int>(parse_double(row[0])));
      post.log_scores.push_back(parse_double(row[1]));
      post.probs.push_back(parse_double(row[2]));
    }
    post.k_max_requested = static_cast<int>(post.k_values.size());
    if (!post.probs.empty()) {
      post.k_star = post.k_values[static_cast<std::size_t>(
          std::max_element(post.probs.begin(), post.probs.end()) - post.probs.begin())];
    }
    return post;
  }
  const json j = parse_json_file(path);
  check_schema(j, "model_order_posterior");
  post.k_max_requested = j.at("k_max").get<int>();
  post.k_star = j.at("k_star").get<int>();
  post.k_values = j.at("k_values").get<std::vector<int>>();
  post.log_scores = as_doubles(j.at("log_scores"));
  post.probs = as_doubles(j.at("probs"));
  for (const auto& d : j.at("diagnostics")) {
    KoreaScore s;
    s.k = d.at("k").get<int>();
    s.log_score = as_double(d.at("log_score"));
    s.log_joint = as_double(d.at("log_joint"));
    s.log_prior = as_double(d.at("log_prior"));
    s.log_q = as_double(d.at("log_q"));
    s.elbo = as_double(d.at("elbo"));
    s.iterations = d.at("iterations").get<int>();
    s.restart = d.at("restart").get<int>();
    s.fallbacks = d.at("fallbacks").get<std::vector<std::string>>();
    post.diagnostics.push_back(std::move(s));
  }
  return post;
}

void emit_curve(const CriterionCurve& curve, const std::filesystem::path& path, Format format) {
  if (format == Format::csv) {
    std::ostringstream out;
    out << "K,loglik,params,aic,bic\n";
    for (const auto& r : curve.rows) {
      out << r.k << "," << format_double(r.loglik) << "," << r.params << "," << format_double(r.aic) << ","
          << format_double(r.bic) << "\n";
    }
    write_text(path, out.str());
    return;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "criterion_curve";
  j["aic_k_star"] = curve.aic_k_star;
  j["bic_k_star"] = curve.bic_k_star;
  j["rows"] = json::array();
  for (const auto& r : curve.rows) {
    j["rows"].push_back({{"k", r.k},
                         {"loglik", number(r.loglik)},
                         {"params", r.params},
                         {"aic", number(r.aic)},
                         {"bic", number(r.bic)}});
  }
  write_text(path, j.dump(2) + "\n");
}

CriterionCurve read_curve(const std::filesystem::path& path, Format format) {
  CriterionCurve curve;
  if (format == Format::csv) {
    for (const auto& row : read_csv_rows(path, {"K", "loglik", "params", "aic", "bic"})) {
      curve.rows.push_back({static_cast<int>(parse_double(row[0])), parse_double(row[1]),
                            static_cast<long>(parse_double(row[2])), parse_double(row[3]), parse_double(row[4])});
    }
    auto argmin = [&](auto field) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < curve.rows.size(); ++i) {
        if (field(curve.rows[i]) < field(curve.rows[best])) best = i;
      }
      return curve.rows.empty() ? 0 : curve.rows[best].k;
    };
    curve.aic_k_star = argmin([](const CriterionRow& r) { return r.aic; });
    curve.bic_k_star = argmin([](const CriterionRow& r) { return r.bic; });
    return curve;
  }
  const json j = parse_json_file(path);
  check_schema(j, "criterion_curve");
  curve.aic_k_star = j.at("aic_k_star").get<int>();
  curve.bic_k_star = j.at("bic_k_star").get<int>();
  for (const auto& r : j.at("rows")) {
    curve.rows.push_back({r.at("k").get<int>(), as_double(r.at("loglik")), r.at("params").get<long>(),
                          as_double(r.at("aic")), as_double(r.at("bic"))});
  }
  return curve;
}

void emit_model_json(const ModelExport& model, const std::filesystem::path& path) {
  const auto& p = model.params;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "gmm_model";
  j["d"] = p.dim();
  j["K"] = p.components();
  j["weights"] = vector_json(p.weights);
  j["means"] = json::array();
  j["precisions"] = json::array();
  for (int k = 0; k < p.components(); ++k) {
    j["means"].push_back(vector_json(p.means[static_cast<std::size_t>(k)]));
    j["precisions"].push_back(matrix_json(p.precisions[static_cast<std::size_t>(k)]));
  }
  json diag;
  if (model.elbo) diag["elbo"] = number(*model.elbo);
  if (model.loglik) diag["loglik"] = number(*model.loglik);
  diag["iterations"] = model.iterations;
  diag["fallbacks"] = model.fallbacks;
  j["diagnostics"] = diag;
  write_text(path, j.dump(2) + "\n");
}

ModelExport read_model_json(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  check_schema(j, "gmm_model");
  ModelExport m;
  m.params.weights = vector_from(j.at("weights"));
  for (const auto& mu : j.at("means")) m.params.means.push_back(vector_from(mu));
  for (const auto& q : j.at("precisions")) m.params.precisions.push_back(matrix_from(q));
  if (m.params.components() != j.at("K").get<int>() || m.params.dim() != j.at("d").get<Eigen::Index>()) {
    throw Error(ErrorCode::ParseError, path.string() + ": d/K disagree with the arrays");
  }
  const auto& diag = j.at("diagnostics");
  if (diag.contains("elbo")) m.elbo = as_double(diag.at("elbo"));
  if (diag.contains("loglik")) m.loglik = as_double(diag.at("loglik"));
  m.iterations = diag.at("iterations").get<int>();
  m.fallbacks = diag.at("fallbacks").get<std::vector<std::string>>();
  return m;
}

}  // namespace korea
