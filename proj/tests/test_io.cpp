#include <doctest.h>

#include "korea/builtin.hpp"
#include "korea/config.hpp"
#include "korea/datagen.hpp"
#include "korea/errors.hpp"
#include "korea/io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>

using namespace korea;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "korea_test_io";
  fs::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected korea::Error");
  return ErrorCode::InvalidArgument;
}

CsvTable parse(const std::string& text, bool header = false, std::optional<std::size_t> label = std::nullopt) {
  std::istringstream in(text);
  return parse_csv(in, header, label);
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto t = parse("1,2\n3,4");
  REQUIRE(t.data.size() == 2);
  REQUIRE(t.data.dim() == 2);
  CHECK(t.data.values()(0, 0) == 1.0);
  CHECK(t.data.values()(0, 1) == 2.0);
  CHECK(t.data.values()(1, 0) == 3.0);
  CHECK(t.data.values()(1, 1) == 4.0);

  try {
    parse("1,x\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("row 1 col 2") != std::string::npos);
  }
  CHECK(code_of([] { parse("1,2\n3\n"); }) == ErrorCode::RaggedRows);
  CHECK(code_of([] { parse("1,nan\n"); }) == ErrorCode::NonFinite);
  CHECK(code_of([] { parse("1,inf\n"); }) == ErrorCode::NonFinite);

  const auto labelled = parse("x1,x2,label\n0.5,1.5,2\n-1,2,1\r\n\n", true, 2);
  CHECK(labelled.header == std::vector<std::string>{"x1", "x2"});
  REQUIRE(labelled.labels.has_value());
  CHECK(*labelled.labels == std::vector<int>{1, 0});
  CHECK(labelled.data.dim() == 2);
}

TEST_CASE("csv round trip is bit-identical") {
  SynthConfig cfg;
  cfg.k_hat = 3;
  cfg.n = 500;
  cfg.seed = 8;
  const auto ds = sample_synthetic(cfg);
  const auto path = scratch("roundtrip.csv");
  write_csv(path, ds.data, ds.labels);
  const auto back = load_csv(path, true, 2);
  CHECK(back.data.values() == ds.data.values());
  CHECK(*back.labels == ds.labels);
}

TEST_CASE("double formatting") {
  for (double v : {0.1, -1e-300, 1.0 / 3.0, 123456789.123456789, 5e-324}) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(code_of([] { parse_format("xml"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("posterior export") {
  ModelOrderPosterior post;
  post.k_values = {1, 2, 3};
  post.log_scores = {-10.0, -9.0, -std::numeric_limits<double>::infinity()};
  const double z = std::log(std::exp(-10.0) + std::exp(-9.0));
  post.probs = {std::exp(-10.0 - z), std::exp(-9.0 - z), 0.0};
  post.k_star = 2;
  post.k_max_requested = 3;
  for (int k = 1; k <= 3; ++k) {
    KoreaScore s;
    s.k = k;
    s.log_score = post.log_scores[static_cast<std::size_t>(k - 1)];
    s.elbo = -8.5 - k;
    s.iterations = 10 * k;
    s.restart = k % 2;
    if (k == 3) s.fallbacks = {"weights: dirichlet mean"};
    post.diagnostics.push_back(s);
  }

  const auto csv = scratch("post.csv");
  emit_posterior(post, csv, Format::csv);
  const std::string text = read_text(csv);
  CHECK(text.rfind("K,log_score,prob\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  const auto from_csv = read_posterior(csv, Format::csv);
  CHECK(from_csv.k_values == post.k_values);
  CHECK(from_csv.log_scores == post.log_scores);
  CHECK(from_csv.probs == post.probs);
  CHECK(from_csv.k_star == 2);
  CHECK(std::abs(std::accumulate(from_csv.probs.begin(), from_csv.probs.end(), 0.0) - 1.0) < 1e-10);

  const auto json = scratch("post.json");
  emit_posterior(post, json, Format::json);
  const auto from_json = read_posterior(json, Format::json);
  CHECK(from_json.k_values == post.k_values);
  CHECK(from_json.log_scores == post.log_scores);
  CHECK(from_json.probs == post.probs);
  CHECK(from_json.k_star == post.k_star);
  CHECK(from_json.k_max_requested == post.k_max_requested);
  REQUIRE(from_json.diagnostics.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(from_json.diagnostics[i].elbo == post.diagnostics[i].elbo);
    CHECK(from_json.diagnostics[i].iterations == post.diagnostics[i].iterations);
    CHECK(from_json.diagnostics[i].restart == post.diagnostics[i].restart);
    CHECK(from_json.diagnostics[i].fallbacks == post.diagnostics[i].fallbacks);
  }
}

TEST_CASE("criterion curve export") {
  CriterionCurve curve;
  for (int k = 1; k <= 3; ++k) {
    const double ll = -100.0 + 7.25 * k;
    const long p = count_free_params(k, 2);
    curve.rows.push_back({k, ll, p, aic(ll, p), bic(ll, p, 100)});
  }
  curve.aic_k_star = 3;
  curve.bic_k_star = 1;
  for (auto format : {Format::csv, Format::json}) {
    const auto path = scratch(format == Format::csv ? "curve.csv" : "curve.json");
    emit_curve(curve, path, format);
    const auto back = read_curve(path, format);
    REQUIRE(back.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back.rows[i].loglik == curve.rows[i].loglik);
      CHECK(back.rows[i].params == curve.rows[i].params);
      CHECK(back.rows[i].aic == curve.rows[i].aic);
      CHECK(back.rows[i].bic == curve.rows[i].bic);
    }
    CHECK(back.aic_k_star == 3);
    CHECK(back.bic_k_star == 1);
  }
}

TEST_CASE("model json round trip") {
  SynthConfig cfg;
  cfg.k_hat = 2;
  cfg.n = 10;
  cfg.seed = 4;
  ModelExport m{sample_synthetic(cfg).true_params, -123.456, std::nullopt, 17, {"component 2: wishart mean"}};
  const auto path = scratch("model.json");
  emit_model_json(m, path);
  const auto back = read_model_json(path);
  CHECK(back.params.weights == m.params.weights);
  CHECK(back.params.means == m.params.means);
  CHECK(back.params.precisions == m.params.precisions);
  CHECK(back.elbo == m.elbo);
  CHECK(!back.loglik.has_value());
  CHECK(back.iterations == 17);
  CHECK(back.fallbacks == m.fallbacks);
}

TEST_CASE("io errors") {
  CHECK(code_of([] { read_text("/nonexistent/dir/file.csv"); }) == ErrorCode::IoError);
  CHECK(code_of([] { write_text("/nonexistent/dir/file.csv", "x"); }) == ErrorCode::IoError);
  const auto bad = scratch("bad.json");
  write_text(bad, "{\"kind\": \"something_else\"}");
  CHECK(code_of([&] { read_posterior(bad, Format::json); }) == ErrorCode::ParseError);
  CHECK(sibling_path("out/post.csv", "_criteria") == fs::path("out/post_criteria.csv"));
}

TEST_CASE("built-in data sets") {
  const auto galaxy = load_builtin("galaxy");
  CHECK(galaxy.values.size() == 82);
  CHECK(galaxy.expected_count == 82);
  CHECK(galaxy.as_dataset().dim() == 1);
  CHECK(galaxy.values.front() == 9172.0);
  CHECK(code_of([] { load_builtin("spiral"); }) == ErrorCode::UnknownDataset);

  for (const auto& info : list_builtin()) {
    if (info.available) {
      CHECK(load_builtin(info.name).values.size() == info.expected_count);
    } else {
      CHECK(code_of([&] { load_builtin(info.name); }) == ErrorCode::DatasetUnavailable);
    }
  }
  CHECK(parse_value_list("# note\n1\n2.5\n\n3\n") == std::vector<double>{1, 2.5, 3});
}

TEST_CASE("run configuration file") {
  const auto cfg = parse_run_config(R"({"hyper": {"alpha0": 0.5, "nu0": 6},
                                        "vb": {"restarts": 5},
                                        "synth": {"min_weight": 0.05, "dirichlet_alpha": 2}})");
  CHECK(cfg.hyper.alpha0 == 0.5);
  CHECK(cfg.hyper.nu0 == 6.0);
  CHECK(!cfg.hyper.beta0.has_value());
  CHECK(cfg.vb.restarts == 5);
  CHECK(cfg.vb.tol == 1e-8);
  CHECK(cfg.synth.min_weight == 0.05);
  CHECK(cfg.synth.dirichlet_alpha == 2.0);
  CHECK(code_of([] { parse_run_config(R"({"hyper": {"gamma": 1}})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_run_config("{not json"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_run_config(R"({"vb": {"tol": -1}})"); }) == ErrorCode::InvalidArgument);
}
