#include "korea/sweep.hpp"

#include "korea/errors.hpp"
#include "korea/model_select.hpp"
#include "korea/parallel.hpp"
#include "korea/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace korea {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::korea: return "korea";
    case Method::aic: return "aic";
    case Method::bic: return "bic";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  if (s == "korea") return Method::korea;
  if (s == "aic") return Method::aic;
  if (s == "bic") return Method::bic;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "' (expected korea, aic or bic)");
}

const SweepAggregate* SweepResult::find(int k_hat, int n, Method m) const {
  for (const auto& a : aggregates) {
    if (a.k_hat == k_hat && a.n == n && a.method == m) return &a;
  }
  return nullptr;
}

std::uint64_t cell_seed(std::uint64_t seed0, int k_hat, int n, int run) {
  // Kept below 2^32 so the sum with seed0 stays readable in output files.
  const auto h = stable_hash({static_cast<std::uint64_t>(k_hat), static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(run)});
  return seed0 + (h & 0xFFFFFFFFULL);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Unit {
  int k_hat, n, run;
};

std::vector<SweepCell> run_unit(const SweepConfig& cfg, const Unit& u) {
  const auto seed = cell_seed(cfg.seed0, u.k_hat, u.n, u.run);
  std::vector<SweepCell> cells;
  for (auto m : cfg.methods) cells.push_back({u.k_hat, u.n, u.run, seed, m, 0, 0.0, {}});

  LabeledDataset ds;
  try {
    SynthConfig sc = cfg.synth;
    sc.k_hat = u.k_hat;
    sc.n = u.n;
    sc.seed = seed;
    ds = sample_synthetic(sc);
  } catch (const std::exception& e) {
    for (auto& c : cells) c.error = std::string("datagen: ") + e.what();
    return cells;
  }

  bool have_curve = false;
  CriterionCurve curve;
  double curve_seconds = 0.0;
  std::string curve_error;
  for (auto& c : cells) {
    const auto t0 = Clock::now();
    try {
      if (c.method == Method::korea) {
        FitSettings fs;
        fs.hyper = cfg.hyper;
        fs.vb = cfg.vb;
        fs.seed = seed;
        c.k_star = model_order_posterior(ds.data, cfg.k_max, fs).k_star;
        c.runtime_seconds = seconds_since(t0);
      } else {
        // AIC and BIC share one set of EM fits.
        if (!have_curve) {
          have_curve = true;
          try {
            curve = aic_bic_curve(ds.data, cfg.k_max, cfg.em, seed);
          } catch (const std::exception& e) {
            curve_error = e.what();
          }
          curve_seconds = seconds_since(t0);
        }
        if (!curve_error.empty()) throw std::runtime_error(curve_error);
        c.k_star = c.method == Method::aic ? curve.aic_k_star : curve.bic_k_star;
        c.runtime_seconds = curve_seconds;
      }
    } catch (const std::exception& e) {
      c.k_star = 0;
      c.error = e.what();
      c.runtime_seconds = seconds_since(t0);
    }
  }
  return cells;
}

}  // namespace

std::vector<SweepAggregate> aggregate_cells(const std::vector<SweepCell>& cells) {
  std::vector<SweepAggregate> out;
  std::map<std::tuple<int, int, int>, std::size_t> index;
  std::vector<double> sums, sq;
  for (const auto& c : cells) {
    const auto key = std::make_tuple(c.k_hat, c.n, static_cast<int>(c.method));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({c.k_hat, c.n, c.method, 0, 0.0, 0.0});
      sums.push_back(0.0);
      sq.push_back(0.0);
    }
    if (!c.ok()) continue;
    const auto i = it->second;
    out[i].runs += 1;
    sums[i] += c.k_star;
    const double err = c.k_star - c.k_hat;
    sq[i] += err * err;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].runs == 0) {
      out[i].mean = out[i].mse = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out[i].mean = sums[i] / out[i].runs;
    out[i].mse = sq[i] / out[i].runs;
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.runs < 1 || cfg.k_hats.empty() || cfg.ns.empty() || cfg.methods.empty() || cfg.k_max < 1) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs runs >= 1, k_max >= 1 and non-empty lists");
  }
  std::vector<Unit> units;
  for (int k : cfg.k_hats) {
    for (int n : cfg.ns) {
      for (int r = 0; r < cfg.runs; ++r) units.push_back({k, n, r});
    }
  }
  std::vector<std::vector<SweepCell>> per_unit(units.size());
  parallel_for(units.size(), cfg.jobs, [&](std::size_t i) { per_unit[i] = run_unit(cfg, units[i]); });

  SweepResult result;
  for (auto& cells : per_unit) {
    for (auto& c : cells) result.cells.push_back(std::move(c));
  }
  result.aggregates = aggregate_cells(result.cells);
  return result;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

/// Splits one CSV line honoring double-quoted cells.
std::vector<std::string> split_quoted(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }
double from_num(const json& j) { return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>(); }

}  // namespace

void emit_sweep(const SweepResult& result, const std::filesystem::path& path, Format format, bool include_timing) {
  if (format == Format::csv) {
    std::ostringstream cells;
    cells << "k_hat,n,run,seed,method,k_star,error" << (include_timing ? ",runtime_seconds" : "") << "\n";
    for (const auto& c : result.cells) {
      cells << c.k_hat << "," << c.n << "," << c.run << "," << c.seed << "," << to_string(c.method) << "," << c.k_star
            << "," << csv_escape(c.error);
      if (include_timing) cells << "," << format_double(c.runtime_seconds);
      cells << "\n";
    }
    write_text(path, cells.str());

    std::ostringstream agg;
    agg << "k_hat,n,method,runs,mean,mse\n";
    for (const auto& a : result.aggregates) {
      agg << a.k_hat << "," << a.n << "," << to_string(a.method) << "," << a.runs << "," << format_double(a.mean)
          << "," << format_double(a.mse) << "\n";
    }
    write_text(sibling_path(path, "_aggregates"), agg.str());
    return;
  }

  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "sweep_result";
  j["cells"] = json::array();
  for (const auto& c : result.cells) {
    json cell = {{"k_hat", c.k_hat}, {"n", c.n},           {"run", c.run},    {"seed", c.seed},
                 {"method", to_string(c.method)}, {"k_star", c.k_star}, {"error", c.error}};
    if (include_timing) cell["runtime_seconds"] = c.runtime_seconds;
    j["cells"].push_back(std::move(cell));
  }
  j["aggregates"] = json::array();
  for (const auto& a : result.aggregates) {
    j["aggregates"].push_back({{"k_hat", a.k_hat},
                               {"n", a.n},
                               {"method", to_string(a.method)},
                               {"runs", a.runs},
                               {"mean", num(a.mean)},
                               {"mse", num(a.mse)}});
  }
  write_text(path, j.dump(2) + "\n");
}

SweepResult read_sweep(const std::filesystem::path& path, Format format) {
  SweepResult result;
  if (format == Format::csv) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    const auto header = split_quoted(line);
    const bool timing = header.size() == 8;
    if (header.size() < 7 || header[0] != "k_hat") throw Error(ErrorCode::ParseError, path.string() + ": bad header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_quoted(line);
      if (f.size() != header.size()) throw Error(ErrorCode::RaggedRows, path.string());
      SweepCell c;
      c.k_hat = std::stoi(f[0]);
      c.n = std::stoi(f[1]);
      c.run = std::stoi(f[2]);
      c.seed = std::stoull(f[3]);
      c.method = parse_method(f[4]);
      c.k_star = std::stoi(f[5]);
      c.error = f[6];
      if (timing) c.runtime_seconds = parse_double(f[7]);
      result.cells.push_back(std::move(c));
    }
    result.aggregates = aggregate_cells(result.cells);
    return result;
  }
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (j.value("kind", std::string()) != "sweep_result" || j.value("schema_version", 0) != kSchemaVersion) {
    throw Error(ErrorCode::ParseError, path.string() + ": not a sweep_result document");
  }
  for (const auto& c : j.at("cells")) {
    SweepCell cell;
    cell.k_hat = c.at("k_hat").get<int>();
    cell.n = c.at("n").get<int>();
    cell.run = c.at("run").get<int>();
    cell.seed = c.at("seed").get<std::uint64_t>();
    cell.method = parse_method(c.at("method").get<std::string>());
    cell.k_star = c.at("k_star").get<int>();
    cell.error = c.at("error").get<std::string>();
    if (c.contains("runtime_seconds")) cell.runtime_seconds = c.at("runtime_seconds").get<double>();
    result.cells.push_back(std::move(cell));
  }
  for (const auto& a : j.at("aggregates")) {
    result.aggregates.push_back({a.at("k_hat").get<int>(), a.at("n").get<int>(),
                                 parse_method(a.at("method").get<std::string>()), a.at("runs").get<int>(),
                                 from_num(a.at("mean")), from_num(a.at("mse"))});
  }
  return result;
}

}  // namespace korea
