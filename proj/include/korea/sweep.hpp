#pragma once

#include "korea/datagen.hpp"
#include "korea/em_gmm.hpp"
#include "korea/io.hpp"
#include "korea/vb_gmm.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace korea {

enum class Method { korea, aic, bic };

std::string_view to_string(Method m);
Method parse_method(const std::string& s);

struct SweepConfig {
  std::vector<int> k_hats{1, 2, 3, 4, 5};
  std::vector<int> ns{100, 300, 1000};
  int runs = 5;
  int k_max = 10;
  std::vector<Method> methods{Method::korea, Method::aic, Method::bic};
  std::uint64_t seed0 = 1;
  int jobs = 1;
  SynthConfig synth;  // k_hat, n and seed are overwritten per cell
  HyperOverrides hyper;
  VbFitConfig vb;
  EmConfig em;
};

struct SweepCell {
  int k_hat = 0;
  int n = 0;
  int run = 0;
  std::uint64_t seed = 0;
  Method method = Method::korea;
  int k_star = 0;  // 0 when the cell failed
  double runtime_seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct SweepAggregate {
  int k_hat = 0;
  int n = 0;
  Method method = Method::korea;
  int runs = 0;  // successful runs
  double mean = 0.0;
  double mse = 0.0;  // (1/R) sum (k_star - k_hat)^2
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepAggregate> aggregates;

  const SweepAggregate* find(int k_hat, int n, Method m) const;
};

/// Seed for cell (k_hat, n, run): seed0 plus a stable hash of the triple.
std::uint64_t cell_seed(std::uint64_t seed0, int k_hat, int n, int run);

SweepResult run_sweep(const SweepConfig& cfg);

/// Groups successful cells by (k_hat, n, method); order follows first appearance.
std::vector<SweepAggregate> aggregate_cells(const std::vector<SweepCell>& cells);

/// Cells go to `path`; aggregates go to the sibling `<stem>_aggregates` file
/// for CSV and into the same document for JSON. Timing columns are written
/// only when `include_timing` is set so outputs stay byte-reproducible.
void emit_sweep(const SweepResult& result, const std::filesystem::path& path, Format format, bool include_timing);
SweepResult read_sweep(const std::filesystem::path& path, Format format);

}  // namespace korea
