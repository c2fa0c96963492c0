#include <doctest.h>

#include "korea/io.hpp"
#include "korea/sweep.hpp"

#include <filesystem>

using namespace korea;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config(int jobs) {
  SweepConfig cfg;
  cfg.k_hats = {1, 2, 3};
  cfg.ns = {40, 80};
  cfg.runs = 2;
  cfg.k_max = 4;
  cfg.seed0 = 5;
  cfg.jobs = jobs;
  cfg.synth.min_weight = 0.05;
  return cfg;
}

bool same_cells(const SweepResult& a, const SweepResult& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto &x = a.cells[i], &y = b.cells[i];
    if (x.k_hat != y.k_hat || x.n != y.n || x.run != y.run || x.seed != y.seed || x.method != y.method ||
        x.k_star != y.k_star || x.error != y.error)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("aggregate arithmetic") {
  std::vector<SweepCell> cells;
  for (int r = 0; r < 5; ++r) cells.push_back({3, 100, r, 1, Method::korea, 3, 0.0, {}});
  auto agg = aggregate_cells(cells);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].runs == 5);
  CHECK(agg[0].mean == 3.0);
  CHECK(agg[0].mse == 0.0);

  cells[0].k_star = 4;
  cells[1].k_star = 1;
  cells[2].k_star = 0;
  cells[2].error = "failed";
  agg = aggregate_cells(cells);
  CHECK(agg[0].runs == 4);
  CHECK(agg[0].mean == doctest::Approx((4.0 + 1.0 + 3.0 + 3.0) / 4.0));
  CHECK(agg[0].mse == doctest::Approx((1.0 + 4.0) / 4.0));
}

TEST_CASE("cell seeds are stable and distinct") {
  CHECK(cell_seed(1, 3, 100, 0) == cell_seed(1, 3, 100, 0));
  CHECK(cell_seed(1, 3, 100, 0) != cell_seed(1, 3, 100, 1));
  CHECK(cell_seed(1, 3, 100, 0) != cell_seed(1, 3, 300, 0));
  CHECK(cell_seed(2, 3, 100, 0) == cell_seed(1, 3, 100, 0) + 1);
}

TEST_CASE("sweep is independent of the number of workers and round-trips") {
  const auto serial = run_sweep(small_config(1));
  const auto parallel = run_sweep(small_config(8));
  CHECK(serial.cells.size() == 3 * 2 * 2 * 3);
  CHECK(same_cells(serial, parallel));
  for (const auto& c : serial.cells) {
    CHECK(c.ok());
    CHECK(c.k_star >= 1);
    CHECK(c.k_star <= 4);
  }

  const auto dir = fs::temp_directory_path() / "korea_test_sweep";
  fs::create_directories(dir);
  emit_sweep(serial, dir / "a.csv", Format::csv, false);
  emit_sweep(parallel, dir / "b.csv", Format::csv, false);
  CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
  CHECK(read_text(dir / "a_aggregates.csv") == read_text(dir / "b_aggregates.csv"));
  CHECK(read_text(dir / "a.csv").find("runtime") == std::string::npos);

  for (auto format : {Format::csv, Format::json}) {
    const auto path = dir / (format == Format::csv ? "r.csv" : "r.json");
    emit_sweep(serial, path, format, true);
    const auto back = read_sweep(path, format);
    CHECK(same_cells(serial, back));
    // Aggregates are recomputable from the emitted cells.
    const auto recomputed = aggregate_cells(back.cells);
    REQUIRE(recomputed.size() == serial.aggregates.size());
    for (std::size_t i = 0; i < recomputed.size(); ++i) {
      CHECK(recomputed[i].mean == serial.aggregates[i].mean);
      CHECK(recomputed[i].mse == serial.aggregates[i].mse);
      CHECK(back.aggregates[i].mean == serial.aggregates[i].mean);
    }
  }
}

TEST_CASE("failing cells are recorded without aborting the sweep") {
  SweepConfig cfg = small_config(1);
  cfg.k_hats = {1, 30};  // min_weight 0.05 is infeasible for 30 components
  cfg.ns = {40};
  cfg.runs = 1;
  const auto result = run_sweep(cfg);
  int failed = 0;
  for (const auto& c : result.cells) {
    if (c.k_hat == 30) {
      CHECK(!c.ok());
      CHECK(c.k_star == 0);
      ++failed;
    } else {
      CHECK(c.ok());
    }
  }
  CHECK(failed == 3);
  const auto* agg = result.find(30, 40, Method::korea);
  REQUIRE(agg != nullptr);
  CHECK(agg->runs == 0);
}
