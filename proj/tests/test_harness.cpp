#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "ldp/harness.hpp"
#include "ldp/rng.hpp"

using namespace ldp;
using nlohmann::json;

namespace {

json uniform_config(std::vector<long> ns, int replicates) {
  json cfg;
  cfg["model"] = {{"kind", "uniform_endpoint"}, {"theta", 1.0}, {"M", 1.0}};
  cfg["family"] = {{"kind", "uniform_endpoint"}, {"M", 1.0}};
  cfg["estimator"] = "sample_mean";
  cfg["loss"] = {{"kind", "power"}, {"gamma", 2.0}};
  cfg["alphas"] = {std::log(3.0)};
  cfg["ns"] = ns;
  cfg["replicates"] = replicates;
  cfg["seed"] = 20260810;
  return cfg;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ldp_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("rate fitting") {
  SUBCASE("an exact power law is recovered to machine precision") {
    std::vector<CellResult> cells;
    for (long n : {1000L, 2000L, 4000L, 8000L, 16000L}) {
      cells.push_back({1.0, n, 15.0 / n, 0.0, "", 0});
    }
    const RateFit fit = fit_rate(cells);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(15.0)).epsilon(1e-10));
  }

  SUBCASE("constant risks have slope zero") {
    std::vector<CellResult> cells;
    for (long n : {100L, 200L, 400L, 800L}) {
      cells.push_back({1.0, n, 0.25, 0.0, "", 0});
    }
    CHECK(fit_rate(cells).slope == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("one percent noise still pins the exponent") {
    RandomStream rng = RandomStream::root(12);
    std::vector<CellResult> cells;
    for (long n = 1024; n <= 131072; n *= 2) {
      const double noise = 1.0 + 0.01 * (2.0 * rng.next_uniform() - 1.0);
      cells.push_back({1.0, n, 3.0 * noise / std::sqrt(static_cast<double>(n)),
                       0.0, "", 0});
    }
    const RateFit fit = fit_rate(cells);
    CHECK(std::abs(fit.slope + 0.5) < 0.02);
  }

  SUBCASE("clamped cells are excluded and non-positive risks rejected") {
    std::vector<CellResult> cells = {
        {1.0, 100, 1.0, 0.0, "", 0},
        {1.0, 200, 0.5, 0.0, "", 0},
        {1.0, 400, 123.0, 0.0, "clamped", 0},
        {1.0, 800, 0.125, 0.0, "", 0},
    };
    CHECK(fit_rate(cells).slope == doctest::Approx(-1.0).epsilon(1e-12));

    cells[1].risk = 0.0;
    CHECK_THROWS_AS(fit_rate(cells), std::invalid_argument);
  }
}

TEST_CASE("experiment runs are deterministic and thread-invariant") {
  ExperimentConfig config =
      ExperimentConfig::from_json(uniform_config({256, 512}, 200));

  const RiskReport a = run_experiment(config);
  const RiskReport b = run_experiment(config);
  REQUIRE(a.cells.size() == 2);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].risk == b.cells[i].risk);
    CHECK(a.cells[i].se == b.cells[i].se);
  }

  config.threads = 2;
  const RiskReport c = run_experiment(config);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].risk == c.cells[i].risk);
    CHECK(a.cells[i].se == c.cells[i].se);
  }
}

TEST_CASE("uniform endpoint risk matches the exact variance law") {
  ExperimentConfig config =
      ExperimentConfig::from_json(uniform_config({1000, 2000}, 20000));
  config.threads = 2;
  const RiskReport report = run_experiment(config);

  // Var(mean) = (z0^2 - theta^2)/n = 15/n at alpha = ln 3, theta = M = 1.
  for (const auto& cell : report.cells) {
    CHECK(std::abs(cell.risk - 15.0 / cell.n) < 3.0 * cell.se);
  }
  // Doubling n halves the risk, within joint Monte Carlo error.
  const double ratio = report.cells[0].risk / report.cells[1].risk;
  CHECK(std::abs(ratio - 2.0) < 0.2);

  // Rate-stability: risk over the theory envelope does not grow with n,
  // within two standard errors expressed in the scaled units.
  const double amp = PrivacyLevel(std::log(3.0)).amplification;
  std::vector<double> scaled, scaled_se;
  for (const auto& cell : report.cells) {
    const double rate = 2.0 * amp / std::sqrt(static_cast<double>(cell.n));
    scaled.push_back(cell.risk / (rate * rate));
    scaled_se.push_back(cell.se / (rate * rate));
  }
  CHECK(scaled[1] <= scaled[0] + 2.0 * (scaled_se[0] + scaled_se[1]));
}

TEST_CASE("binary search estimator through the harness") {
  json cfg = uniform_config({512, 1024}, 500);
  cfg["estimator"] = "binary_search";
  cfg["delta"] = 0.05;
  const RiskReport report =
      run_experiment(ExperimentConfig::from_json(cfg));
  for (const auto& cell : report.cells) {
    CHECK(cell.risk < 0.5);  // grid resolution + mean noise, sane scale
    CHECK(cell.risk > 0.0);
  }
}

TEST_CASE("config parsing and validation") {
  SUBCASE("missing optional shift defaults to zero") {
    const ExperimentConfig config =
        ExperimentConfig::from_json(uniform_config({128}, 100));
    CHECK(config.shift == 0.0);
    CHECK(config.project == false);
    CHECK(config.threads == 1);
  }

  SUBCASE("schema violations carry field paths") {
    json cfg = uniform_config({128}, 100);
    cfg.erase("alphas");
    try {
      ExperimentConfig::from_json(cfg);
      FAIL("expected a validation error");
    } catch (const std::invalid_argument& err) {
      CHECK(std::string(err.what()).find("config.alphas") != std::string::npos);
    }

    cfg = uniform_config({128}, 100);
    cfg["replicates"] = 10;
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), std::invalid_argument);

    cfg = uniform_config({128, 128}, 100);
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), std::invalid_argument);

    cfg = uniform_config({128}, 100);
    cfg["alphas"] = {-1.0};
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg), std::invalid_argument);
  }

  SUBCASE("malformed JSON reports the line") {
    TempDir tmp;
    const auto path = tmp.path / "bad.json";
    std::ofstream(path) << "{\n  \"model\": [,\n}";
    try {
      load_config(path.string());
      FAIL("expected a parse error");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()).find("line") != std::string::npos);
    }
  }

  SUBCASE("round trip through to_json") {
    const ExperimentConfig config =
        ExperimentConfig::from_json(uniform_config({128, 256}, 150));
    const ExperimentConfig again =
        ExperimentConfig::from_json(config.to_json());
    CHECK(again.ns == config.ns);
    CHECK(again.replicates == config.replicates);
    CHECK(again.seed == config.seed);
  }
}

TEST_CASE("persist and reload round trip") {
  TempDir tmp;
  ExperimentConfig config =
      ExperimentConfig::from_json(uniform_config({128, 256}, 120));
  const RiskReport report = run_experiment(config);

  const std::string base = (tmp.path / "out").string();
  persist(report, base);
  const auto cells = load_results(base + ".jsonl");
  REQUIRE(cells.size() == report.cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].alpha == report.cells[i].alpha);
    CHECK(cells[i].n == report.cells[i].n);
    CHECK(cells[i].risk == report.cells[i].risk);
    CHECK(cells[i].se == report.cells[i].se);
    CHECK(cells[i].seed == report.cells[i].seed);
  }

  SUBCASE("reruns append byte-identical records") {
    persist(report, base);
    std::ifstream in(base + ".jsonl");
    std::string first_half, second_half, line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
      (count < cells.size() ? first_half : second_half) += line + "\n";
      ++count;
    }
    CHECK(count == 2 * cells.size());
    CHECK(first_half == second_half);
  }

  SUBCASE("csv summary carries the expected header") {
    std::ifstream csv(base + ".csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "alpha,n,risk,se,flag");
  }
}

TEST_CASE("alpha sweep holds the effective sample size fixed") {
  json cfg = uniform_config({2000}, 3000);
  cfg["alphas"] = {0.05, 0.1};
  const SweepTable table =
      alpha_sweep(ExperimentConfig::from_json(cfg));
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].ratio == 1.0);
  // Effective sample sizes agree by construction.
  CHECK(table.rows[1].effective ==
        doctest::Approx(table.rows[0].effective).epsilon(0.01));
  // Small-alpha regime: risks agree within ten percent.
  CHECK(std::abs(table.rows[1].ratio - 1.0) < 0.1);

  SUBCASE("single alpha degenerates to one row") {
    json single = uniform_config({512}, 200);
    const SweepTable t = alpha_sweep(ExperimentConfig::from_json(single));
    CHECK(t.rows.size() == 1);
    CHECK(t.rows[0].ratio == 1.0);
  }

  SUBCASE("large alpha rows are flagged, not failed") {
    json wide = uniform_config({512}, 200);
    wide["alphas"] = {0.5, 3.0};
    const SweepTable t = alpha_sweep(ExperimentConfig::from_json(wide));
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1].flag == "large_alpha");
  }
}

TEST_CASE("density model runs through the harness") {
  json cfg;
  cfg["model"] = {{"kind", "holder_density"}, {"beta", 1.0}, {"L", 1.0},
                  {"x0", 0.0}, {"m", 0}};
  cfg["family"] = {{"kind", "derivative_kernel"}, {"m", 0}, {"beta", 1.0},
                   {"L", 1.0}, {"x0", 0.0}};
  cfg["estimator"] = "sample_mean";
  cfg["loss"] = {{"kind", "power"}, {"gamma", 2.0}};
  cfg["alphas"] = {1.0};
  cfg["ns"] = {4096, 16384};
  cfg["replicates"] = 300;
  cfg["seed"] = 7;
  cfg["threads"] = 2;
  const RiskReport report = run_experiment(ExperimentConfig::from_json(cfg));
  REQUIRE(report.cells.size() == 2);
  CHECK(report.theory_slope == doctest::Approx(-0.5));
  // Quadrupling n roughly halves the variance-dominated risk.
  const double ratio = report.cells[0].risk / report.cells[1].risk;
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.8);
}
