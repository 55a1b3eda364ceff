#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldp/estimators.hpp"
#include "ldp/models.hpp"
#include "ldp/representers.hpp"

namespace ldp {

enum class EstimatorChoice { sample_mean, binary_search };

// One Monte Carlo rate experiment: model, representer family, estimator,
// loss, (alpha, n) grid, replicate count and master seed.
struct ExperimentConfig {
  nlohmann::json model;
  nlohmann::json family;
  EstimatorChoice estimator = EstimatorChoice::sample_mean;
  nlohmann::json loss_spec;
  std::vector<double> alphas;
  std::vector<long> ns;
  int replicates = 100;
  std::uint64_t seed = 1;
  std::string output;
  double shift = 0.0;           // additive correction b, default 0
  bool project = false;         // project onto the functional range
  std::optional<double> delta;  // binary search tuning parameter
  int threads = 1;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct CellResult {
  double alpha;
  long n;
  double risk;
  double se;
  std::string flag;  // empty, "clamped", or "large_alpha"
  std::uint64_t seed;
};

struct RateFit {
  double slope;
  double intercept;
  double slope_se;
};

struct RiskReport {
  std::vector<CellResult> cells;
  double theory_slope;  // expected log-log slope from the family metadata
};

// Instantiate the configured model / representer family.
std::unique_ptr<StatModel> model_from_json(const nlohmann::json& spec);
RepresenterFamily family_from_json(const nlohmann::json& spec);
LossFn loss_from_json(const nlohmann::json& spec);

// Draw, privatize and estimate over the (alpha, n) grid. Deterministic in the
// master seed and independent of the thread count.
RiskReport run_experiment(const ExperimentConfig& config);

// OLS of log(risk) on log(n) over the unflagged cells of one alpha.
RateFit fit_rate(const std::vector<CellResult>& cells);

struct SweepRow {
  double alpha;
  long n;
  double effective;  // n (e^alpha - 1)^2
  double risk;
  double se;
  double ratio;  // risk relative to the first row
  std::string flag;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// Hold n (e^alpha - 1)^2 fixed across the alpha list (n solved per alpha from
// the first cell) and compare risks; ratios near 1 are expected for small
// alpha.
SweepTable alpha_sweep(const ExperimentConfig& config);

ExperimentConfig load_config(const std::string& path);

// Append one JSON-Lines record per cell to <path>.jsonl and rewrite the CSV
// summary <path>.csv (columns alpha,n,risk,se,flag).
void persist(const RiskReport& report, const std::string& path);
std::vector<CellResult> load_results(const std::string& path);

}  // namespace ldp
