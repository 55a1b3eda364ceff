#include "ldp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ldp {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config." + path + ": " + what);
}

double require_number(const json& doc, const std::string& path) {
  if (!doc.is_number()) config_error(path, "expected a number");
  return doc.get<double>();
}

const json& require_field(const json& doc, const std::string& field,
                          const std::string& parent) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    config_error(parent.empty() ? field : parent + "." + field, "missing field");
  }
  return *it;
}

std::string field_string(const json& doc, const std::string& field,
                         const std::string& parent) {
  const json& value = require_field(doc, field, parent);
  if (!value.is_string()) {
    config_error(parent.empty() ? field : parent + "." + field,
                 "expected a string");
  }
  return value.get<std::string>();
}

struct CellContext {
  const StatModel& model;
  const BinaryChannel& channel;
  EstimatorChoice estimator;
  const LossFn& loss;
  double shift;
  bool project;
  std::optional<ThetaRange> range;
  const BinarySearchPlan* plan;
};

double run_replicate(const CellContext& ctx, const RandomStream& rep_stream,
                     long n) {
  const RandomStream x_stream = rep_stream.derive(0);
  RandomStream coin_stream = rep_stream.derive(1);
  const std::size_t dim = ctx.model.dim();
  std::vector<double> x(dim);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    ctx.model.draw(x_stream, static_cast<std::uint64_t>(i), x);
    sum += ctx.channel.privatize(std::span<const double>(x), coin_stream);
  }
  const double zbar = sum / static_cast<double>(n);

  double estimate;
  if (ctx.estimator == EstimatorChoice::sample_mean) {
    estimate = zbar + ctx.shift;
    if (ctx.project && ctx.range) estimate = ctx.range->project(estimate);
  } else {
    estimate = ctx.plan->estimate_from_t(ctx.plan->map().t_statistic(zbar));
  }
  return ctx.loss(std::abs(estimate - ctx.model.theta()));
}

ThetaRange model_theta_range(const StatModel& model, const json& spec) {
  if (model.tag() == "uniform_endpoint") {
    return ThetaRange(0.0, require_number(require_field(spec, "M", "model"),
                                          "model.M"));
  }
  // Fall back to a generous symmetric range around the true value.
  const double t = model.theta();
  const double pad = std::max(1.0, std::abs(t));
  return ThetaRange(t - 2.0 * pad, t + 2.0 * pad);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) config_error("", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.model = require_field(doc, "model", "");
  cfg.family = require_field(doc, "family", "");

  const std::string estimator = field_string(doc, "estimator", "");
  if (estimator == "sample_mean") {
    cfg.estimator = EstimatorChoice::sample_mean;
  } else if (estimator == "binary_search") {
    cfg.estimator = EstimatorChoice::binary_search;
  } else {
    config_error("estimator", "expected \"sample_mean\" or \"binary_search\"");
  }

  cfg.loss_spec = require_field(doc, "loss", "");

  const json& alphas = require_field(doc, "alphas", "");
  if (!alphas.is_array() || alphas.empty()) {
    config_error("alphas", "expected a non-empty array");
  }
  for (const auto& a : alphas) {
    const double v = require_number(a, "alphas[]");
    if (!(v > 0.0)) config_error("alphas[]", "alpha must be positive");
    cfg.alphas.push_back(v);
  }

  const json& ns = require_field(doc, "ns", "");
  if (!ns.is_array() || ns.empty()) config_error("ns", "expected a non-empty array");
  long prev = 0;
  for (const auto& n : ns) {
    if (!n.is_number_integer()) config_error("ns[]", "expected an integer");
    const long v = n.get<long>();
    if (v < 1) config_error("ns[]", "sample sizes must be positive");
    if (v <= prev) config_error("ns", "sample sizes must be strictly increasing");
    prev = v;
    cfg.ns.push_back(v);
  }

  const json& reps = require_field(doc, "replicates", "");
  if (!reps.is_number_integer()) config_error("replicates", "expected an integer");
  cfg.replicates = reps.get<int>();
  if (cfg.replicates < 100) config_error("replicates", "at least 100 required");

  const json& seed = require_field(doc, "seed", "");
  if (!seed.is_number_integer()) config_error("seed", "expected an integer");
  cfg.seed = seed.get<std::uint64_t>();

  if (doc.contains("output")) cfg.output = field_string(doc, "output", "");
  if (doc.contains("shift")) cfg.shift = require_number(doc["shift"], "shift");
  if (doc.contains("project")) {
    if (!doc["project"].is_boolean()) config_error("project", "expected a boolean");
    cfg.project = doc["project"].get<bool>();
  }
  if (doc.contains("delta")) cfg.delta = require_number(doc["delta"], "delta");
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_integer()) {
      config_error("threads", "expected an integer");
    }
    cfg.threads = std::max(1, doc["threads"].get<int>());
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["model"] = model;
  doc["family"] = family;
  doc["estimator"] =
      estimator == EstimatorChoice::sample_mean ? "sample_mean" : "binary_search";
  doc["loss"] = loss_spec;
  doc["alphas"] = alphas;
  doc["ns"] = ns;
  doc["replicates"] = replicates;
  doc["seed"] = seed;
  if (!output.empty()) doc["output"] = output;
  doc["shift"] = shift;
  doc["project"] = project;
  if (delta) doc["delta"] = *delta;
  doc["threads"] = threads;
  return doc;
}

std::unique_ptr<StatModel> model_from_json(const json& spec) {
  const std::string kind = field_string(spec, "kind", "model");
  if (kind == "uniform_endpoint") {
    return uniform_model(require_number(require_field(spec, "theta", "model"),
                                        "model.theta"),
                         require_number(require_field(spec, "M", "model"),
                                        "model.M"));
  }
  if (kind == "holder_density") {
    const double beta =
        require_number(require_field(spec, "beta", "model"), "model.beta");
    const double l = require_number(require_field(spec, "L", "model"), "model.L");
    const double x0 =
        require_number(require_field(spec, "x0", "model"), "model.x0");
    const int m = spec.contains("m") ? spec["m"].get<int>() : 0;
    const double h =
        spec.contains("bump_h") ? require_number(spec["bump_h"], "model.bump_h") : 0.0;
    return holder_density_model(beta, l, x0, m, h);
  }
  if (kind == "moment") {
    const std::string mk = field_string(spec, "moment_kind", "model");
    if (mk != "bounded" && mk != "heavy") {
      config_error("model.moment_kind", "expected \"bounded\" or \"heavy\"");
    }
    const double kappa =
        require_number(require_field(spec, "kappa", "model"), "model.kappa");
    const double l = require_number(require_field(spec, "L", "model"), "model.L");
    const double eps =
        require_number(require_field(spec, "eps", "model"), "model.eps");
    const double delta =
        spec.contains("delta") ? require_number(spec["delta"], "model.delta") : 1e-6;
    return moment_model(mk == "heavy" ? MomentKind::heavy : MomentKind::bounded,
                        MomentFunctional::identity(), kappa, l, eps, delta);
  }
  config_error("model.kind", "unknown model kind: " + kind);
}

RepresenterFamily family_from_json(const json& spec) {
  const std::string kind = field_string(spec, "kind", "family");
  if (kind == "uniform_endpoint") {
    return uniform_endpoint_family(
        require_number(require_field(spec, "M", "family"), "family.M"));
  }
  if (kind == "derivative_kernel") {
    const int m = spec.contains("m") ? spec["m"].get<int>() : 0;
    return derivative_kernel_family(
        m, require_number(require_field(spec, "beta", "family"), "family.beta"),
        require_number(require_field(spec, "L", "family"), "family.L"),
        require_number(require_field(spec, "x0", "family"), "family.x0"));
  }
  if (kind == "truncated_moment") {
    const double kappa =
        require_number(require_field(spec, "kappa", "family"), "family.kappa");
    const double l =
        require_number(require_field(spec, "L", "family"), "family.L");
    return truncated_moment_family([](double x) { return x; }, kappa, l);
  }
  if (kind == "product_kernel") {
    auto vec = [&](const char* field) {
      const json& arr = require_field(spec, field, "family");
      if (!arr.is_array()) config_error(std::string("family.") + field, "expected array");
      return arr.get<std::vector<double>>();
    };
    return product_kernel_family(vec("beta"), vec("L"), vec("x0"));
  }
  config_error("family.kind", "unknown family kind: " + kind);
}

LossFn loss_from_json(const json& spec) {
  return loss(field_string(spec, "kind", "loss"),
              require_number(require_field(spec, "gamma", "loss"), "loss.gamma"));
}

RiskReport run_experiment(const ExperimentConfig& config) {
  const auto model = model_from_json(config.model);
  const RepresenterFamily family = family_from_json(config.family);
  const LossFn loss_fn = loss_from_json(config.loss_spec);
  const RandomStream root = RandomStream::root(config.seed);

  RiskReport report;
  // Expected log-log slope: risk ~ l(rate_n) with rate_n ~ n^(-exponent/2).
  // Huber is quadratic near zero, so its asymptotic power is 2.
  const double loss_power =
      loss_fn.kind == LossKind::power ? loss_fn.gamma : 2.0;
  report.theory_slope = -loss_power * family.condition().rate_exponent() / 2.0;

  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    const PrivacyLevel level(config.alphas[ai]);
    for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
      const long n = config.ns[ni];
      const BandwidthSelection bw = select_bandwidth(family, n, level);
      const Representer ell = family.at(std::span<const double>(bw.h));
      const BinaryChannel channel(ell, level);
      const RandomStream cell_stream = root.derive(ai).derive(ni);

      std::optional<ThetaRange> range;
      std::optional<BinarySearchPlan> plan;
      if (config.estimator == EstimatorChoice::binary_search || config.project) {
        range = model_theta_range(*model, config.model);
      }
      if (config.estimator == EstimatorChoice::binary_search) {
        if (!config.delta) {
          throw std::invalid_argument("binary_search estimator needs a delta");
        }
        plan = build_plan(*config.delta, *range,
                          ThetaProbMap::linear_zero_bias(channel));
      }
      const CellContext ctx{*model,        channel,
                            config.estimator, loss_fn,
                            config.shift,  config.project,
                            range,         plan ? &*plan : nullptr};

      const int R = config.replicates;
      std::vector<double> losses(static_cast<std::size_t>(R));
      const int threads = std::max(1, config.threads);
      if (threads == 1) {
        for (int r = 0; r < R; ++r) {
          losses[static_cast<std::size_t>(r)] =
              run_replicate(ctx, cell_stream.derive(static_cast<std::uint64_t>(r)), n);
        }
      } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            for (int r = t; r < R; r += threads) {
              losses[static_cast<std::size_t>(r)] = run_replicate(
                  ctx, cell_stream.derive(static_cast<std::uint64_t>(r)), n);
            }
          });
        }
        for (auto& th : pool) th.join();
      }

      // Reduce in replicate order so results do not depend on thread count.
      double sum = 0.0;
      for (double v : losses) sum += v;
      const double mean = sum / R;
      double ss = 0.0;
      for (double v : losses) ss += (v - mean) * (v - mean);
      const double se = R > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;

      CellResult cell;
      cell.alpha = config.alphas[ai];
      cell.n = n;
      cell.risk = mean;
      cell.se = se;
      cell.flag = bw.clamped ? "clamped" : "";
      cell.seed = cell_stream.key();
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

RateFit fit_rate(const std::vector<CellResult>& cells) {
  std::vector<double> xs, ys;
  for (const auto& cell : cells) {
    if (!cell.flag.empty()) continue;
    if (!(cell.risk > 0.0)) {
      throw std::invalid_argument("rate fit requires positive risks");
    }
    xs.push_back(std::log(static_cast<double>(cell.n)));
    ys.push_back(std::log(cell.risk));
  }
  const std::size_t k = xs.size();
  if (k < 2) throw std::invalid_argument("rate fit needs at least two unflagged cells");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.slope_se = k > 2 ? std::sqrt(rss / (static_cast<double>(k) - 2.0) / sxx)
                       : std::numeric_limits<double>::infinity();
  return fit;
}

SweepTable alpha_sweep(const ExperimentConfig& config) {
  if (config.alphas.empty() || config.ns.empty()) {
    throw std::invalid_argument("sweep needs at least one alpha and one n");
  }
  const double e0 = std::expm1(config.alphas.front());
  const double target = static_cast<double>(config.ns.front()) * e0 * e0;

  SweepTable table;
  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    const double alpha = config.alphas[ai];
    const double contrast = std::expm1(alpha);
    const long n =
        std::max<long>(1, std::lround(target / (contrast * contrast)));

    ExperimentConfig cell_cfg = config;
    cell_cfg.alphas = {alpha};
    cell_cfg.ns = {n};
    const RiskReport report = run_experiment(cell_cfg);
    const CellResult& cell = report.cells.front();

    SweepRow row;
    row.alpha = alpha;
    row.n = n;
    row.effective = static_cast<double>(n) * contrast * contrast;
    row.risk = cell.risk;
    row.se = cell.se;
    row.flag = alpha > 1.0 ? "large_alpha" : cell.flag;
    row.ratio = table.rows.empty() ? 1.0 : row.risk / table.rows.front().risk;
    table.rows.push_back(std::move(row));
  }
  return table;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);  // nlohmann reports line and column on failure
  } catch (const json::parse_error& err) {
    throw std::runtime_error("config parse error in " + path + ": " + err.what());
  }
  return ExperimentConfig::from_json(doc);
}

void persist(const RiskReport& report, const std::string& path) {
  std::ofstream jsonl(path + ".jsonl", std::ios::app);
  if (!jsonl) throw std::runtime_error("cannot open " + path + ".jsonl");
  for (const auto& cell : report.cells) {
    json record;
    record["alpha"] = cell.alpha;
    record["n"] = cell.n;
    record["risk"] = cell.risk;
    record["se"] = cell.se;
    record["flag"] = cell.flag;
    record["seed"] = cell.seed;
    jsonl << record.dump() << "\n";
  }
  jsonl.close();

  std::ofstream csv(path + ".csv");
  if (!csv) throw std::runtime_error("cannot open " + path + ".csv");
  csv << "alpha,n,risk,se,flag\n";
  for (const auto& cell : report.cells) {
    csv << json(cell.alpha).dump() << "," << cell.n << ","
        << json(cell.risk).dump() << "," << json(cell.se).dump() << ","
        << cell.flag << "\n";
  }
}

std::vector<CellResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::vector<CellResult> cells;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& err) {
      throw std::runtime_error("results parse error at line " +
                               std::to_string(line_no) + ": " + err.what());
    }
    CellResult cell;
    cell.alpha = record.at("alpha").get<double>();
    cell.n = record.at("n").get<long>();
    cell.risk = record.at("risk").get<double>();
    cell.se = record.at("se").get<double>();
    cell.flag = record.at("flag").get<std::string>();
    cell.seed = record.at("seed").get<std::uint64_t>();
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace ldp
