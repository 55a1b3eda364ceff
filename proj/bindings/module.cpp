#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "ldp/channels.hpp"
#include "ldp/checks.hpp"
#include "ldp/estimators.hpp"
#include "ldp/harness.hpp"
#include "ldp/moduli.hpp"
#include "ldp/models.hpp"
#include "ldp/representers.hpp"

namespace py = pybind11;
using namespace ldp;

namespace {

Metric metric_from_string(const std::string& name) {
  if (name == "tv") return Metric::tv;
  if (name == "hellinger") return Metric::hellinger;
  throw std::invalid_argument("metric must be \"tv\" or \"hellinger\"");
}

Representer representer_from_callable(std::function<double(double)> f,
                                      double sup_norm, double lo, double hi) {
  auto eval = [f = std::move(f)](std::span<const double> x) { return f(x[0]); };
  return Representer(eval, sup_norm, Domain::interval(lo, hi));
}

py::list cells_to_python(const std::vector<CellResult>& cells) {
  py::list out;
  for (const auto& cell : cells) {
    py::dict record;
    record["alpha"] = cell.alpha;
    record["n"] = cell.n;
    record["risk"] = cell.risk;
    record["se"] = cell.se;
    record["flag"] = cell.flag;
    record["seed"] = cell.seed;
    out.append(record);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_ldpest, m) {
  m.doc() = "Locally differentially private estimation core";

  py::class_<RandomStream>(m, "RandomStream")
      .def_static("root", &RandomStream::root, py::arg("seed"))
      .def("derive", &RandomStream::derive, py::arg("index"))
      .def("uniform_at", &RandomStream::uniform_at, py::arg("counter"))
      .def("next_uniform", &RandomStream::next_uniform);

  py::class_<PrivacyLevel>(m, "PrivacyLevel")
      .def(py::init<double>(), py::arg("alpha"))
      .def_readonly("alpha", &PrivacyLevel::alpha)
      .def_readonly("exp_alpha", &PrivacyLevel::exp_alpha)
      .def_readonly("contrast", &PrivacyLevel::contrast)
      .def_readonly("amplification", &PrivacyLevel::amplification);

  py::class_<Representer>(m, "Representer")
      .def(py::init(&representer_from_callable), py::arg("f"), py::arg("sup_norm"),
           py::arg("lo"), py::arg("hi"))
      .def("__call__",
           [](const Representer& r, double x) { return r(x); })
      .def_property_readonly("sup_norm", &Representer::sup_norm);

  py::class_<DiscreteDist>(m, "DiscreteDist")
      .def(py::init(&DiscreteDist::from_scalars), py::arg("atoms"),
           py::arg("weights"))
      .def_property_readonly("weights", &DiscreteDist::weights)
      .def("mix", &DiscreteDist::mix, py::arg("other"), py::arg("lam"));

  py::class_<DiscreteChannel>(m, "DiscreteChannel")
      .def(py::init([](const std::vector<std::vector<double>>& matrix) {
             std::vector<Point> inputs, outputs;
             for (std::size_t i = 0; i < matrix.size(); ++i)
               inputs.push_back({static_cast<double>(i)});
             for (std::size_t z = 0; !matrix.empty() && z < matrix.front().size(); ++z)
               outputs.push_back({static_cast<double>(z)});
             return DiscreteChannel(std::move(inputs), std::move(outputs), matrix);
           }),
           py::arg("matrix"));

  py::class_<BinaryChannel>(m, "BinaryChannel")
      .def(py::init<Representer, PrivacyLevel>(), py::arg("ell"), py::arg("level"))
      .def_property_readonly("z0", &BinaryChannel::z0)
      .def("success_probability",
           [](const BinaryChannel& c, double x) { return c.success_probability(x); },
           py::arg("x"))
      .def("privatize",
           [](const BinaryChannel& c, double x, RandomStream& rng) {
             return c.privatize(x, rng);
           },
           py::arg("x"), py::arg("rng"))
      .def("pushforward", &BinaryChannel::pushforward, py::arg("p"))
      .def("restrict_to_values",
           [](const BinaryChannel& c, const std::vector<double>& values) {
             return c.restrict_to_values(values);
           },
           py::arg("ell_values"));

  m.def("make_binary_channel", &make_binary_channel, py::arg("ell"),
        py::arg("level"));
  m.def("audit_privacy", &audit_privacy, py::arg("channel"));
  m.def("tv_distance", &tv_distance, py::arg("p"), py::arg("q"));
  m.def("hellinger_distance", &hellinger_distance, py::arg("p"), py::arg("q"));
  m.def("hellinger_affinity", &hellinger_affinity, py::arg("p"), py::arg("q"));

  py::class_<PolyKernel>(m, "PolyKernel")
      .def("__call__", [](const PolyKernel& k, double u) { return k(u); })
      .def("moment", &PolyKernel::moment, py::arg("j"))
      .def_property_readonly("order", &PolyKernel::order)
      .def_property_readonly("smoothness", &PolyKernel::smoothness)
      .def_property_readonly("sup_norm", &PolyKernel::sup_norm);
  m.def("build_kernel", &build_kernel, py::arg("order"), py::arg("smoothness"));

  py::class_<BandwidthSelection>(m, "BandwidthSelection")
      .def_readonly("h", &BandwidthSelection::h)
      .def_readonly("clamped", &BandwidthSelection::clamped);

  py::class_<RepresenterFamily>(m, "RepresenterFamily")
      .def("at",
           [](const RepresenterFamily& f, const std::vector<double>& h) {
             return f.at(std::span<const double>(h));
           },
           py::arg("h"))
      .def_property_readonly("r_bar",
                             [](const RepresenterFamily& f) {
                               return f.condition().r_bar();
                             })
      .def_property_readonly("rate_exponent", [](const RepresenterFamily& f) {
        return f.condition().rate_exponent();
      });

  m.def("uniform_endpoint_family", &uniform_endpoint_family, py::arg("M"));
  m.def("derivative_kernel_family", &derivative_kernel_family, py::arg("m"),
        py::arg("beta"), py::arg("L"), py::arg("x0"));
  m.def(
      "truncated_moment_family",
      [](std::function<double(double)> f, double kappa, double L) {
        return truncated_moment_family(std::move(f), kappa, L);
      },
      py::arg("f"), py::arg("kappa"), py::arg("L"));
  m.def("product_kernel_family", &product_kernel_family, py::arg("beta"),
        py::arg("L"), py::arg("x0"));
  m.def("select_bandwidth", &select_bandwidth, py::arg("family"), py::arg("n"),
        py::arg("level"));
  m.def("uniform_endpoint_representer", &uniform_endpoint_representer,
        py::arg("M"));

  py::class_<ThetaRange>(m, "ThetaRange")
      .def(py::init<double, double>(), py::arg("m_minus"), py::arg("m_plus"))
      .def_readonly("m_minus", &ThetaRange::m_minus)
      .def_readonly("m_plus", &ThetaRange::m_plus)
      .def("project", &ThetaRange::project, py::arg("x"));

  py::class_<ThetaProbMap>(m, "ThetaProbMap")
      .def_static("linear_zero_bias",
                  py::overload_cast<double>(&ThetaProbMap::linear_zero_bias),
                  py::arg("z0"))
      .def("__call__",
           [](const ThetaProbMap& map, double theta) { return map.forward(theta); });

  py::class_<BinarySearchPlan>(m, "BinarySearchPlan")
      .def_property_readonly("delta", &BinarySearchPlan::delta)
      .def_property_readonly("degenerate", &BinarySearchPlan::degenerate)
      .def_property_readonly("n_steps", &BinarySearchPlan::n_steps)
      .def_property_readonly("critical_values", &BinarySearchPlan::critical_values)
      .def_property_readonly("values", &BinarySearchPlan::values)
      .def("estimate_from_t", &BinarySearchPlan::estimate_from_t, py::arg("t"));

  m.def("sample_mean_estimate",
        [](const std::vector<double>& z, double shift, const ThetaRange& range) {
          return sample_mean_estimate(z, shift, range);
        },
        py::arg("z"), py::arg("shift"), py::arg("range"));
  m.def("critical_value_G", &critical_value_G, py::arg("s"), py::arg("t"));
  m.def("build_plan", &build_plan, py::arg("delta"), py::arg("range"),
        py::arg("map"));
  m.def("binary_search_estimate",
        [](const std::vector<double>& z, const BinarySearchPlan& plan) {
          return binary_search_estimate(z, plan);
        },
        py::arg("z"), py::arg("plan"));

  py::class_<AffineSurrogate>(m, "AffineSurrogate")
      .def_readonly("slope", &AffineSurrogate::slope)
      .def_readonly("intercept", &AffineSurrogate::intercept)
      .def_readonly("bound", &AffineSurrogate::bound)
      .def("__call__",
           [](const AffineSurrogate& g, double zbar) { return g(zbar); });
  m.def("affine_surrogate", &affine_surrogate, py::arg("plan"));
  m.def("delta_tuning", &delta_tuning, py::arg("modulus_at_root_n"),
        py::arg("a_loss"));

  py::class_<LossFn>(m, "LossFn")
      .def_readonly("gamma", &LossFn::gamma)
      .def_readonly("doubling_a", &LossFn::doubling_a)
      .def("__call__", [](const LossFn& l, double t) { return l(t); });
  m.def("loss",
        [](const std::string& tag, double gamma) { return loss(tag, gamma); },
        py::arg("tag"), py::arg("gamma"));

  py::class_<ModulusCurve>(m, "ModulusCurve")
      .def_readonly("exponent", &ModulusCurve::exponent)
      .def_readonly("scale", &ModulusCurve::scale)
      .def("__call__", [](const ModulusCurve& c, double eps) { return c(eps); });
  m.def(
      "analytic_modulus_curve",
      [](const std::string& problem, const std::string& metric, double kappa,
         double beta, int deriv_m, double r_bar, double scale) {
        CurveParams params{kappa, beta, deriv_m, r_bar, scale};
        return analytic_modulus_curve(problem_tag_from_string(problem),
                                      metric_from_string(metric), params);
      },
      py::arg("problem"), py::arg("metric"), py::arg("kappa") = 2.0,
      py::arg("beta") = 1.0, py::arg("m") = 0, py::arg("r_bar") = 1.0,
      py::arg("scale") = 1.0);

  py::class_<FiniteFamily>(m, "FiniteFamily")
      .def(py::init<>())
      .def("add",
           [](FiniteFamily& fam, const DiscreteDist& dist, double theta) {
             fam.add(dist, theta);
           },
           py::arg("dist"), py::arg("theta"))
      .def_property_readonly("size", &FiniteFamily::size)
      .def("convexify", &FiniteFamily::convexify, py::arg("lambdas"));

  m.def("brute_force_modulus",
        [](const FiniteFamily& family, double eps, const std::string& metric) {
          return brute_force_modulus(family, eps, metric_from_string(metric));
        },
        py::arg("family"), py::arg("eps"), py::arg("metric"));
  m.def("privatized_modulus", &privatized_modulus, py::arg("family"),
        py::arg("channel"), py::arg("eps"));
  m.def("lower_bound_curve", &lower_bound_curve, py::arg("n"), py::arg("level"),
        py::arg("eta"), py::arg("loss"), py::arg("curve_tv"), py::arg("curve_h"),
        py::arg("c"));

  m.def("run_experiment_json", [](const std::string& config_text) {
    const auto config =
        ExperimentConfig::from_json(nlohmann::json::parse(config_text));
    const RiskReport report = run_experiment(config);
    py::dict out;
    out["cells"] = cells_to_python(report.cells);
    out["theory_slope"] = report.theory_slope;
    return out;
  });
  m.def("fit_rate_points",
        [](const std::vector<std::pair<long, double>>& points) {
          std::vector<CellResult> cells;
          for (const auto& [n, risk] : points) {
            cells.push_back(CellResult{0.0, n, risk, 0.0, "", 0});
          }
          const RateFit fit = fit_rate(cells);
          return py::make_tuple(fit.slope, fit.intercept, fit.slope_se);
        },
        py::arg("points"));

  m.def("run_all_checks", [](std::uint64_t seed) {
    py::list out;
    for (const auto& r : run_all_checks(seed)) {
      py::dict entry;
      entry["name"] = r.name;
      entry["trials"] = r.trials;
      entry["failures"] = r.failures;
      out.append(entry);
    }
    return out;
  }, py::arg("seed") = 20260810);
}
