#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "arspo/cli.hpp"
#include "arspo/config.hpp"
#include "arspo/dca.hpp"
#include "arspo/dynamics.hpp"
#include "arspo/errors.hpp"
#include "arspo/group_norm.hpp"
#include "arspo/metrics.hpp"
#include "arspo/reward_shaping.hpp"
#include "arspo/train.hpp"
#include "arspo/verify.hpp"

namespace py = pybind11;
using namespace arspo;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  }
  return rows;
}

// JSON crosses the boundary as text; the Python side parses it.
std::string verify_json(const std::string& suite) {
  std::vector<SuiteReport> reports;
  if (suite == "all") {
    for (const auto& name : suite_names()) reports.push_back(run_suite(name));
  } else {
    reports.push_back(run_suite(suite));
  }
  return verify_report_json(reports).dump();
}

std::string run_summary_json(const std::string& config_path, std::uint64_t seed, std::int64_t steps) {
  ExperimentConfig config = load_config(config_path);
  if (steps >= 0) config.training.steps = steps;
  const TrainingTrace trace = [&] {
    py::gil_scoped_release release;
    return train(config, seed);
  }();
  return summary_json(config, trace).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of arspo_lab";

  auto base = py::register_exception<Error>(m, "ArspoError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<BoundaryError>(m, "BoundaryError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("iou_box", [](std::array<double, 4> a, std::array<double, 4> b) {
    return iou_box({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]}).value;
  }, py::arg("a"), py::arg("b"));
  m.def("tiou", [](std::array<double, 2> a, std::array<double, 2> b) {
    return tiou_interval({a[0], a[1]}, {b[0], b[1]}).value;
  }, py::arg("a"), py::arg("b"));
  m.def("span_f1", [](const TokenIndexSet& p, const TokenIndexSet& g) { return span_f1(p, g).value; },
        py::arg("pred"), py::arg("gt"));

  py::class_<RewardMapping>(m, "RewardMapping")
      .def_static("identity", &RewardMapping::identity)
      .def_static("exponential", &RewardMapping::exponential, py::arg("a"))
      .def_static("normalized_exponential", &RewardMapping::normalized_exponential, py::arg("alpha"))
      .def_static("step", &RewardMapping::step, py::arg("tau"))
      .def_static("relaxed", &RewardMapping::relaxed, py::arg("lam"), py::arg("inner"))
      .def("__call__", &RewardMapping::operator(), py::arg("x"), py::arg("proxy") = 0.0)
      .def("derivative", &RewardMapping::derivative, py::arg("x"), py::arg("proxy") = 0.0)
      .def("__repr__", [](const RewardMapping& g) { return "RewardMapping(" + g.describe() + ")"; });

  m.def("format_reward", [](const std::string& text, double bonus) { return format_reward(text, bonus); },
        py::arg("text"), py::arg("bonus") = RewardDefaults{}.format_bonus);
  m.def("repetition_penalty",
        [](const std::vector<std::int64_t>& tokens, std::size_t n, double lambda_pen) {
          return repetition_penalty(std::span<const std::int64_t>(tokens), n, lambda_pen);
        },
        py::arg("tokens"), py::arg("n") = RewardDefaults{}.ngram, py::arg("lambda_pen") = RewardDefaults{}.lambda_pen);

  m.def("normalize_group",
        [](const std::vector<double>& rewards, double floor) {
          const NormalizedGroup g = normalize_group(rewards, floor);
          py::dict out;
          out["advantages"] = g.advantages;
          out["mu"] = g.mu;
          out["sigma"] = g.sigma;
          out["degenerate"] = g.degenerate;
          return out;
        },
        py::arg("rewards"), py::arg("sigma_floor") = kDefaultSigmaFloor);
  m.def("advantage_jacobian",
        [](const std::vector<double>& rewards) { return to_rows(advantage_jacobian(normalize_group(rewards))); },
        py::arg("rewards"));

  m.def("sensitivity_profile",
        [](const std::vector<double>& metrics, const RewardMapping& g) {
          std::vector<MetricValue> values;
          for (double x : metrics) values.push_back(MetricValue::make(x, MetricKind::iou));
          return sensitivity_profile(values, g).values;
        },
        py::arg("metrics"), py::arg("mapping"));

  m.def("rescale", &rescale, py::arg("coefficients"));

  m.def("suite_names", &suite_names);
  m.def("_verify_json", &verify_json, py::arg("suite") = "all");
  m.def("_run_summary_json", &run_summary_json, py::arg("config"), py::arg("seed"), py::arg("steps") = -1);
  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::vector<std::string> full{"arspo_lab"};
          full.insert(full.end(), args.begin(), args.end());
          std::vector<const char*> argv;
          for (const auto& a : full) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
