#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>

#include "tchedge/config.hpp"
#include "tchedge/ensemble.hpp"
#include "tchedge/error.hpp"
#include "tchedge/hedge.hpp"
#include "tchedge/noise.hpp"
#include "tchedge/runner.hpp"

namespace py = pybind11;
using namespace tchedge;

namespace {

// Summaries cross the boundary as JSON text and are decoded by the package.
std::string run_json(const ExperimentConfig& config, const std::string& command,
                     std::size_t sweep) {
  RunOutput out;
  if (command == "simulate") {
    out = run_simulate(config);
  } else if (command == "hedge") {
    out = run_hedge(config);
  } else if (command == "risk") {
    out = run_risk(config);
  } else if (command == "validate") {
    out = run_validate(config, sweep);
  } else {
    throw std::invalid_argument("unknown command " + command);
  }
  return out.summary.dump();
}

py::dict ensemble_dict(const PathEnsemble& p) {
  py::dict d;
  d["lambda_B"] = p.lambda_B;
  d["lambda_H"] = p.lambda_H;
  d["cum_B"] = p.cum_B;
  d["cum_H"] = p.cum_H;
  d["s0"] = p.s0;
  d["s1"] = p.s1;
  d["brownian"] = p.brownian;
  d["eta"] = p.eta;
  d["dB"] = p.dB;
  d["counts"] = p.counts;
  d["compensated"] = p.compensated;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tchedge, m) {
  m.doc() = "Worst-case hedging under time-changed noise";

  // Translators run newest first, so the base class is registered first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ExperimentConfig>(m, "Config")
      .def_readwrite("paths", &ExperimentConfig::paths)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("output", &ExperimentConfig::output)
      .def("serialize", &serialize_config)
      .def("hash", &config_hash);

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
  m.def("_run", &run_json, py::arg("config"), py::arg("command"), py::arg("sweep") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "simulate",
      [](const ExperimentConfig& c) {
        PathEnsemble p;
        {
          py::gil_scoped_release release;
          p = simulate_ensemble(c.model(), c.paths, c.seed);
        }
        return ensemble_dict(p);
      },
      py::arg("config"));

  m.def(
      "hedge",
      [](const ExperimentConfig& c) {
        PathEnsemble p;
        HedgeResult h;
        {
          py::gil_scoped_release release;
          p = simulate_ensemble(c.model(), c.paths, c.seed);
          h = hedge_claim(c.claim.build(), p, c.make_basis(), c.filtration, c.scenario.bound);
        }
        py::dict d;
        d["v"] = h.v;
        d["claim"] = h.claim;
        d["pi"] = h.pi_hat;
        d["y"] = h.y_hat;
        d["wealth"] = h.wealth;
        d["cost"] = h.cost;
        d["z"] = h.z_hat;
        d["u"] = h.u_hat;
        d["max_drift_residual"] = h.scenario.max_residual;
        d["s1"] = p.s1;
        d["discount"] = Eigen::VectorXd(p.discount());
        return d;
      },
      py::arg("config"));

  m.def("brownian_char_function", &brownian_char_function, py::arg("c"), py::arg("cum_B"));
  m.def(
      "eta_char_function",
      [](double c, double cum_H, std::vector<double> marks, std::vector<double> weights) {
        return eta_char_function(c, cum_H, JumpMeasure(std::move(marks), std::move(weights)));
      },
      py::arg("c"), py::arg("cum_H"), py::arg("marks"), py::arg("weights"));
  m.def(
      "market_price_of_risk",
      [](double rate, double drift, double volatility, std::vector<double> gamma, double lambda_B,
         double lambda_H, std::vector<double> marks, std::vector<double> weights) {
        const JumpMeasure nu(std::move(marks), std::move(weights));
        const NodeScenario s =
            solve_market_price_node(rate, drift, volatility, gamma, lambda_B, lambda_H, nu);
        py::dict d;
        d["theta_B"] = s.theta_B;
        d["theta_H"] = s.theta_H;
        d["kappa"] = s.kappa;
        d["residual"] = s.residual;
        return d;
      },
      py::arg("rate"), py::arg("drift"), py::arg("volatility"), py::arg("gamma"),
      py::arg("lambda_B"), py::arg("lambda_H"), py::arg("marks"), py::arg("weights"));
}
