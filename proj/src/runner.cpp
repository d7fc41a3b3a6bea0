#include "tchedge/runner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "tchedge/error.hpp"
#include "tchedge/io.hpp"

namespace tchedge {
namespace {

using Eigen::Index;
using nlohmann::json;

Index idx(std::size_t v) { return static_cast<Index>(v); }

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::filesystem::path output_dir(const ExperimentConfig& c) {
  std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  return dir;
}

json grid_json(const ExperimentConfig& c) {
  return {{"horizon", c.horizon}, {"steps", c.steps}, {"dt", c.horizon / double(c.steps)}};
}

json manifest(const ExperimentConfig& c, const std::string& command,
              const std::vector<std::string>& files) {
  return {{"command", command},
          {"seed", c.seed},
          {"config_hash", config_hash(c)},
          {"paths", c.paths},
          {"grid", grid_json(c)},
          {"filtration", c.filtration == Filtration::F ? "F" : "G"},
          {"files", files}};
}

json schema() {
  json s;
  s["paths.csv"] = {{"row", "one simulated cell (path, cell)"},
                    {"columns",
                     {{"path", "path index"},
                      {"cell", "cell index i, covering [t_i, t_{i+1})"},
                      {"t", "left node time t_i"},
                      {"lambda_B", "Brownian clock rate at t_i"},
                      {"lambda_H", "jump clock rate at t_i"},
                      {"cum_B", "integrated Brownian clock at t_i"},
                      {"cum_H", "integrated jump clock at t_i"},
                      {"s0", "bond price at t_i"},
                      {"s1", "stock price at t_i"},
                      {"s1_next", "stock price at t_{i+1}"},
                      {"B", "running Brownian field at t_i"},
                      {"eta", "running compensated jump field at t_i"},
                      {"dB", "Brownian increment over the cell"},
                      {"count_<j>", "jump count of mark j over the cell"},
                      {"compensated_<j>", "compensated jump count of mark j over the cell"}}}};
  s["hedge_nodes.csv"] = {
      {"row", "one grid node, statistics across paths"},
      {"columns",
       {{"node", "node index"},
        {"t", "node time"},
        {"pi_mean", "mean optimal portfolio (nan at the terminal node)"},
        {"pi_max_abs", "max |optimal portfolio| (nan at the terminal node)"},
        {"pi_rms", "root mean square optimal portfolio (nan at the terminal node)"},
        {"y_mean", "mean optimal price"},
        {"wealth_mean", "mean self-financing wealth"},
        {"cost_mean", "mean cost process"},
        {"cost_rms", "root mean square cost process"},
        {"cost_max_abs", "max |cost process|"},
        {"predicted_cost_mean", "mean cost implied by the representation remainder"},
        {"residual_B_rms", "rms Brownian hedging residual (nan at the terminal node)"},
        {"residual_H_rms", "rms jump hedging residual (nan at the terminal node)"},
        {"theta_B_mean", "mean worst-case Brownian shift (nan at the terminal node)"}}}};
  s["hedge_paths.csv"] = {{"row", "one (path, node) of the dumped paths"},
                          {"columns",
                           {{"path", "path index"},
                            {"node", "node index"},
                            {"t", "node time"},
                            {"s1", "stock price"},
                            {"pi", "optimal portfolio (nan at the terminal node)"},
                            {"y", "optimal price"},
                            {"wealth", "self-financing wealth"},
                            {"cost", "cost process"}}}};
  s["bsde_diagnostics.csv"] = {
      {"row", "one backward regression node"},
      {"columns",
       {{"node", "node index"},
        {"columns", "design columns after pruning"},
        {"residual_rms", "root mean square regression residual"},
        {"condition", "condition number of the equilibrated normal matrix"},
        {"standard_error", "regression standard error"}}}};
  return s;
}

double rms(const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / double(v.size())); }

PathEnsemble simulate(const ExperimentConfig& c) {
  return stage("simulate", [&] { return simulate_ensemble(c.model(), c.paths, c.seed); });
}

WorstCaseScenario make_scenario(const ExperimentConfig& c, const PathEnsemble& paths) {
  return stage("scenario", [&] {
    if (c.scenario.rule == "user_supplied") {
      auto shift = ScenarioShift::constant(paths.steps(), c.scenario.theta_B, c.scenario.theta_H,
                                           c.scenario.bound, c.filtration);
      return user_scenario(ShiftEnsemble::uniform(std::move(shift)), paths);
    }
    return solve_market_price_equation(paths, c.scenario.bound, c.filtration);
  });
}

struct HedgeRun {
  PathEnsemble paths;
  HedgeResult hedge;
  Basis basis = Basis::polynomial(Filtration::F);
};

HedgeRun run_pipeline(const ExperimentConfig& c) {
  HedgeRun run{simulate(c), {}, c.make_basis()};
  const Eigen::VectorXd claim =
      stage("claim", [&] { return evaluate(c.claim.build(), run.paths); });
  const WorstCaseScenario scenario = make_scenario(c, run.paths);
  const Representation rep = stage("representation", [&] {
    return martingale_representation(claim, scenario, c.filtration, run.paths, run.basis);
  });
  const PortfolioFit fit = stage("portfolio", [&] { return optimal_portfolio(rep, run.paths); });
  run.hedge =
      stage("cost", [&] { return optimal_price_and_cost(claim, scenario, rep, fit, run.paths); });
  return run;
}

// Seller's discounted terminal positions.
Eigen::VectorXd unhedged_position(const HedgeRun& run) {
  const Index N = idx(run.paths.steps());
  return (run.hedge.wealth.col(N) - run.hedge.claim).cwiseProduct(run.paths.discount());
}

Eigen::VectorXd hedged_spread(const HedgeRun& run) {
  const Index N = idx(run.paths.steps());
  return (run.hedge.y_hat.col(N) - run.hedge.claim).cwiseProduct(run.paths.discount());
}

json scenario_json(const WorstCaseScenario& s, const PathEnsemble& paths) {
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
  std::vector<double> hmin(J, bmin), hmax(J, -bmin);
  for (std::size_t p = 0; p < s.theta_hat.stored(); ++p) {
    const ScenarioShift& sh = s.theta_hat[p];
    for (std::size_t i = 0; i < N; ++i) {
      bmin = std::min(bmin, sh.theta_B[i]);
      bmax = std::max(bmax, sh.theta_B[i]);
      for (std::size_t j = 0; j < J; ++j) {
        hmin[j] = std::min(hmin[j], sh.theta_H(i, j));
        hmax[j] = std::max(hmax[j], sh.theta_H(i, j));
      }
    }
  }
  const bool zero = bmin == 0.0 && bmax == 0.0 &&
                    std::all_of(hmin.begin(), hmin.end(), [](double v) { return v == 0.0; }) &&
                    std::all_of(hmax.begin(), hmax.end(), [](double v) { return v == 0.0; });
  return {{"rule", s.rule == SelectionRule::minimal_norm ? "minimal_norm" : "user_supplied"},
          {"uniform", s.theta_hat.is_uniform()},
          {"theta_B_min", bmin},
          {"theta_B_max", bmax},
          {"theta_H_min", hmin},
          {"theta_H_max", hmax},
          {"theta_hat_zero", zero},
          {"kappa_min", s.kappa.minCoeff()},
          {"kappa_max", s.kappa.maxCoeff()},
          {"max_drift_residual", s.max_residual}};
}

json saddle_json(const SaddleReport& r) {
  json checks = json::array();
  for (const auto& c : r.simulation) {
    checks.push_back({{"label", c.label},
                      {"pi_factor", c.pi_factor},
                      {"theta_B_factor", c.theta_B_factor},
                      {"theta_H_factor", c.theta_H_factor},
                      {"value", c.value},
                      {"difference", c.difference},
                      {"predicted_difference", c.predicted_difference},
                      {"standard_error", c.standard_error},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  return {{"saddle_value", r.saddle_value},
          {"saddle_standard_error", r.saddle_standard_error},
          {"driver_max_theta_excess", r.driver_max_theta_excess},
          {"driver_max_pi_excess", r.driver_max_pi_excess},
          {"driver_max_theta_B_only_excess", r.driver_max_theta_B_only_excess},
          {"driver_passed", r.driver_passed},
          {"simulation", checks},
          {"passed", r.passed}};
}

json risk_json(const RiskEstimate& r) {
  return {{"value", r.value},
          {"argmax", r.argmax},
          {"scenario_values", r.scenario_values},
          {"per_path_mean", r.per_path.mean()},
          {"per_path_min", r.per_path.minCoeff()},
          {"per_path_max", r.per_path.maxCoeff()},
          {"lower_bound", true}};
}

void write_simulation(const ExperimentConfig& c, const PathEnsemble& paths,
                      const std::filesystem::path& file) {
  const std::size_t dumped = std::min(c.dumped_paths, paths.size());
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  std::vector<std::string> header{"path",  "cell",  "t",  "lambda_B", "lambda_H",
                                  "cum_B", "cum_H", "s0", "s1",       "s1_next",
                                  "B",     "eta",   "dB"};
  for (std::size_t j = 0; j < J; ++j) header.push_back("count_" + std::to_string(j));
  for (std::size_t j = 0; j < J; ++j) header.push_back("compensated_" + std::to_string(j));
  std::vector<std::vector<double>> rows;
  rows.reserve(dumped * N);
  for (std::size_t p = 0; p < dumped; ++p) {
    const Index r = idx(p);
    for (std::size_t i = 0; i < N; ++i) {
      const Index k = idx(i);
      std::vector<double> row{double(p),
                              double(i),
                              paths.grid.time(i),
                              paths.lambda_B(r, k),
                              paths.lambda_H(r, k),
                              paths.cum_B(r, k),
                              paths.cum_H(r, k),
                              paths.s0(r, k),
                              paths.s1(r, k),
                              paths.s1(r, k + 1),
                              paths.brownian(r, k),
                              paths.eta(r, k),
                              paths.dB(r, k)};
      for (std::size_t j = 0; j < J; ++j) row.push_back(paths.counts[j](r, k));
      for (std::size_t j = 0; j < J; ++j) row.push_back(paths.compensated[j](r, k));
      rows.push_back(std::move(row));
    }
  }
  write_csv(file, header, rows);
}

}  // namespace

RunOutput run_simulate(const ExperimentConfig& config) {
  RunOutput out;
  out.directory = output_dir(config);
  const PathEnsemble paths = simulate(config);
  stage("output", [&] {
    write_simulation(config, paths, out.directory / "paths.csv");
    out.summary = manifest(config, "simulate", {"paths.csv", "schema.json"});
    out.summary["dumped_paths"] = std::min(config.dumped_paths, paths.size());
    write_json(out.directory / "manifest.json", out.summary);
    write_json(out.directory / "schema.json", schema());
    out.files = {out.directory / "paths.csv", out.directory / "manifest.json",
                 out.directory / "schema.json"};
    return 0;
  });
  return out;
}

RunOutput run_hedge(const ExperimentConfig& config) {
  RunOutput out;
  out.directory = output_dir(config);
  const HedgeRun run = run_pipeline(config);
  const HedgeResult& h = run.hedge;
  const PathEnsemble& paths = run.paths;
  const std::size_t N = paths.steps();
  const std::size_t n = paths.size();

  const SaddleReport saddle = stage("saddle", [&] { return verify_saddle(h, paths); });
  const auto family = stage("risk", [&] {
    return scenario_family(h.scenario, config.risk.scalings, config.risk.jump_tilts);
  });
  const Eigen::VectorXd unhedged = unhedged_position(run);
  const Eigen::VectorXd spread = hedged_spread(run);
  const RiskEstimate risk_unhedged = stage("risk", [&] {
    return risk_measure(std::span<const double>(unhedged.data(), n), family, 0, paths, run.basis);
  });
  const RiskEstimate risk_spread = stage("risk", [&] {
    return risk_measure(std::span<const double>(spread.data(), n), family, 0, paths, run.basis);
  });

  stage("output", [&] {
    std::vector<std::vector<double>> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double max_cost_mean = 0.0, max_cost_rms = 0.0, max_cost_abs = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
      const Index k = idx(i);
      const bool cell = i < N;
      const Eigen::VectorXd cost = h.cost.col(k);
      max_cost_mean = std::max(max_cost_mean, std::abs(cost.mean()));
      max_cost_rms = std::max(max_cost_rms, rms(cost));
      max_cost_abs = std::max(max_cost_abs, cost.cwiseAbs().maxCoeff());
      double theta_B_mean = nan;
      if (cell) {
        theta_B_mean = 0.0;
        for (std::size_t p = 0; p < n; ++p) theta_B_mean += h.scenario.theta_hat[p].theta_B[i];
        theta_B_mean /= double(n);
      }
      rows.push_back({double(i), paths.grid.time(i), cell ? h.pi_hat.col(k).mean() : nan,
                      cell ? h.pi_hat.col(k).cwiseAbs().maxCoeff() : nan,
                      cell ? rms(h.pi_hat.col(k)) : nan, h.y_hat.col(k).mean(),
                      h.wealth.col(k).mean(), cost.mean(), rms(cost), cost.cwiseAbs().maxCoeff(),
                      h.predicted_cost.col(k).mean(), cell ? rms(h.residual_B.col(k)) : nan,
                      cell ? rms(h.residual_H.col(k)) : nan, theta_B_mean});
    }
    write_csv(out.directory / "hedge_nodes.csv",
              {"node", "t", "pi_mean", "pi_max_abs", "pi_rms", "y_mean", "wealth_mean", "cost_mean",
               "cost_rms", "cost_max_abs", "predicted_cost_mean", "residual_B_rms",
               "residual_H_rms", "theta_B_mean"},
              rows);

    rows.clear();
    const std::size_t dumped = std::min(config.dumped_paths, n);
    for (std::size_t p = 0; p < dumped; ++p) {
      const Index r = idx(p);
      for (std::size_t i = 0; i <= N; ++i) {
        const Index k = idx(i);
        rows.push_back({double(p), double(i), paths.grid.time(i), paths.s1(r, k),
                        i < N ? h.pi_hat(r, k) : nan, h.y_hat(r, k), h.wealth(r, k), h.cost(r, k)});
      }
    }
    write_csv(out.directory / "hedge_paths.csv",
              {"path", "node", "t", "s1", "pi", "y", "wealth", "cost"}, rows);

    rows.clear();
    for (const auto& d : h.diagnostics) {
      rows.push_back(
          {double(d.node), double(d.columns), d.residual_rms, d.condition, d.standard_error});
    }
    write_csv(out.directory / "bsde_diagnostics.csv",
              {"node", "columns", "residual_rms", "condition", "standard_error"}, rows);

    json s = manifest(config, "hedge",
                      {"hedge_nodes.csv", "hedge_paths.csv", "bsde_diagnostics.csv", "summary.json",
                       "schema.json"});
    s["claim"] = config.claim.type;
    s["v"] = h.v;
    s["C_0_mean"] = h.cost.col(0).mean();
    s["C_0_rms"] = rms(h.cost.col(0));
    s["Y_0_mean"] = h.y_hat.col(0).mean();
    s["max_abs_pi"] = h.pi_hat.cwiseAbs().maxCoeff();
    double max_pi_rms = 0.0;
    for (Index k = 0; k < h.pi_hat.cols(); ++k) {
      max_pi_rms = std::max(max_pi_rms, rms(h.pi_hat.col(k)));
    }
    s["max_pi_rms"] = max_pi_rms;
    s["max_abs_cost_mean"] = max_cost_mean;
    s["max_cost_rms"] = max_cost_rms;
    s["max_abs_cost"] = max_cost_abs;
    s["max_terminal_mismatch"] = (h.y_hat.col(idx(N)) - h.claim).cwiseAbs().maxCoeff();
    s["residual_B_rms"] = std::sqrt(h.residual_B.squaredNorm() / double(h.residual_B.size()));
    s["residual_H_rms"] = std::sqrt(h.residual_H.squaredNorm() / double(h.residual_H.size()));
    // Soft diagnostic only: sup over paths and nodes of |[B^theta, M]| with
    // M the discounted value process under the worst-case scenario.
    double covariation = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const Index r = idx(p);
      const ScenarioShift& sh = h.scenario.theta_hat[p];
      double running = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const Index c = idx(i);
        const double dB = paths.dB(r, c) - sh.theta_B[i] * paths.lambda_B(r, c) * paths.dt();
        const double dM = h.y_hat(r, c + 1) / paths.s0(r, c + 1) - h.y_hat(r, c) / paths.s0(r, c);
        running += dB * dM;
        covariation = std::max(covariation, std::abs(running));
      }
    }
    s["sup_abs_covariation_B_M"] = covariation;
    s["least_squares_portfolio"] = true;
    s["degenerate_nodes"] = h.degenerate_nodes;
    s["scenario"] = scenario_json(h.scenario, paths);
    s["rho_0"] = risk_json(risk_unhedged);
    s["rho_0_hedged_spread"] = risk_json(risk_spread);
    s["saddle"] = saddle_json(saddle);
    out.summary = s;
    write_json(out.directory / "summary.json", s);
    write_json(out.directory / "schema.json", schema());
    out.files = {out.directory / "hedge_nodes.csv", out.directory / "hedge_paths.csv",
                 out.directory / "bsde_diagnostics.csv", out.directory / "summary.json",
                 out.directory / "schema.json"};
    return 0;
  });
  return out;
}

RunOutput run_risk(const ExperimentConfig& config) {
  RunOutput out;
  out.directory = output_dir(config);
  const HedgeRun run = run_pipeline(config);
  const std::size_t n = run.paths.size();
  const std::size_t mid = run.paths.steps() / 2;
  const auto family = stage("risk", [&] {
    return scenario_family(run.hedge.scenario, config.risk.scalings, config.risk.jump_tilts);
  });
  const Eigen::VectorXd short_claim = -run.hedge.claim.cwiseProduct(run.paths.discount());
  const std::vector<std::pair<std::string, Eigen::VectorXd>> positions{
      {"short_claim", short_claim},
      {"unhedged", unhedged_position(run)},
      {"hedged_spread", hedged_spread(run)}};
  json positions_json;
  stage("risk", [&] {
    for (const auto& [name, x] : positions) {
      const std::span<const double> view(x.data(), n);
      positions_json[name] = {
          {"t0", risk_json(risk_measure(view, family, 0, run.paths, run.basis))},
          {"t_mid", risk_json(risk_measure(view, family, mid, run.paths, run.basis))}};
    }
    return 0;
  });
  stage("output", [&] {
    json s = manifest(config, "risk", {"risk.json"});
    s["family_size"] = family.size();
    s["scalings"] = config.risk.scalings;
    s["jump_tilts"] = config.risk.jump_tilts;
    s["mid_node"] = mid;
    s["positions"] = positions_json;
    out.summary = s;
    write_json(out.directory / "risk.json", s);
    out.files = {out.directory / "risk.json"};
    return 0;
  });
  return out;
}

bool ValidationReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

std::size_t ValidationReport::pass_count() const {
  return static_cast<std::size_t>(std::count_if(properties.begin(), properties.end(),
                                                [](const PropertyResult& p) { return p.passed; }));
}

json to_json(const PropertyResult& r) {
  return {{"suite", r.suite},         {"name", r.name},     {"passed", r.passed},
          {"estimate", r.estimate},   {"target", r.target}, {"standard_error", r.standard_error},
          {"tolerance", r.tolerance}, {"detail", r.detail}};
}

namespace {

PropertyResult within(std::string suite, std::string name, double estimate, double target,
                      double se, double multiplier, double floor = 1e-12) {
  PropertyResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.estimate = estimate;
  r.target = target;
  r.standard_error = se;
  r.tolerance = multiplier * se + floor;
  r.passed = std::abs(estimate - target) <= r.tolerance;
  return r;
}

PropertyResult exact(std::string suite, std::string name, double estimate, double tolerance,
                     std::string detail = {}) {
  PropertyResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.estimate = estimate;
  r.tolerance = tolerance;
  r.passed = std::abs(estimate) <= tolerance;
  r.detail = std::move(detail);
  return r;
}

PropertyResult failure(std::string suite, std::string name, std::string detail) {
  PropertyResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.passed = false;
  r.detail = std::move(detail);
  return r;
}

std::string label(const std::string& base, double c, std::size_t node) {
  std::ostringstream s;
  s << base << " c=" << c << " node=" << node;
  return s.str();
}

// exp(i c X) minus its conditional closed form given the clock; the mean is
// zero by the tower property whatever the clock law.
void char_properties(const PathEnsemble& paths, std::vector<PropertyResult>& out) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  for (std::size_t node : {N / 2, N}) {
    for (double c : {0.5, 1.0, 2.0}) {
      for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> re(n), im(n);
        for (std::size_t p = 0; p < n; ++p) {
          const Index r = idx(p), k = idx(node);
          const double x = comp == 0 ? paths.brownian(r, k) : paths.eta(r, k);
          const std::complex<double> closed =
              comp == 0 ? brownian_char_function(c, paths.cum_B(r, k))
                        : eta_char_function(c, paths.cum_H(r, k), paths.jumps);
          const std::complex<double> d = std::exp(std::complex<double>(0.0, c * x)) - closed;
          re[p] = d.real();
          im[p] = d.imag();
        }
        for (int part = 0; part < 2; ++part) {
          const auto& v = part == 0 ? re : im;
          const Eigen::Map<const Eigen::VectorXd> m(v.data(), idx(n));
          const double mean = m.mean();
          const double sd = std::sqrt((m.array() - mean).square().sum() / double(n - 1));
          out.push_back(within("noise",
                               label(std::string(comp == 0 ? "char_B" : "char_eta") +
                                         (part == 0 ? "_real" : "_imag"),
                                     c, node),
                               mean, 0.0, sd / std::sqrt(double(n)), 3.0));
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate_properties(const ExperimentConfig& config) {
  ValidationReport report;
  report.seed = config.seed;
  auto& props = report.properties;
  const PathEnsemble paths = simulate(config);
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const Index NN = idx(N);

  {
    double worst = 0.0;
    for (Index k = 0; k < NN; ++k) {
      worst = std::min(worst, (paths.cum_B.col(k + 1) - paths.cum_B.col(k)).minCoeff());
      worst = std::min(worst, (paths.cum_H.col(k + 1) - paths.cum_H.col(k)).minCoeff());
    }
    worst = std::min({worst, paths.lambda_B.minCoeff(), paths.lambda_H.minCoeff()});
    props.push_back(exact("intensity", "clock_nonnegative_nondecreasing", worst, 0.0));
  }
  char_properties(paths, props);

  // Admissibility of the configured scenario rule.
  std::optional<WorstCaseScenario> scenario;
  try {
    scenario = make_scenario(config, paths);
    props.push_back(exact("admissibility", "scenario_admissible", 0.0, 0.0, config.scenario.rule));
  } catch (const StageError& e) {
    props.push_back(failure("admissibility", "scenario_admissible", e.what()));
  }
  if (!scenario) return report;

  const Eigen::MatrixXd z = density_paths(scenario->theta_hat, paths);
  const Eigen::VectorXd zt = z.col(NN);
  {
    const double mean = zt.mean();
    const double sd = std::sqrt((zt.array() - mean).square().sum() / double(n - 1));
    props.push_back(
        within("girsanov", "density_normalization", mean, 1.0, sd / std::sqrt(double(n)), 3.0));
    PropertyResult second =
        exact("girsanov", "density_second_moment_finite", zt.squaredNorm() / double(n), 0.0);
    second.passed = std::isfinite(second.estimate);
    props.push_back(second);
  }
  {
    Eigen::VectorXd sum_b = Eigen::VectorXd::Zero(idx(n));
    std::vector<Eigen::VectorXd> sum_h(J, Eigen::VectorXd::Zero(idx(n)));
    for (std::size_t p = 0; p < n; ++p) {
      const auto fields = shifted_fields(scenario->theta_hat[p], paths.noise_path(p), paths.jumps);
      for (std::size_t i = 0; i < N; ++i) {
        sum_b(idx(p)) += fields.dB[i];
        for (std::size_t j = 0; j < J; ++j) sum_h[j](idx(p)) += fields.compensated(i, j);
      }
    }
    const std::span<const double> w(zt.data(), n);
    const auto mb = reweighted_expectation(w, std::span<const double>(sum_b.data(), n));
    props.push_back(
        within("girsanov", "shifted_brownian_martingale", mb.value, 0.0, mb.standard_error, 3.0));
    for (std::size_t j = 0; j < J; ++j) {
      const auto mh = reweighted_expectation(w, std::span<const double>(sum_h[j].data(), n));
      props.push_back(within("girsanov", "shifted_jump_martingale_" + std::to_string(j), mh.value,
                             0.0, mh.standard_error, 3.0));
    }
  }
  props.push_back(exact("hedge", "drift_equation_residual", scenario->max_residual, 1e-10));
  {
    const Eigen::VectorXd disc = paths.s1.col(NN).cwiseProduct(paths.discount());
    const auto m = reweighted_expectation(std::span<const double>(zt.data(), n),
                                          std::span<const double>(disc.data(), n));
    props.push_back(
        within("market", "risk_neutral_stock", m.value, paths.s1(0, 0), m.standard_error, 3.0));
  }

  std::optional<HedgeRun> run;
  try {
    run = run_pipeline(config);
  } catch (const StageError& e) {
    props.push_back(failure("hedge", "pipeline", e.what()));
    return report;
  }
  const HedgeResult& h = run->hedge;
  props.push_back(exact("hedge", "terminal_hedge_exact",
                        (h.y_hat.col(NN) - h.claim).cwiseAbs().maxCoeff(), 0.0));
  {
    const Eigen::VectorXd dF = h.claim.cwiseProduct(paths.discount());
    const auto m = reweighted_expectation(std::span<const double>(zt.data(), n),
                                          std::span<const double>(dF.data(), n));
    props.push_back(
        within("hedge", "discounted_price_martingale", h.v, m.value, m.standard_error, 3.0));
  }
  const auto family = scenario_family(h.scenario, config.risk.scalings, config.risk.jump_tilts);
  {
    const Eigen::VectorXd spread = hedged_spread(*run);
    const auto r =
        risk_measure(std::span<const double>(spread.data(), n), family, 0, paths, run->basis);
    props.push_back(exact("risk", "hedged_spread_zero", r.value, 0.0));

    const Eigen::VectorXd x = unhedged_position(*run);
    const auto base =
        risk_measure(std::span<const double>(x.data(), n), family, 0, paths, run->basis);
    const double scale = 1e-12 * (1.0 + std::abs(base.value));
    const Eigen::VectorXd x2 = 2.5 * x;
    const auto homog =
        risk_measure(std::span<const double>(x2.data(), n), family, 0, paths, run->basis);
    props.push_back(
        exact("risk", "positive_homogeneity", homog.value - 2.5 * base.value, 2.5 * scale));
    const Eigen::VectorXd x3 = x.array() + 1.0;
    const auto shifted =
        risk_measure(std::span<const double>(x3.data(), n), family, 0, paths, run->basis);
    props.push_back(exact("risk", "cash_translation", shifted.value - (base.value - 1.0), scale));
  }
  {
    const SaddleReport saddle = verify_saddle(h, paths);
    PropertyResult d =
        exact("saddle", "driver_saddle",
              std::max(saddle.driver_max_theta_excess, saddle.driver_max_pi_excess), 1e-9);
    std::ostringstream info;
    info << "theta_B-only driver excess " << saddle.driver_max_theta_B_only_excess;
    d.detail = info.str();
    props.push_back(d);
    for (const auto& c : saddle.simulation) {
      PropertyResult r;
      r.suite = "saddle";
      r.name = "simulation " + c.label;
      r.estimate = c.difference;
      r.standard_error = c.standard_error;
      r.tolerance = c.tolerance;
      r.passed = c.passed;
      r.detail = c.pi_factor == 1.0 ? "value must not rise" : "value must not fall";
      props.push_back(r);
    }
  }
  return report;
}

RunOutput run_validate(const ExperimentConfig& config, std::size_t sweep) {
  RunOutput out;
  out.directory = output_dir(config);
  json seeds = json::array();
  bool all = true;
  for (std::size_t s = 0; s < std::max<std::size_t>(sweep, 1); ++s) {
    ExperimentConfig c = config;
    c.seed = config.seed + s;
    const ValidationReport r = validate_properties(c);
    json props = json::array();
    for (const auto& p : r.properties) props.push_back(to_json(p));
    seeds.push_back(
        {{"seed", c.seed},
         {"passed", r.passed()},
         {"pass_count", r.pass_count()},
         {"total", r.properties.size()},
         {"pass_rate",
          r.properties.empty() ? 0.0 : double(r.pass_count()) / double(r.properties.size())},
         {"properties", props}});
    all = all && r.passed();
  }
  stage("output", [&] {
    json s = manifest(config, "validate", {"validation.json"});
    s["sweep"] = std::max<std::size_t>(sweep, 1);
    s["passed"] = all;
    s["seeds"] = seeds;
    out.summary = s;
    write_json(out.directory / "validation.json", s);
    out.files = {out.directory / "validation.json"};
    return 0;
  });
  return out;
}

}  // namespace tchedge
