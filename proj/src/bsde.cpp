#include "tchedge/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "tchedge/error.hpp"
#include "tchedge/random.hpp"
#include "tchedge/regression.hpp"

namespace tchedge {
namespace {

using Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

bool nonzero(const Eigen::VectorXd& v) { return (v.array() != 0.0).any(); }

// [phi, phi * x_1, phi * x_2, ...] for the nonzero regressor columns.
Eigen::MatrixXd joint_design(const Eigen::MatrixXd& phi, const std::vector<Eigen::VectorXd>& xs) {
  const Index p = phi.cols();
  Eigen::MatrixXd out(phi.rows(), p * idx(1 + xs.size()));
  out.leftCols(p) = phi;
  for (std::size_t b = 0; b < xs.size(); ++b) {
    out.middleCols(p * idx(b + 1), p) = phi.array().colwise() * xs[b].array();
  }
  return out;
}

void check_terminal(std::span<const double> terminal, const PathEnsemble& paths) {
  if (terminal.size() != paths.size()) {
    throw std::invalid_argument("terminal sample does not match the ensemble");
  }
  for (double x : terminal) {
    if (!std::isfinite(x)) throw std::invalid_argument("terminal value is not finite");
  }
}

}  // namespace

DriverSpec DriverSpec::zero(Filtration filtration) {
  return DriverSpec{[](const DriverInput&) { return 0.0; }, 0.0, filtration};
}

LipschitzProbe probe_lipschitz(const DriverSpec& driver, const PathEnsemble& paths,
                               std::size_t probes, std::uint64_t seed) {
  auto rng = path_stream(seed, 0, Stream::probe);
  std::uniform_int_distribution<std::size_t> pick_path(0, paths.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_node(0, paths.steps() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t J = paths.marks();
  std::vector<double> ua(J), ub(J);
  LipschitzProbe out;
  for (std::size_t k = 0; k < probes; ++k) {
    const std::size_t p = pick_path(rng);
    const std::size_t i = pick_node(rng);
    DriverInput a{p,
                  i,
                  paths.grid.time(i),
                  paths.lambda_B(idx(p), idx(i)),
                  paths.lambda_H(idx(p), idx(i)),
                  normal(rng),
                  normal(rng),
                  {}};
    DriverInput b = a;
    b.y = normal(rng);
    b.z = normal(rng);
    double dist = std::abs(a.y - b.y) + std::abs(a.z - b.z) * std::sqrt(a.lambda_B);
    for (std::size_t j = 0; j < J; ++j) {
      ua[j] = normal(rng);
      ub[j] = normal(rng);
      dist += std::abs(ua[j] - ub[j]) * std::sqrt(paths.jumps.weight(j) * a.lambda_H);
    }
    a.u = ua;
    b.u = ub;
    if (dist <= 0.0) continue;
    out.max_ratio = std::max(out.max_ratio, std::abs(driver.g(a) - driver.g(b)) / dist);
  }
  out.within_bound = out.max_ratio <= driver.lipschitz * (1.0 + 1e-9) + 1e-12;
  return out;
}

BSDESolution solve_backward_regression(const DriverSpec& driver, std::span<const double> terminal,
                                       const PathEnsemble& paths, const Basis& basis,
                                       const BackwardOptions& options) {
  check_terminal(terminal, paths);
  if (driver.filtration != basis.filtration()) {
    throw std::invalid_argument("driver and basis are declared on different filtrations");
  }
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  const bool g_case = basis.filtration() == Filtration::G;

  Eigen::MatrixXd density;
  if (options.measure) density = density_paths(*options.measure, paths);

  BSDESolution sol;
  sol.y.resize(idx(n), idx(N + 1));
  sol.z = Eigen::MatrixXd::Zero(idx(n), idx(N));
  sol.u.assign(J, Eigen::MatrixXd::Zero(idx(n), idx(N)));
  sol.n_increments = Eigen::MatrixXd::Zero(idx(n), idx(N));
  sol.diagnostics.resize(N);
  for (std::size_t p = 0; p < n; ++p) sol.y(idx(p), idx(N)) = terminal[p];

  std::vector<double> ubuf(J);
  for (std::size_t step = N; step-- > 0;) {
    const Index i = idx(step);
    const Eigen::MatrixXd phi = basis.design(paths, step);
    const Index p = phi.cols();

    // Increments under the regression measure.
    Eigen::VectorXd dB = paths.dB.col(i);
    std::vector<Eigen::VectorXd> dH(J);
    for (std::size_t j = 0; j < J; ++j) dH[j] = paths.compensated[j].col(i);
    Eigen::VectorXd weights;
    if (options.measure) {
      weights = density.col(i + 1).cwiseQuotient(density.col(i));
      for (std::size_t q = 0; q < n; ++q) {
        const ScenarioShift& s = (*options.measure)[q];
        const Index r = idx(q);
        dB(r) -= s.theta_B[step] * paths.lambda_B(r, i) * dt;
        for (std::size_t j = 0; j < J; ++j) {
          dH[j](r) -= s.theta_H(step, j) * paths.jumps.weight(j) * paths.lambda_H(r, i) * dt;
        }
      }
    }

    std::vector<Eigen::VectorXd> regressors;
    const bool use_B = nonzero(paths.dB.col(i));
    if (use_B) regressors.push_back(dB);
    std::vector<int> jump_block(J, -1);
    for (std::size_t j = 0; j < J; ++j) {
      if (nonzero(paths.compensated[j].col(i))) {
        jump_block[j] = static_cast<int>(regressors.size());
        regressors.push_back(dH[j]);
      }
    }
    if (!g_case && options.clock_controls) {
      if (nonzero(paths.shock_B.col(i))) regressors.push_back(paths.shock_B.col(i));
      if (nonzero(paths.shock_H.col(i))) regressors.push_back(paths.shock_H.col(i));
    }

    RegressionOptions ro;
    ro.node = step;
    ro.prune_tolerance = 1e-12;
    const Eigen::VectorXd target = sol.y.col(i + 1);
    const Eigen::VectorXd* w = options.measure ? &weights : nullptr;
    // The mean is fitted on [phi, x_1, ...] with the raw increments as control
    // variates, then the loadings on the centred target. A joint fit on
    // [phi, phi x_1, ...] lets sparse jump columns absorb the mean.
    const Index K = idx(regressors.size());
    // Controls inside span(phi), such as a jump column at a node without
    // jumps, would share the mean with phi and are left out.
    std::vector<Index> controls;
    if (K > 0) {
      Eigen::MatrixXd R(idx(n), K);
      for (Index k = 0; k < K; ++k) R.col(k) = regressors[static_cast<std::size_t>(k)];
      const LeastSquaresFit proj = least_squares(phi, R, w, ro);
      for (Index k = 0; k < K; ++k) {
        if (proj.residual_rms(k) > 1e-7 * std::sqrt(R.col(k).squaredNorm() / double(n))) {
          controls.push_back(k);
        }
      }
    }
    Eigen::MatrixXd M(idx(n), p + idx(controls.size()));
    M.leftCols(p) = phi;
    for (std::size_t c = 0; c < controls.size(); ++c) {
      M.col(p + idx(c)) = regressors[static_cast<std::size_t>(controls[c])];
    }
    const LeastSquaresFit mean_fit = least_squares(M, target, w, ro);
    const Eigen::VectorXd mean = phi * mean_fit.coefficients.col(0).head(p);
    std::size_t columns = static_cast<std::size_t>(M.cols()) - mean_fit.dropped;
    double residual_rms = mean_fit.residual_rms(0);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p * K);
    if (K > 0) {
      const Eigen::MatrixXd X = joint_design(phi, regressors).rightCols(p * K);
      const LeastSquaresFit fit = least_squares(X, target - mean, w, ro);
      beta = fit.coefficients.col(0);
      columns += static_cast<std::size_t>(X.cols()) - fit.dropped;
      residual_rms = fit.residual_rms(0);
    }
    if (use_B) sol.z.col(i) = phi * beta.head(p);
    for (std::size_t j = 0; j < J; ++j) {
      if (jump_block[j] >= 0) {
        sol.u[j].col(i) = phi * beta.segment(p * jump_block[j], p);
      }
    }
    for (std::size_t q = 0; q < n; ++q) {
      const Index r = idx(q);
      if (!(paths.lambda_B(r, i) * dt > 0.0)) sol.z(r, i) = 0.0;
      if (!(paths.lambda_H(r, i) * dt > 0.0)) {
        for (std::size_t j = 0; j < J; ++j) sol.u[j](r, i) = 0.0;
      }
    }

    const double t = paths.grid.time(step);
    for (std::size_t q = 0; q < n; ++q) {
      const Index r = idx(q);
      for (std::size_t j = 0; j < J; ++j) ubuf[j] = sol.u[j](r, i);
      DriverInput in{q,       step,        t,   paths.lambda_B(r, i), paths.lambda_H(r, i),
                     mean(r), sol.z(r, i), ubuf};
      double y = mean(r) + driver.g(in) * dt;
      for (int k = 0; k < options.picard_iterations; ++k) {
        in.y = y;
        y = mean(r) + driver.g(in) * dt;
      }
      sol.y(r, i) = y;
      if (!g_case) {
        double rem = target(r) - mean(r) - sol.z(r, i) * dB(r);
        for (std::size_t j = 0; j < J; ++j) rem -= sol.u[j](r, i) * dH[j](r);
        sol.n_increments(r, i) = rem;
      }
    }

    NodeDiagnostics& d = sol.diagnostics[step];
    d.node = step;
    d.columns = columns;
    d.residual_rms = residual_rms;
    d.condition = mean_fit.condition;
    d.standard_error =
        mean_fit.residual_rms(0) * std::sqrt(static_cast<double>(p) / static_cast<double>(n));
  }

  double moment = 0.0;
  for (double x : terminal) moment += x * x;
  if (!std::isfinite(moment / static_cast<double>(n))) {
    sol.warnings.push_back("terminal second moment is not finite");
  }
  sol.terminal_residual =
      (sol.y.col(idx(N)) - Eigen::Map<const Eigen::VectorXd>(terminal.data(), idx(n)))
          .cwiseAbs()
          .maxCoeff();
  return sol;
}

LinearCoefficients LinearCoefficients::constant(const PathEnsemble& paths, double A, double C,
                                                double E0, const std::vector<double>& E,
                                                double bound_A, double bound_E) {
  const Index n = idx(paths.size());
  const Index N = idx(paths.steps());
  LinearCoefficients c;
  c.A = Eigen::MatrixXd::Constant(n, N, A);
  c.C = Eigen::MatrixXd::Constant(n, N, C);
  c.E0 = Eigen::MatrixXd::Constant(n, N, E0);
  for (std::size_t j = 0; j < paths.marks(); ++j) {
    c.E.push_back(Eigen::MatrixXd::Constant(n, N, j < E.size() ? E[j] : 0.0));
  }
  c.bound_A = bound_A;
  c.bound_E = bound_E;
  return c;
}

void validate(const LinearCoefficients& c, const PathEnsemble& paths) {
  const Index n = idx(paths.size());
  const Index N = idx(paths.steps());
  auto shape = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != n || m.cols() != N) {
      throw SpecError(std::string("linear coefficient ") + name + " does not match the ensemble");
    }
  };
  shape(c.A, "A");
  shape(c.C, "C");
  shape(c.E0, "E0");
  if (c.E.size() != paths.marks()) throw SpecError("linear coefficient E needs one field per mark");
  if (!(c.A.cwiseAbs().maxCoeff() <= c.bound_A)) throw SpecError("|A| exceeds its bound");
  if (!(c.E0.cwiseAbs().maxCoeff() < c.bound_E)) throw SpecError("|E(0)| exceeds its bound");
  for (std::size_t j = 0; j < c.E.size(); ++j) {
    shape(c.E[j], "E");
    if (!(c.E[j].minCoeff() >= 0.0)) throw SpecError("E(z) must be nonnegative");
    if (!(c.E[j].maxCoeff() < c.bound_E * std::abs(paths.jumps.mark(j)))) {
      throw SpecError("E(z) must stay below bound_E |z|");
    }
  }
}

DriverSpec linear_driver(const LinearCoefficients& c, const PathEnsemble& paths) {
  validate(c, paths);
  const JumpMeasure nu = paths.jumps;
  double lip = c.bound_A + c.bound_E;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    lip += c.bound_E * std::abs(nu.mark(j)) * std::sqrt(nu.weight(j));
  }
  auto held = std::make_shared<const LinearCoefficients>(c);
  return DriverSpec{[held, nu](const DriverInput& in) {
                      const LinearCoefficients& c = *held;
                      const Index r = idx(in.path), i = idx(in.node);
                      double g =
                          c.A(r, i) * in.y + c.C(r, i) + c.E0(r, i) * in.z * std::sqrt(in.lambda_B);
                      const double root = std::sqrt(in.lambda_H);
                      for (std::size_t j = 0; j < nu.size(); ++j) {
                        g += c.E[j](r, i) * in.u[j] * nu.weight(j) * root;
                      }
                      return g;
                    },
                    lip, Filtration::G};
}

namespace {

// y_i = E[(xi Adj_N + sum_{k>=i} Adj_k c_k dt) / Adj_i | basis_i].
LinearSolution conditional_adjoint(const Eigen::MatrixXd& adjoint, const Eigen::MatrixXd& running,
                                   std::span<const double> terminal, const PathEnsemble& paths,
                                   const Basis& basis) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  LinearSolution out;
  out.adjoint = adjoint;
  out.y.resize(idx(n), idx(N + 1));
  out.diagnostics.resize(N);
  Eigen::VectorXd acc(idx(n));
  for (std::size_t q = 0; q < n; ++q) {
    acc(idx(q)) = terminal[q] * adjoint(idx(q), idx(N));
    out.y(idx(q), idx(N)) = terminal[q];
  }
  for (std::size_t step = N; step-- > 0;) {
    const Index i = idx(step);
    acc += adjoint.col(i).cwiseProduct(running.col(i));
    const Eigen::VectorXd target = acc.cwiseQuotient(adjoint.col(i));
    const Eigen::MatrixXd phi = basis.design(paths, step);
    RegressionOptions ro;
    ro.node = step;
    const auto fit = least_squares(phi, target, nullptr, ro);
    out.y.col(i) = fit.fitted.col(0);
    auto& d = out.diagnostics[step];
    d.node = step;
    d.columns = static_cast<std::size_t>(phi.cols());
    d.residual_rms = fit.residual_rms(0);
    d.condition = fit.condition;
    d.standard_error =
        fit.residual_rms(0) * std::sqrt(static_cast<double>(phi.cols()) / static_cast<double>(n));
  }
  return out;
}

}  // namespace

LinearSolution solve_linear_gamma(const LinearCoefficients& c, std::span<const double> terminal,
                                  const PathEnsemble& paths, const Basis& basis) {
  check_terminal(terminal, paths);
  validate(c, paths);
  if (basis.filtration() != Filtration::G) {
    throw std::invalid_argument("the Gamma representation is stated on the G filtration");
  }
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const double dt = paths.dt();
  Eigen::MatrixXd gamma(idx(n), idx(N + 1));
  Eigen::MatrixXd running(idx(n), idx(N));
  for (std::size_t q = 0; q < n; ++q) {
    const Index r = idx(q);
    double lg = 0.0;
    gamma(r, 0) = 1.0;
    for (std::size_t step = 0; step < N; ++step) {
      const Index i = idx(step);
      const double lb = paths.lambda_B(r, i);
      const double lh = paths.lambda_H(r, i);
      double inc = c.A(r, i) * dt;
      if (lb != 0.0) {
        const double e0 = c.E0(r, i);
        inc += -0.5 * e0 * e0 * dt + e0 / std::sqrt(lb) * paths.dB(r, i);
      }
      if (lh != 0.0) {
        for (std::size_t j = 0; j < paths.marks(); ++j) {
          const double e = c.E[j](r, i) / std::sqrt(lh);
          if (!(e > -1.0)) {
            throw SpecError("E(z) / sqrt(lambda_H) <= -1 at node " + std::to_string(step));
          }
          const double l = std::log1p(e);
          inc += (l - e) * paths.jumps.weight(j) * lh * dt + l * paths.compensated[j](r, i);
        }
      }
      lg += inc;
      gamma(r, i + 1) = std::exp(lg);
      running(r, i) = c.C(r, i) * dt;
    }
  }
  return conditional_adjoint(gamma, running, terminal, paths, basis);
}

AdjointCoefficients AdjointCoefficients::constant(const PathEnsemble& paths,
                                                  const std::vector<double>& a,
                                                  const std::vector<double>& b,
                                                  const std::vector<double>& c) {
  const std::size_t K = paths.marks() + 1;
  if (a.size() != K || b.size() != K || c.size() != K) {
    throw SpecError("adjoint coefficients need one value for the Brownian atom and each mark");
  }
  const Index n = idx(paths.size());
  const Index N = idx(paths.steps());
  AdjointCoefficients out;
  for (std::size_t k = 0; k < K; ++k) {
    out.a.push_back(Eigen::MatrixXd::Constant(n, N, a[k]));
    out.b.push_back(Eigen::MatrixXd::Constant(n, N, b[k]));
    out.c.push_back(Eigen::MatrixXd::Constant(n, N, c[k]));
  }
  return out;
}

namespace {

void check_adjoint(const AdjointCoefficients& c, const PathEnsemble& paths) {
  const std::size_t K = paths.marks() + 1;
  if (c.a.size() != K || c.b.size() != K || c.c.size() != K) {
    throw SpecError("adjoint coefficients need one field for the Brownian atom and each mark");
  }
}

}  // namespace

DriverSpec adjoint_driver(const AdjointCoefficients& c, const PathEnsemble& paths) {
  check_adjoint(c, paths);
  const JumpMeasure nu = paths.jumps;
  double lip = 0.0;
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    lip += c.a[k].cwiseAbs().maxCoeff() + c.b[k].cwiseAbs().maxCoeff();
  }
  lip *= std::max({1.0, paths.lambda_B.maxCoeff(), paths.lambda_H.maxCoeff() * nu.total_mass()});
  auto held = std::make_shared<const AdjointCoefficients>(c);
  return DriverSpec{
      [held, nu](const DriverInput& in) {
        const AdjointCoefficients& c = *held;
        const Index r = idx(in.path), i = idx(in.node);
        double g = (c.a[0](r, i) * in.y + c.b[0](r, i) * in.z + c.c[0](r, i)) * in.lambda_B;
        for (std::size_t j = 0; j < nu.size(); ++j) {
          g += (c.a[j + 1](r, i) * in.y + c.b[j + 1](r, i) * in.u[j] + c.c[j + 1](r, i)) *
               nu.weight(j) * in.lambda_H;
        }
        return g;
      },
      lip, Filtration::F};
}

LinearSolution solve_linear_psi(const AdjointCoefficients& c, std::span<const double> terminal,
                                const PathEnsemble& paths, const Basis& basis) {
  check_terminal(terminal, paths);
  check_adjoint(c, paths);
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  Eigen::MatrixXd psi(idx(n), idx(N + 1));
  Eigen::MatrixXd running(idx(n), idx(N));
  for (std::size_t q = 0; q < n; ++q) {
    const Index r = idx(q);
    double lp = 0.0;
    psi(r, 0) = 1.0;
    for (std::size_t step = 0; step < N; ++step) {
      const Index i = idx(step);
      const double lb = paths.lambda_B(r, i);
      const double lh = paths.lambda_H(r, i);
      const double b0 = c.b[0](r, i);
      double inc = c.a[0](r, i) * lb * dt + b0 * paths.dB(r, i) - 0.5 * b0 * b0 * lb * dt;
      double source = c.c[0](r, i) * lb;
      for (std::size_t j = 0; j < J; ++j) {
        const double w = paths.jumps.weight(j) * lh;
        const double bj = c.b[j + 1](r, i);
        if (w > 0.0 && !(bj > -1.0)) {
          throw SpecError("nonpositive Doleans factor: b <= -1 at node " + std::to_string(step));
        }
        inc += c.a[j + 1](r, i) * w * dt - bj * w * dt;
        const double k = paths.counts[j](r, i);
        if (k > 0.0) inc += k * std::log1p(bj);
        source += c.c[j + 1](r, i) * w;
      }
      lp += inc;
      psi(r, i + 1) = std::exp(lp);
      running(r, i) = source * dt;
    }
  }
  return conditional_adjoint(psi, running, terminal, paths, basis);
}

ComparisonReport comparison_harness(const ComparisonParams& first, const ComparisonParams& second,
                                    const PathEnsemble& paths, const Basis& basis,
                                    double multiplier, double absolute_tolerance) {
  ComparisonReport report;
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  check_terminal(first.terminal, paths);
  check_terminal(second.terminal, paths);
  for (std::size_t q = 0; q < n; ++q) {
    if (first.terminal[q] > second.terminal[q]) {
      report.hypotheses_satisfied = false;
      report.message =
          "hypotheses not satisfied: terminal values are not ordered on path " + std::to_string(q);
      return report;
    }
  }
  report.first = solve_backward_regression(first.driver, first.terminal, paths, basis);
  std::vector<double> ubuf(J);
  for (std::size_t step = 0; step < N; ++step) {
    const Index i = idx(step);
    for (std::size_t q = 0; q < n; ++q) {
      const Index r = idx(q);
      for (std::size_t j = 0; j < J; ++j) ubuf[j] = report.first.u[j](r, i);
      const DriverInput in{q,
                           step,
                           paths.grid.time(step),
                           paths.lambda_B(r, i),
                           paths.lambda_H(r, i),
                           report.first.y(r, i),
                           report.first.z(r, i),
                           ubuf};
      const double g1 = first.driver.g(in);
      const double g2 = second.driver.g(in);
      if (g1 > g2 + 1e-12 * (1.0 + std::abs(g1))) {
        report.hypotheses_satisfied = false;
        report.message = "hypotheses not satisfied: drivers are not ordered at node " +
                         std::to_string(step) + " on path " + std::to_string(q);
        return report;
      }
    }
  }
  report.second = solve_backward_regression(second.driver, second.terminal, paths, basis);
  report.node_tolerance.assign(N + 1, absolute_tolerance);
  for (std::size_t step = 0; step <= N; ++step) {
    if (step < N) {
      const double s1 = report.first.diagnostics[step].standard_error;
      const double s2 = report.second.diagnostics[step].standard_error;
      report.node_tolerance[step] += multiplier * std::sqrt(s1 * s1 + s2 * s2);
    }
    const Index i = idx(step);
    for (std::size_t q = 0; q < n; ++q) {
      const double excess =
          report.first.y(idx(q), i) - report.second.y(idx(q), i) - report.node_tolerance[step];
      ++report.checked;
      if (excess > 0.0) ++report.violations;
      report.max_excess = report.checked == 1 ? excess : std::max(report.max_excess, excess);
    }
  }
  report.violation_fraction =
      static_cast<double>(report.violations) / static_cast<double>(report.checked);
  return report;
}

InformationOrdering information_ordering(const Eigen::MatrixXd& values, const PathEnsemble& paths,
                                         const std::vector<FeatureGroup>& groups) {
  const std::size_t N = paths.steps();
  if (values.rows() != idx(paths.size()) || values.cols() != idx(N + 1)) {
    throw std::invalid_argument("value field does not match the ensemble");
  }
  const Basis f = Basis::polynomial(Filtration::F, groups);
  const Basis g = Basis::polynomial(Filtration::G, groups);
  InformationOrdering out;
  for (std::size_t step = 0; step < N; ++step) {
    const Eigen::VectorXd target = values.col(idx(step + 1));
    RegressionOptions ro;
    ro.node = step;
    const auto ff = least_squares(f.design(paths, step), target, nullptr, ro);
    const auto fg = least_squares(g.design(paths, step), target, nullptr, ro);
    const double n = static_cast<double>(paths.size());
    const double sf = ff.residual_rms(0) * ff.residual_rms(0) * n;
    const double sg = fg.residual_rms(0) * fg.residual_rms(0) * n;
    out.residual_F.push_back(sf);
    out.residual_G.push_back(sg);
    if (sg > sf * (1.0 + 1e-9) + 1e-12) out.ordered = false;
  }
  return out;
}

}  // namespace tchedge
