#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "tchedge/basis.hpp"
#include "tchedge/bsde.hpp"
#include "tchedge/error.hpp"

using namespace tchedge;

namespace {

std::vector<double> terminal_of(const PathEnsemble& paths, double scale) {
  std::vector<double> xi(paths.size());
  const auto N = static_cast<Eigen::Index>(paths.steps());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    xi[p] = scale * paths.s1(static_cast<Eigen::Index>(p), N) / paths.s1(0, 0);
  }
  return xi;
}

}  // namespace

TEST_SUITE("bsde") {
  TEST_CASE("zero driver with constant terminal") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 8, 0.0, 0.05, 0.2, {-0.1, -0.2}), 500, 2);
    const std::vector<double> xi(500, 3.0);
    const auto sol = solve_backward_regression(DriverSpec::zero(Filtration::F), xi, paths,
                                               Basis::polynomial(Filtration::F));
    CHECK((sol.y.array() - 3.0).abs().maxCoeff() < 1e-10);
    CHECK(sol.z.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sol.terminal_residual == 0.0);
  }

  TEST_CASE("deterministic linear equation against its closed form") {
    // y' = -(A y + C), y_T = K: y_0 = K e^{AT} + C (e^{AT} - 1) / A.
    const double A = -0.05, C = 0.1, K = 2.0;
    const auto paths = simulate_ensemble(
        test::constant_model(1.0, 64, 1.0, 1.0, {1.0}, {1.0}, 0, 0, 0.2, {0.0}), 200, 1);
    const std::vector<double> xi(200, K);
    const auto coeffs = LinearCoefficients::constant(paths, A, C, 0.0, {0.0}, 1.0, 1.0);
    const double exact = K * std::exp(A) + C * (std::exp(A) - 1.0) / A;
    const auto gamma = solve_linear_gamma(coeffs, xi, paths, Basis::polynomial(Filtration::G));
    const auto reg = solve_backward_regression(linear_driver(coeffs, paths), xi, paths,
                                               Basis::polynomial(Filtration::G));
    CHECK(gamma.y(0, 0) == doctest::Approx(exact).epsilon(2e-3));
    CHECK(reg.y(0, 0) == doctest::Approx(exact).epsilon(2e-3));
  }

  TEST_CASE("linear coefficient bounds") {
    const auto paths = simulate_ensemble(
        test::constant_model(1.0, 4, 1.0, 1.0, {-1.0}, {1.0}, 0, 0, 0.2, {0.0}), 10, 1);
    CHECK_THROWS_AS(
        validate(LinearCoefficients::constant(paths, -2.0, 0, 0, {0.0}, 1.0, 1.0), paths),
        SpecError);
    CHECK_THROWS_AS(
        validate(LinearCoefficients::constant(paths, 0, 0, 1.0, {0.0}, 1.0, 1.0), paths),
        SpecError);
    CHECK_THROWS_AS(validate(LinearCoefficients::constant(paths, 0, 0, 0, {-0.1}, 1.0, 1.0), paths),
                    SpecError);
    CHECK_NOTHROW(validate(LinearCoefficients::constant(paths, 0, 0, 0.5, {0.5}, 1.0, 1.0), paths));
  }

  TEST_CASE("gamma and regression solvers agree on a stochastic linear equation") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 8, 0.0, 0.05, 0.2, {-0.1, -0.2}), 20000, 4);
    const auto coeffs = LinearCoefficients::constant(paths, -0.05, 0.1, 0.2, {0.1, 0.1}, 1.0, 1.0);
    const auto xi = terminal_of(paths, 1.0);
    const auto basis = Basis::polynomial(Filtration::G);
    const auto gamma = solve_linear_gamma(coeffs, xi, paths, basis);
    const auto reg = solve_backward_regression(linear_driver(coeffs, paths), xi, paths, basis);
    const double y0 = gamma.y.col(0).mean();
    CHECK(std::abs(y0 - reg.y.col(0).mean()) / std::abs(y0) <= 5e-2);
  }

  TEST_CASE("lipschitz probe respects the declared constant") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 8, 0.0, 0.05, 0.2, {-0.1, -0.2}), 100, 4);
    const auto coeffs = LinearCoefficients::constant(paths, -0.05, 0.1, 0.2, {0.1, 0.1}, 1.0, 1.0);
    CHECK(probe_lipschitz(linear_driver(coeffs, paths), paths, 500, 3).within_bound);
  }

  TEST_CASE("comparison of ordered pairs") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 8, 0.0, 0.05, 0.2, {-0.1, -0.2}), 5000, 6);
    const auto xi = terminal_of(paths, 1.0);
    std::vector<double> xi_up = xi;
    for (double& x : xi_up) x += 1.0;
    const auto basis = Basis::polynomial(Filtration::F);
    const ComparisonParams low{DriverSpec::zero(Filtration::F), xi};
    const ComparisonParams high{DriverSpec::zero(Filtration::F), xi_up};
    const auto r = comparison_harness(low, high, paths, basis);
    CHECK(r.hypotheses_satisfied);
    CHECK(r.violations == 0);
    const auto reversed = comparison_harness(high, low, paths, basis);
    CHECK_FALSE(reversed.hypotheses_satisfied);
  }

  TEST_CASE("G basis never fits worse than the F basis") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 8, 0.0, 0.05, 0.2, {-0.1, -0.2}), 3000, 6);
    const auto xi = terminal_of(paths, 1.0);
    const auto sol = solve_backward_regression(DriverSpec::zero(Filtration::F), xi, paths,
                                               Basis::polynomial(Filtration::F));
    const auto order =
        information_ordering(sol.y, paths, {FeatureGroup::stock, FeatureGroup::intensity});
    CHECK(order.ordered);
  }

  TEST_CASE("filtration mismatch is rejected") {
    const auto paths =
        simulate_ensemble(test::cir_model(1.0, 4, 0.0, 0.05, 0.2, {-0.1, -0.2}), 50, 6);
    const std::vector<double> xi(50, 1.0);
    CHECK_THROWS_AS(solve_backward_regression(DriverSpec::zero(Filtration::G), xi, paths,
                                              Basis::polynomial(Filtration::F)),
                    std::invalid_argument);
  }
}
