#include <doctest.h>

#include <cmath>
#include <vector>

#include "tchedge/error.hpp"
#include "tchedge/grid.hpp"
#include "tchedge/intensity.hpp"
#include "tchedge/noise.hpp"
#include "tchedge/random.hpp"

using namespace tchedge;

TEST_SUITE("intensity") {
  TEST_CASE("grid nodes and lookup") {
    const TimeGrid g(1.0, 32);
    CHECK(g.nodes() == 33);
    CHECK(g.time(32) == 1.0);
    CHECK(g.node_at(0.5) == 16);
    CHECK_THROWS_AS(g.node_at(0.51), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), SpecError);
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), SpecError);
  }

  TEST_CASE("constant rate integrates to level times t") {
    const TimeGrid g(2.0, 8);
    auto rng = path_stream(1, 0, Stream::intensity);
    const auto path = simulate_rate(ConstantIntensity{0.7}, g, rng);
    const auto cum = cumulate(path.rate, g.dt());
    for (std::size_t i = 0; i <= 8; ++i) CHECK(cum[i] == doctest::Approx(0.7 * g.time(i)));
  }

  TEST_CASE("piecewise rate is right-continuous") {
    const TimeGrid g(1.0, 4);
    auto rng = path_stream(1, 0, Stream::intensity);
    const PiecewiseIntensity spec{{{0.0, 1.0}, {0.5, 3.0}}};
    const auto path = simulate_rate(spec, g, rng);
    CHECK(path.rate[0] == 1.0);
    CHECK(path.rate[1] == 1.0);
    CHECK(path.rate[2] == 3.0);
    CHECK(path.rate[4] == 3.0);
    const auto cum = cumulate(path.rate, g.dt());
    CHECK(cum[4] == doctest::Approx(0.25 * (1 + 1 + 3 + 3)));
  }

  TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(validate(ConstantIntensity{-1.0}), SpecError);
    CHECK_THROWS_AS(validate(PiecewiseIntensity{{{0.1, 1.0}}}), SpecError);
    CHECK_THROWS_AS(validate(PiecewiseIntensity{{{0.0, 1.0}, {0.0, 2.0}}}), SpecError);
    CHECK_THROWS_AS(validate(CirIntensity{-1.0, 1.0, 0.3, 1.0}), SpecError);
    CHECK(is_deterministic(ConstantIntensity{1.0}));
    CHECK_FALSE(is_deterministic(CirIntensity{1.0, 1.0, 0.3, 1.0}));
  }

  TEST_CASE("cir paths stay nonnegative and cumulative clocks increase") {
    const TimeGrid g(1.0, 64);
    const CirIntensity spec{0.5, 0.2, 1.5, 0.05};
    for (std::uint64_t p = 0; p < 200; ++p) {
      auto rng = path_stream(9, p, Stream::intensity);
      const auto path = simulate_intensity({spec, spec}, g, rng);
      for (std::size_t i = 0; i <= 64; ++i) {
        REQUIRE(path.lambda_B[i] >= 0.0);
        REQUIRE(path.lambda_H[i] >= 0.0);
      }
      for (std::size_t i = 0; i < 64; ++i) REQUIRE(path.cum_B[i + 1] >= path.cum_B[i]);
    }
  }

  TEST_CASE("cir sample mean follows the mean-reversion ode") {
    // E[x_t] = level + (x0 - level) exp(-speed t); small vol keeps truncation inactive.
    const TimeGrid g(1.0, 200);
    const CirIntensity spec{2.0, 1.0, 0.2, 0.5};
    double mean = 0.0;
    const int n = 4000;
    for (int p = 0; p < n; ++p) {
      auto rng = path_stream(3, p, Stream::intensity);
      mean += simulate_rate(spec, g, rng).rate.back();
    }
    mean /= n;
    const double expected = 1.0 + (0.5 - 1.0) * std::exp(-2.0);
    CHECK(mean == doctest::Approx(expected).epsilon(0.01));
  }

  TEST_CASE("clock measure of cells and marks") {
    const TimeGrid g(1.0, 4);
    auto rng = path_stream(1, 0, Stream::intensity);
    const auto path = simulate_intensity({ConstantIntensity{2.0}, ConstantIntensity{3.0}}, g, rng);
    const JumpMeasure nu({-0.5, 1.0}, {0.4, 0.6});
    const std::vector<std::size_t> cells{0, 1, 1};
    const std::vector<double> brownian{0.0};
    CHECK(lambda_measure(path, cells, brownian, nu, g.dt()) == doctest::Approx(2 * 2.0 * 0.25));
    const std::vector<double> both{0.0, 1.0};
    CHECK(lambda_measure(path, cells, both, nu, g.dt()) ==
          doctest::Approx(2 * (2.0 + 0.6 * 3.0) * 0.25));
    const std::vector<double> unknown{0.3};
    CHECK_THROWS_AS(lambda_measure(path, cells, unknown, nu, g.dt()), SpecError);
  }

  TEST_CASE("path streams are reproducible and distinct") {
    auto a = path_stream(5, 7, Stream::noise);
    auto b = path_stream(5, 7, Stream::noise);
    auto c = path_stream(5, 8, Stream::noise);
    auto d = path_stream(5, 7, Stream::intensity);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
}
