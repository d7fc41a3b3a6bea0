#include <doctest.h>

#include <string>

#include "tchedge/config.hpp"
#include "tchedge/error.hpp"

using namespace tchedge;

namespace {

const char* kText = R"(grid:
  horizon: 2.0
  steps: 16
intensity:
  brownian: {type: cir, speed: 2.0, level: 1.0, vol: 0.5, initial: 1.0}
  jump:
    type: piecewise
    breakpoints: [[0.0, 1.0], [1.0, 2.0]]
jumps:
  marks: [1.0, 2.0]
  weights: [0.5, 0.25]
market:
  rate: 0.02
  drift: 0.06
  volatility: 0.2
  jump_impact: [-0.05, -0.1]
claim:
  type: digital
  strike: 105
monte_carlo:
  paths: 1000
  seed: 9
filtration: G
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parse fields") {
    const auto c = parse_config(kText);
    CHECK(c.horizon == 2.0);
    CHECK(c.steps == 16);
    CHECK(std::holds_alternative<CirIntensity>(c.intensity.brownian));
    CHECK(std::get<PiecewiseIntensity>(c.intensity.jump).breakpoints.size() == 2);
    CHECK(c.marks.size() == 2);
    CHECK(c.claim.type == "digital");
    CHECK(c.paths == 1000);
    CHECK(c.seed == 9);
    CHECK(c.filtration == Filtration::G);
  }

  TEST_CASE("serialization round trip is idempotent") {
    const auto c = parse_config(kText);
    const auto text = serialize_config(c);
    const auto again = parse_config(text);
    CHECK(serialize_config(again) == text);
    CHECK(config_hash(again) == config_hash(c));
  }

  TEST_CASE("hash changes with the seed") {
    auto c = parse_config(kText);
    const auto h = config_hash(c);
    c.seed += 1;
    CHECK(config_hash(c) != h);
  }

  TEST_CASE("diagnostics name the field and line") {
    const auto unknown = error_of("grid:\n  horizon: 1\n  stepz: 3\n");
    CHECK(unknown.find("grid.stepz") != std::string::npos);
    CHECK(unknown.find("line 3") != std::string::npos);
    const auto bad = error_of("grid:\n  steps: many\n");
    CHECK(bad.find("grid.steps") != std::string::npos);
    CHECK(error_of("claim: {type: swap}").find("claim.type") != std::string::npos);
    CHECK(error_of("jumps: {marks: [1, 2], weights: [1]}").find("jumps.weights") !=
          std::string::npos);
    CHECK(error_of("market: {initial_price: 0.5}").find("initial_price") != std::string::npos);
    CHECK(error_of("grid: [").find("syntax") != std::string::npos);
    CHECK(error_of("filtration: H").find("filtration") != std::string::npos);
  }

  TEST_CASE("empty config uses defaults") {
    const auto c = parse_config("");
    CHECK(c.steps == 32);
    CHECK(c.paths == 50000);
  }
}
