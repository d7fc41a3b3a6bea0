#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tchedge/basis.hpp"
#include "tchedge/ensemble.hpp"
#include "tchedge/girsanov.hpp"
#include "tchedge/hedge.hpp"

namespace tchedge {

struct ClaimConfig {
  std::string type = "call";  // call | put | digital | intensity_exponential | zero
  double strike = 100.0;
  double payout = 1.0;
  double rate = 1.0;
  double notional = 1.0;

  ClaimSpec build() const;
};

struct ScenarioConfig {
  std::string rule = "minimal_norm";  // minimal_norm | user_supplied
  double bound = 1e6;
  double theta_B = 0.0;         // user_supplied only
  std::vector<double> theta_H;  // user_supplied only
};

struct RiskConfig {
  std::vector<double> scalings{0.5, 1.0, 1.5};
  std::vector<double> jump_tilts{0.0, 0.1};
};

struct BasisConfig {
  std::vector<std::string> features{"stock", "intensity"};
};

struct MarketConfig {
  double rate = 0.0;
  double drift = 0.0;
  double volatility = 0.0;
  std::vector<double> jump_impact{0.0};
  double rate_bound = 1.0;
  double initial_price = 100.0;
};

struct ExperimentConfig {
  double horizon = 1.0;
  std::size_t steps = 32;
  IntensityModel intensity;
  std::vector<double> marks{1.0};
  std::vector<double> weights{1.0};
  MarketConfig market;
  ClaimConfig claim;
  ScenarioConfig scenario;
  RiskConfig risk;
  BasisConfig basis;
  std::size_t paths = 50000;
  std::uint64_t seed = 42;
  std::size_t dumped_paths = 1000;
  std::string output = "out";
  Filtration filtration = Filtration::F;

  ModelSpec model() const;
  Basis make_basis() const;
};

// Throws ConfigError with the offending field and line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a of the canonical serialization.
std::string config_hash(const ExperimentConfig& config);

}  // namespace tchedge
