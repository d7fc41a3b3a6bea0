#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "tchedge/config.hpp"
#include "tchedge/error.hpp"

namespace tchedge {

// Stage-labelled failure raised by the experiment runner.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunOutput {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

RunOutput run_simulate(const ExperimentConfig& config);
RunOutput run_hedge(const ExperimentConfig& config);
RunOutput run_risk(const ExperimentConfig& config);

struct PropertyResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double estimate = 0.0;
  double target = 0.0;
  double standard_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;
  bool passed() const;
  std::size_t pass_count() const;
};

ValidationReport validate_properties(const ExperimentConfig& config);

// Runs the suites for `sweep` consecutive seeds starting at config.seed and
// writes validation.json; `passed` is false if any property failed.
RunOutput run_validate(const ExperimentConfig& config, std::size_t sweep = 1);

nlohmann::json to_json(const PropertyResult& result);

}  // namespace tchedge
