#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace tchedge {

// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double value);

// Writes rows of doubles with a header line.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& file, const nlohmann::json& value);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace tchedge
