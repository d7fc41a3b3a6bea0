#include "tchedge/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tchedge {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_output(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_output(file);
  std::string line;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) line += ',';
    line += header[k];
  }
  out << line << '\n';
  for (const auto& row : rows) {
    line.clear();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) line += ',';
      line += format_double(row[k]);
    }
    out << line << '\n';
  }
  finish(out, file);
}

void write_json(const std::filesystem::path& file, const nlohmann::json& value) {
  auto out = open_output(file);
  out << value.dump(2) << '\n';
  finish(out, file);
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto out = open_output(file);
  out << text;
  finish(out, file);
}

}  // namespace tchedge
