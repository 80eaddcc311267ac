#include "photon_src/cli/csv.hpp"

#include <fmt/format.h>

#include "photon_src/cli/config.hpp"

namespace photon_src::cli {

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;
  return fmt::format("{:.8e}", x);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()), path_(path) {
  if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("csv row width does not match the header");
  for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_number(values[k]);
  out_ << '\n';
  if (!out_) throw ConfigError("write to '" + path_.string() + "' failed");
}

}  // namespace photon_src::cli
