#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace photon_src::cli {

/// Fixed scientific notation, 9 significant digits; -0 prints as 0.
std::string format_number(double x);

class CsvWriter {
 public:
  /// Throws ConfigError if the file cannot be created.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::filesystem::path path_;
};

}  // namespace photon_src::cli
