#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "photon_src/cli/config.hpp"

namespace photon_src::cli {

struct CommandOptions {
  std::filesystem::path out;
  bool numeric = false;
  std::optional<std::size_t> points;
  unsigned threads = 1;
};

/// PHOTON_SRC_THREADS if set (must be a positive integer), else the hardware count.
unsigned thread_limit();

/// Record and master-equation counterparts of the closed-form columns.
struct NumericColumns {
  double p_si_record, p_re_record, p_total_record, r_re_record, d_s_record, f_s_record, t_em_record;
  double record_residual;
  double p_si_lindblad, p_re_lindblad, p_total_lindblad;
  double drive_diagnostic;
};

struct SweepRow {
  double value;  // swept value; unused by simulate
  closedform::PerformanceSummary closed;
  std::optional<NumericColumns> numeric;
};

SweepRow compute_row(const RunConfig& config, bool numeric, unsigned threads = 1);

std::vector<std::string> row_header(bool numeric);
std::vector<double> row_values(const SweepRow& row, bool numeric);

/// Time at which the cumulative ex-channel emission reaches `fraction` of its
/// final value, by linear interpolation between snapshots; NaN if it never does.
double lindblad_emission_time(const SimResult& result, double fraction);

void cmd_simulate(const RunConfig& config, const CommandOptions& options);
void cmd_sweep(const RunConfig& config, const CommandOptions& options);
void cmd_fig2(const RunConfig& config, const CommandOptions& options);
void cmd_figc(const RunConfig& config, const CommandOptions& options);

/// Loads the config and dispatches. Returns the process exit code:
/// 0 success, 2 configuration or usage error, 3 numerical failure.
int run(const std::string& command, const std::filesystem::path& config_path, CommandOptions options);

}  // namespace photon_src::cli
