#pragma once

// Flat key=value run configuration. One pair per line, '#' starts a comment.

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photon_src/closedform.hpp"
#include "photon_src/lindblad.hpp"
#include "photon_src/photonics.hpp"
#include "photon_src/qmodel.hpp"

namespace photon_src::cli {

/// Anything wrong with the configuration or the command line (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;  // ascending
  // set when the values came from min/max/points, so --points can respace them
  std::optional<double> lo, hi;
  bool log = false;
};

/// n points from lo to hi inclusive, linear or logarithmic.
std::vector<double> spaced_values(double lo, double hi, std::size_t n, bool log);

struct RunConfig {
  LevelScheme scheme = LevelScheme::FourLevel;
  // kappa_ex is ignored while kappa_ex_optimal is set
  SystemParams params = [] {
    SystemParams p;
    p.kappa_in = 0.01;
    p.gamma_u = 0.1;
    p.gamma_o = 0.01;
    p.omega2 = 3.2;
    return p;
  }();
  bool kappa_ex_optimal = true;

  PulseShape::Kind pulse_kind = PulseShape::Kind::Linear;
  double omega0 = 0.01;
  std::optional<double> t_end;   // linear default 1000; tabulated default: last sample
  std::vector<double> pulse_times;
  std::vector<Complex> pulse_values;

  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_max = 0.5;
  double epsilon = 1e-6;

  std::size_t record_cells = 400;
  double record_tail = 1e-12;
  double emission_fraction = closedform::kEmissionFraction;

  std::optional<SweepSpec> sweep;

  double fig2_omega2_min = 0.5;
  double fig2_omega2_max = 10.0;
  std::size_t fig2_points = 24;
  std::vector<double> fig2_omega0 = {0.01, 0.04, 0.07};
  double fig2_three_level_omega0 = 0.07;

  double figc_g_min = 0.1;
  double figc_g_max = 10.0;
  double figc_omega2_min = 0.1;
  double figc_omega2_max = 1000.0;
  std::size_t figc_points = 50;
  closedform::RatioSlice figc_slice;

  /// Parameters with kappa_ex resolved.
  SystemParams system() const;
  PulseShape pulse() const;
  IntegratorConfig integrator() const;
  photonics::RecordOptions record_options(unsigned threads = 1) const;

  /// Sets a swept quantity: any SystemParams field, omega0 or t_end.
  /// Throws ConfigError for an unknown name.
  void set_parameter(const std::string& name, double value);
  double get_parameter(const std::string& name) const;
};

/// Relative pulse_file paths resolve against base_dir.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Reads "t, re[, im]" rows; '#' comments and a non-numeric header are skipped.
void load_pulse_table(const std::filesystem::path& path, std::vector<double>& times, std::vector<Complex>& values);

}  // namespace photon_src::cli
