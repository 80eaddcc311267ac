#pragma once

// Basis, parameters, operators and drive pulses for the three-level (Lambda)
// and four-level atom-cavity manifolds. All quantities are in units of the
// atom-cavity coupling g.

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "photon_src/errors.hpp"

namespace photon_src {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

enum class LevelScheme { ThreeLevel, FourLevel };

/// Joint atom-cavity states. Not every level exists in every scheme.
enum class Level { U0, E2_0, E0, G1, G0, O0 };

/// Fixed basis order:
///   ThreeLevel: |u,0>, |e,0>, |g,1>, |g,0>, |o,0>
///   FourLevel:  |u,0>, |e2,0>, |e,0>, |g,1>, |g,0>, |o,0>
int dimension(LevelScheme scheme);
bool has_level(LevelScheme scheme, Level level);
/// Throws ArgumentError when the level is absent from the scheme.
int basis_index(LevelScheme scheme, Level level);
std::vector<Level> basis_levels(LevelScheme scheme);
std::string_view level_name(Level level);
std::string_view scheme_name(LevelScheme scheme);

/// Levels of the generation manifold {|u,0>, |e2,0>, |e,0>, |g,1>} present in the scheme.
std::vector<Level> manifold_levels(LevelScheme scheme);

struct SystemParams {
  double g = 1.0;
  double kappa_ex = 0.0;
  double kappa_in = 0.0;
  double gamma_u = 0.0;   // |e2> -> |u> (four-level), |e> -> |u> (three-level)
  double gamma_o = 0.0;   // |e> -> |o>
  double gamma_o2 = 0.0;  // |e2> -> |o>, four-level only
  double gamma_e = 0.0;   // |e2> -> |e>, four-level only
  double delta_e = 0.0;
  double delta_e2 = 0.0;  // four-level only
  double omega2 = 0.0;    // four-level only

  double kappa() const { return kappa_ex + kappa_in; }
  double gamma() const { return gamma_u + gamma_o; }
  /// Total decay out of |e2>: gamma_u + gamma_o2 + gamma_e.
  double gamma_total_e2() const { return gamma_u + gamma_o2 + gamma_e; }

  /// Throws ParameterError on negative rates, g <= 0, non-finite values or
  /// four-level-only fields set for the three-level scheme.
  void validate(LevelScheme scheme) const;
};

/// kappa_in * sqrt(1 + g^2 / (kappa_in * gamma)): the external coupling that
/// maximizes the single-excitation probability of the three-level source.
double optimal_kappa_ex(double g, double kappa_in, double gamma);

/// Drive envelope Omega(t), either Omega0 * t or linearly interpolated samples.
class PulseShape {
 public:
  enum class Kind { Linear, Tabulated };

  static PulseShape linear(double omega0, double t_end);
  /// Samples must be strictly ascending in time; t_end defaults to the last sample.
  static PulseShape tabulated(std::vector<double> times, std::vector<Complex> values,
                              double t_end = -1.0);

  Kind kind() const { return kind_; }
  double t_end() const { return t_end_; }
  double omega0() const { return omega0_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Complex>& values() const { return values_; }

  /// Omega(t). Times outside [0, t_end] (or outside the table) clamp to the edge value.
  Complex amplitude(double t) const;
  /// Cumulative H(t) = int_0^t |Omega|^2, continued linearly past t_end.
  double cumulative(double t) const;
  /// Smallest t with cumulative(t) >= u (bisection for tabulated pulses).
  double time_at_cumulative(double u) const;
  /// max |Omega(t)| over [0, t_end].
  double peak_amplitude() const;

 private:
  PulseShape() = default;

  Kind kind_ = Kind::Linear;
  double omega0_ = 0.0;
  double t_end_ = 0.0;
  std::vector<double> times_;
  std::vector<Complex> values_;
  std::vector<double> cumulative_;  // H at each table node
};

struct PulseSample {
  Complex value;
  bool clamped = false;  // t was outside [0, t_end]
};

PulseSample eval_pulse(const PulseShape& pulse, double t);

/// h(t1, t2) = int_{t1}^{t2} |Omega(t)|^2 dt. Throws ArgumentError if t1 > t2.
double h_integral(const PulseShape& pulse, double t1, double t2);

Operator build_hamiltonian(const SystemParams& params, LevelScheme scheme, Complex omega_t);

/// Labels of the decay channels; used for jump-resolved bookkeeping.
enum class Channel { Ex, In, U, O, O2, E };
std::string_view channel_name(Channel channel);

struct LindbladTerm {
  Channel channel;
  double rate;  // L = sqrt(2 rate) |target><source|
  int source;
  int target;
  Operator op;
};

/// Jump operators with nonzero rate, in the order ex, in, u, o, o2, e.
std::vector<LindbladTerm> build_lindblads(const SystemParams& params, LevelScheme scheme);

/// Max |H - H^dagger|, trace, and smallest eigenvalue of the Hermitian part.
struct DensityDiagnostics {
  double hermiticity_error;
  Complex trace;
  double min_eigenvalue;
};
DensityDiagnostics diagnose(const Operator& rho);

}  // namespace photon_src
