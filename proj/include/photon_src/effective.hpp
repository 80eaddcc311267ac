#pragma once

// Effective operator reduction: the excited manifold is eliminated through the
// inverse of the non-Hermitian Hamiltonian, leaving drive-dependent effective
// decay rates and detuning for |u,0>. Every effective rate is a fixed
// prefactor times |Omega(t)|^2, so integrals over time reduce to the pulse
// area h(t1, t2).

#include <vector>

#include "photon_src/qmodel.hpp"

namespace photon_src {

/// Excited-subspace levels in H_NH order: (|e2,0>,) |e,0>, |g,1>.
std::vector<Level> excited_levels(LevelScheme scheme);

/// H_NH = H_excited - (i/2) sum_k L_k^dagger L_k on the excited subspace.
/// Throws SingularityError when its condition number exceeds 1e12.
Operator build_nonhermitian(const SystemParams& params, LevelScheme scheme);

/// Effective quantities per unit |Omega|^2.
struct RatePrefactors {
  double kappa_ex = 0.0;
  double kappa_in = 0.0;
  double gamma_u = 0.0;
  double gamma_o = 0.0;
  double gamma_o2 = 0.0;
  double gamma_e = 0.0;
  double detuning = 0.0;

  double kappa() const { return kappa_ex + kappa_in; }
  double gamma() const { return gamma_u + gamma_o; }
  /// Decay of the no-jump amplitude: kappa + every atomic channel.
  double no_jump() const { return kappa() + gamma() + gamma_o2 + gamma_e; }
  /// Decay of the |u,0> population when L_u jumps return to |u,0>.
  double u_depletion() const { return kappa() + gamma_o + gamma_o2 + gamma_e; }
};

/// Effective rates obtained by the generic recipe L_k H_NH^{-1} V_+ with a
/// numerically inverted H_NH. Independent of the closed-form coefficients.
RatePrefactors generic_effective_prefactors(const SystemParams& params, LevelScheme scheme);

class EffectiveModel {
 public:
  EffectiveModel(const SystemParams& params, LevelScheme scheme, PulseShape pulse);

  LevelScheme scheme() const { return scheme_; }
  const SystemParams& params() const { return params_; }
  const PulseShape& pulse() const { return pulse_; }

  /// A(t) = a_coefficient() * Omega(t) (A^(3) for the three-level scheme).
  Complex a_coefficient() const { return a_coefficient_; }
  /// <g,0|L_ex^eff(t)|u,0> = ex_amplitude() * Omega(t).
  Complex ex_amplitude() const { return ex_amplitude_; }
  const RatePrefactors& prefactors() const { return prefactors_; }

  Complex A(double t) const { return a_coefficient_ * pulse_.amplitude(t); }
  double delta_eff(double t) const { return prefactors_.detuning * intensity(t); }
  double kappa_ex_eff(double t) const { return prefactors_.kappa_ex * intensity(t); }
  double kappa_in_eff(double t) const { return prefactors_.kappa_in * intensity(t); }
  double gamma_u_eff(double t) const { return prefactors_.gamma_u * intensity(t); }
  double gamma_o_eff(double t) const { return prefactors_.gamma_o * intensity(t); }
  double kappa_eff(double t) const { return prefactors_.kappa() * intensity(t); }
  double gamma_eff(double t) const { return prefactors_.gamma() * intensity(t); }

  /// max_t |Omega(t)| divided by the smallest singular value of H_NH. The
  /// reduction assumes this is small; it is reported, not enforced.
  double drive_diagnostic() const { return drive_diagnostic_; }

 private:
  double intensity(double t) const { return std::norm(pulse_.amplitude(t)); }

  SystemParams params_;
  LevelScheme scheme_;
  PulseShape pulse_;
  Complex a_coefficient_;
  Complex ex_amplitude_;
  RatePrefactors prefactors_;
  double drive_diagnostic_ = 0.0;
};

/// Throws SingularityError when the A(t) denominator vanishes.
EffectiveModel build_effective(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse);

struct ExcitedState {
  LevelScheme scheme;
  std::vector<Level> levels;  // same order as excited_levels(scheme)
  Ket amplitudes;
};

/// Adiabatically eliminated excited-state amplitudes for drive omega_t and
/// |u,0> population u_population. With use_total_e2_decay the |e2> width is
/// gamma_u + gamma_o2 + gamma_e instead of gamma_u (the no-jump trajectory).
ExcitedState excited_state(const SystemParams& params, LevelScheme scheme, Complex omega_t,
                           double u_population, bool use_total_e2_decay = false);

struct NoJumpEvolution {
  std::vector<double> times;
  /// log <u,0|Phi_s(t)>; -infinity before s.
  std::vector<Complex> log_amplitude;
  std::vector<Complex> amplitude;
  /// Ground populations of the effective master equation started in |u,0> at s.
  std::vector<double> u_population;
  std::vector<double> g0_population;
  std::vector<double> o_population;
};

/// Integrates the effective rates over t_grid (8-point Gauss-Legendre per
/// interval) starting from |u,0> at time s. Throws ArgumentError if t_grid is
/// not ascending.
NoJumpEvolution effective_evolve(const EffectiveModel& model, const std::vector<double>& t_grid, double s = 0.0);

}  // namespace photon_src
