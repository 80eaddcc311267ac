#pragma once

// Analytic performance formulas for both level schemes. Everything here is a
// pure function of the parameters (and the pulse area where time enters).

#include <optional>
#include <vector>

#include "photon_src/effective.hpp"
#include "photon_src/qmodel.hpp"

namespace photon_src::closedform {

struct Probabilities {
  double p_si;
  double p_total;
  double r_re;
};

/// P_si, P_total and R_re = 1 - P_si/P_total. With gamma_o2 > 0 the total uses
/// the dressed gamma_o'. Throws ParameterError for invalid params.
Probabilities p_si_total_rre(const SystemParams& params, LevelScheme scheme);

/// Same quantities read off effective rate prefactors (kappa_ex / no_jump etc.).
Probabilities probabilities_from_rates(const RatePrefactors& rates);

struct PurityFidelity {
  double d_s;
  double f_s;
};

/// Throws ArgumentError unless 0 <= r_re <= 1.
PurityFidelity purity_fidelity(double r_re);

double lambda_si(const SystemParams& params, LevelScheme scheme);
/// 2 R_re / gamma_u; +infinity when gamma_u = 0.
double lambda_si_bound(const SystemParams& params, LevelScheme scheme);
double optimal_delta_e2(const SystemParams& params);

/// Omega_2 at which R_re equals the three-level R_re^(3) for the same g, kappa, gamma.
double reexcitation_threshold_omega2(const SystemParams& params);

/// Three-level reference values sharing g, kappa, gamma_u, gamma_o and delta_e.
Probabilities three_level_reference(const SystemParams& params);

double p_si_of_t(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double t);
double p_re_of_t(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double t);
/// Rate of the first |e2> -> |u> (or |e> -> |u>) jump at time s.
double rate_r(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s);

constexpr double kEmissionFraction = 0.99;

/// Time at which P_si(t) reaches `fraction` of its limit. Throws NotReachedError
/// if that needs more pulse area than the pulse delivers by t_end.
double emission_time(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse,
                     double fraction = kEmissionFraction);
/// Bisection on p_si_of_t over [0, t_end].
double emission_time_bisection(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse,
                               double fraction = kEmissionFraction);
/// Like emission_time but lets the area keep growing past t_end.
double emission_time_estimate(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse);

/// <psi_{s'}|psi_s> between two single-excitation wavepackets.
Complex overlap(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s,
                double s_prime);

struct ExtendedDecay {
  double gamma_o_prime;
  double p_total_prime;
  double r_re_prime;
  double p_pure;
  double decay_trace_bound;
};

/// Four-level scheme with gamma_o2 and gamma_e.
ExtendedDecay extended_decay(const SystemParams& params);

/// Parameter slice of the re-excitation ratio map, in units of gamma = gamma_u + gamma_o.
struct RatioSlice {
  double kappa_ex_over_gamma = 0.99;
  double kappa_in_over_gamma = 0.01;
};

struct RatioPoint {
  double ratio;
  double r_re;
  double r_re3;
};

/// R_re / R_re^(3) at (g/gamma, Omega_2/gamma) with delta_e = 0 and gamma_u = gamma_o.
RatioPoint ratio_map(double g_over_gamma, double omega2_over_gamma, const RatioSlice& slice = {});
/// Omega_2/gamma on the ratio = 1 contour for the given g/gamma.
double ratio_contour_omega2(double g_over_gamma, const RatioSlice& slice = {});

struct PerformanceSummary {
  double p_si;
  double p_total;
  double r_re;
  double d_s;
  double f_s;
  double lambda_si;
  double lambda_si_bound;
  std::optional<double> t_em;  // empty when the pulse never reaches the threshold
};

PerformanceSummary summarize(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse);

}  // namespace photon_src::closedform
