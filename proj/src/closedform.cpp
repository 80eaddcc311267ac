#include "photon_src/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace photon_src::closedform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(const SystemParams& params, LevelScheme scheme) {
  params.validate(scheme);
  if (!(params.kappa() > 0.0)) throw ParameterError("closed forms need kappa_ex + kappa_in > 0");
}

// Shared pieces of the four-level algebra.
struct Four {
  double g2, kappa, big_g, b, width, d_re, d_im, d2;

  explicit Four(const SystemParams& p) {
    g2 = p.g * p.g;
    kappa = p.kappa();
    big_g = g2 + kappa * p.gamma_o;
    b = big_g * big_g + kappa * kappa * p.delta_e * p.delta_e;
    width = p.gamma_u + p.gamma_o2 + p.gamma_e;
    d_re = big_g * width + kappa * (p.omega2 * p.omega2 - p.delta_e * p.delta_e2);
    d_im = big_g * p.delta_e2 + kappa * width * p.delta_e;
    d2 = d_re * d_re + d_im * d_im;
    if (!(d2 > 0.0)) throw SingularityError("four-level denominator vanishes");
  }
};

struct Three {
  double g2, kappa, gamma, den2;

  explicit Three(const SystemParams& p) {
    g2 = p.g * p.g;
    kappa = p.kappa();
    gamma = p.gamma();
    const double re = g2 + kappa * gamma;
    den2 = re * re + kappa * kappa * p.delta_e * p.delta_e;
  }
};

// Per unit pulse area: lambda (no-jump decay x2), mu (|u,0> depletion x2),
// the u-jump rate and the effective detuning.
struct AreaRates {
  double lambda;
  double mu;
  double gamma_u;
  double detuning;
};

AreaRates area_rates(const SystemParams& p, LevelScheme scheme) {
  check(p, scheme);
  const double o2sq = p.omega2 * p.omega2;
  if (scheme == LevelScheme::FourLevel) {
    const Four f(p);
    return {2.0 * (f.width * f.b + f.big_g * f.kappa * o2sq) / f.d2,
            2.0 * (f.kappa * f.big_g * o2sq + (p.gamma_o2 + p.gamma_e) * f.b) / f.d2,
            p.gamma_u * f.b / f.d2,
            -(f.big_g * f.big_g * p.delta_e2 + f.kappa * f.kappa * (p.delta_e * p.delta_e2 - o2sq) * p.delta_e) /
                f.d2};
  }
  const Three t(p);
  return {2.0 * t.kappa * (t.g2 + t.kappa * t.gamma) / t.den2,
          2.0 * t.kappa * (t.g2 + t.kappa * p.gamma_o) / t.den2,
          t.kappa * t.kappa * p.gamma_u / t.den2,
          -p.delta_e * t.kappa * t.kappa / t.den2};
}

double area_target(double lambda, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("emission fraction must lie in (0, 1)");
  if (!(lambda > 0.0)) throw NotReachedError("lambda_si is zero; the photon is never emitted");
  return -std::log1p(-fraction) / lambda;
}

}  // namespace

Probabilities p_si_total_rre(const SystemParams& params, LevelScheme scheme) {
  check(params, scheme);
  const double ratio = params.kappa_ex / params.kappa();
  if (scheme == LevelScheme::ThreeLevel) {
    const Three t(params);
    return {ratio * t.g2 / (t.g2 + t.kappa * t.gamma), ratio * t.g2 / (t.g2 + t.kappa * params.gamma_o),
            t.kappa * params.gamma_u / (t.g2 + t.kappa * t.gamma)};
  }
  const Four f(params);
  const double o2sq = params.omega2 * params.omega2;
  const double denom = f.kappa * f.big_g * o2sq + f.width * f.b;
  const double p_si = params.kappa_ex * f.g2 * o2sq / denom;
  const double p_total = extended_decay(params).p_total_prime;
  const double r_re = (params.gamma_u + params.gamma_e) * f.b / denom;
  return {p_si, p_total, r_re};
}

Probabilities probabilities_from_rates(const RatePrefactors& rates) {
  const double p_si = rates.kappa_ex / rates.no_jump();
  const double p_total = rates.kappa_ex / rates.u_depletion();
  return {p_si, p_total, 1.0 - rates.u_depletion() / rates.no_jump()};
}

PurityFidelity purity_fidelity(double r_re) {
  if (!(r_re >= 0.0 && r_re <= 1.0)) throw ArgumentError("R_re must lie in [0, 1]");
  return {1.0 - r_re, 1.0 - r_re / (2.0 - r_re)};
}

double lambda_si(const SystemParams& params, LevelScheme scheme) { return area_rates(params, scheme).lambda; }

double lambda_si_bound(const SystemParams& params, LevelScheme scheme) {
  if (params.gamma_u == 0.0) return kInf;
  return 2.0 * p_si_total_rre(params, scheme).r_re / params.gamma_u;
}

double optimal_delta_e2(const SystemParams& params) {
  check(params, LevelScheme::FourLevel);
  const Four f(params);
  return f.kappa * f.kappa * params.omega2 * params.omega2 * params.delta_e / f.b;
}

Probabilities three_level_reference(const SystemParams& params) {
  SystemParams three = params;
  three.omega2 = three.delta_e2 = three.gamma_o2 = three.gamma_e = 0.0;
  return p_si_total_rre(three, LevelScheme::ThreeLevel);
}

double reexcitation_threshold_omega2(const SystemParams& params) {
  check(params, LevelScheme::FourLevel);
  if (params.gamma_u == 0.0) return 0.0;
  const double r3 = three_level_reference(params).r_re;
  const double kappa = params.kappa();
  const double big_g = params.g * params.g + kappa * params.gamma_o;
  const double b = big_g * big_g + kappa * kappa * params.delta_e * params.delta_e;
  return std::sqrt(params.gamma_u * b * (1.0 / r3 - 1.0) / (kappa * big_g));
}

double p_si_of_t(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double t) {
  if (t <= 0.0) return 0.0;
  const double lambda = lambda_si(params, scheme);
  return p_si_total_rre(params, scheme).p_si * -std::expm1(-lambda * pulse.cumulative(t));
}

double p_re_of_t(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double t) {
  if (t <= 0.0) return 0.0;
  const AreaRates a = area_rates(params, scheme);
  const Probabilities p = p_si_total_rre(params, scheme);
  const double h = pulse.cumulative(t);
  return std::max(0.0, p.p_total * -std::expm1(-a.mu * h) - p.p_si * -std::expm1(-a.lambda * h));
}

double rate_r(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s) {
  const AreaRates a = area_rates(params, scheme);
  const double h = s <= 0.0 ? 0.0 : pulse.cumulative(s);
  return 2.0 * a.gamma_u * std::norm(pulse.amplitude(s)) * std::exp(-a.mu * h);
}

double emission_time(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double fraction) {
  const double target = area_target(lambda_si(params, scheme), fraction);
  if (pulse.kind() == PulseShape::Kind::Linear) {
    const double t = std::cbrt(3.0 * target / (pulse.omega0() * pulse.omega0()));
    if (t > pulse.t_end()) throw NotReachedError("emission threshold not reached before the pulse ends");
    return t;
  }
  if (target > pulse.cumulative(pulse.t_end()))
    throw NotReachedError("emission threshold not reached before the pulse ends");
  const double goal = fraction * p_si_total_rre(params, scheme).p_si;
  double lo = 0.0;
  double hi = pulse.t_end();
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p_si_of_t(params, scheme, pulse, mid) >= goal) hi = mid; else lo = mid;
  }
  return hi;
}

double emission_time_bisection(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse,
                               double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("emission fraction must lie in (0, 1)");
  const double goal = fraction * p_si_total_rre(params, scheme).p_si;
  if (!(goal > 0.0) || p_si_of_t(params, scheme, pulse, pulse.t_end()) < goal)
    throw NotReachedError("emission threshold not reached before the pulse ends");
  double lo = 0.0;
  double hi = pulse.t_end();
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p_si_of_t(params, scheme, pulse, mid) >= goal) hi = mid; else lo = mid;
  }
  return hi;
}

double emission_time_estimate(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse) {
  const double target = area_target(lambda_si(params, scheme), kEmissionFraction);
  try {
    return pulse.time_at_cumulative(target);
  } catch (const ArgumentError& e) {
    throw NotReachedError(e.what());
  }
}

Complex overlap(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s, double s_prime) {
  if (s < 0.0 || s_prime < 0.0) throw ArgumentError("overlap times must be non-negative");
  const AreaRates a = area_rates(params, scheme);
  const double p_si = p_si_total_rre(params, scheme).p_si;
  const Complex rate(0.5 * a.lambda, -a.detuning);
  if (s >= s_prime) return p_si * std::exp(-rate * h_integral(pulse, s_prime, s));
  return p_si * std::exp(-std::conj(rate) * h_integral(pulse, s, s_prime));
}

ExtendedDecay extended_decay(const SystemParams& params) {
  check(params, LevelScheme::FourLevel);
  const Four f(params);
  const double o2sq = params.omega2 * params.omega2;
  const double ratio = params.kappa_ex / f.kappa;

  ExtendedDecay out{};
  if (params.gamma_o2 == 0.0) out.gamma_o_prime = params.gamma_o;
  else if (o2sq == 0.0) out.gamma_o_prime = kInf;
  else out.gamma_o_prime = params.gamma_o + params.gamma_o2 * f.b / (f.kappa * f.kappa * o2sq);

  if (std::isinf(out.gamma_o_prime)) {
    out.p_total_prime = 0.0;
    out.r_re_prime = 1.0;
  } else {
    const double big_g = f.g2 + f.kappa * out.gamma_o_prime;
    const double b = big_g * big_g + f.kappa * f.kappa * params.delta_e * params.delta_e;
    out.p_total_prime = ratio * f.g2 / big_g;
    const double denom = f.kappa * big_g * o2sq + params.gamma_u * b;
    out.r_re_prime = denom > 0.0 ? params.gamma_u * b / denom : 0.0;
  }
  const double denom = f.kappa * f.big_g * o2sq + f.width * f.b;
  out.p_pure = params.kappa_ex * f.g2 * o2sq / denom;
  out.decay_trace_bound = ratio * (params.gamma_u + params.gamma_e) * f.b / denom;
  return out;
}

namespace {

SystemParams slice_params(double g_over_gamma, double omega2_over_gamma, const RatioSlice& slice) {
  if (!(g_over_gamma > 0.0) || !(omega2_over_gamma >= 0.0))
    throw ArgumentError("ratio map needs g/gamma > 0 and omega2/gamma >= 0");
  SystemParams p;
  p.g = g_over_gamma;
  p.gamma_u = 0.5;
  p.gamma_o = 0.5;
  p.kappa_ex = slice.kappa_ex_over_gamma;
  p.kappa_in = slice.kappa_in_over_gamma;
  p.omega2 = omega2_over_gamma;
  return p;
}

}  // namespace

RatioPoint ratio_map(double g_over_gamma, double omega2_over_gamma, const RatioSlice& slice) {
  const SystemParams p = slice_params(g_over_gamma, omega2_over_gamma, slice);
  const double r = p_si_total_rre(p, LevelScheme::FourLevel).r_re;
  const double r3 = three_level_reference(p).r_re;
  return {r / r3, r, r3};
}

double ratio_contour_omega2(double g_over_gamma, const RatioSlice& slice) {
  return reexcitation_threshold_omega2(slice_params(g_over_gamma, 1.0, slice));
}

PerformanceSummary summarize(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse) {
  const Probabilities p = p_si_total_rre(params, scheme);
  const PurityFidelity pf = purity_fidelity(std::clamp(p.r_re, 0.0, 1.0));
  PerformanceSummary out{p.p_si, p.p_total, p.r_re, pf.d_s, pf.f_s,
                         lambda_si(params, scheme), lambda_si_bound(params, scheme), std::nullopt};
  try {
    out.t_em = emission_time(params, scheme, pulse);
  } catch (const NotReachedError&) {
  }
  return out;
}

}  // namespace photon_src::closedform
