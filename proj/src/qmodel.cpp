#include "photon_src/qmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace photon_src {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

// int_0^x |a + b y|^2 dy
double segment_integral(Complex a, Complex b, double x) {
  return std::norm(a) * x + std::real(std::conj(a) * b) * x * x + std::norm(b) * x * x * x / 3.0;
}

}  // namespace

int dimension(LevelScheme scheme) { return scheme == LevelScheme::FourLevel ? 6 : 5; }

bool has_level(LevelScheme scheme, Level level) {
  return scheme == LevelScheme::FourLevel || level != Level::E2_0;
}

int basis_index(LevelScheme scheme, Level level) {
  if (scheme == LevelScheme::FourLevel) return static_cast<int>(level);
  switch (level) {
    case Level::U0: return 0;
    case Level::E0: return 1;
    case Level::G1: return 2;
    case Level::G0: return 3;
    case Level::O0: return 4;
    case Level::E2_0: break;
  }
  throw ArgumentError("level |e2,0> does not exist in the three-level scheme");
}

std::vector<Level> basis_levels(LevelScheme scheme) {
  if (scheme == LevelScheme::FourLevel)
    return {Level::U0, Level::E2_0, Level::E0, Level::G1, Level::G0, Level::O0};
  return {Level::U0, Level::E0, Level::G1, Level::G0, Level::O0};
}

std::vector<Level> manifold_levels(LevelScheme scheme) {
  if (scheme == LevelScheme::FourLevel) return {Level::U0, Level::E2_0, Level::E0, Level::G1};
  return {Level::U0, Level::E0, Level::G1};
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::U0: return "u0";
    case Level::E2_0: return "e20";
    case Level::E0: return "e0";
    case Level::G1: return "g1";
    case Level::G0: return "g0";
    case Level::O0: return "o0";
  }
  return "?";
}

std::string_view scheme_name(LevelScheme scheme) {
  return scheme == LevelScheme::FourLevel ? "four" : "three";
}

void SystemParams::validate(LevelScheme scheme) const {
  if (!std::isfinite(g) || g <= 0.0) throw ParameterError("g must be positive");
  const std::pair<const char*, double> rates[] = {
      {"kappa_ex", kappa_ex}, {"kappa_in", kappa_in}, {"gamma_u", gamma_u},
      {"gamma_o", gamma_o},   {"gamma_o2", gamma_o2}, {"gamma_e", gamma_e}};
  for (const auto& [name, value] : rates) {
    if (!finite_nonneg(value)) throw ParameterError(std::string(name) + " must be a finite non-negative rate");
  }
  if (!std::isfinite(delta_e) || !std::isfinite(delta_e2) || !std::isfinite(omega2))
    throw ParameterError("detunings and omega2 must be finite");
  if (scheme == LevelScheme::ThreeLevel) {
    if (omega2 != 0.0 || delta_e2 != 0.0 || gamma_o2 != 0.0 || gamma_e != 0.0)
      throw ParameterError("omega2, delta_e2, gamma_o2 and gamma_e must be zero for the three-level scheme");
  }
}

double optimal_kappa_ex(double g, double kappa_in, double gamma) {
  if (kappa_in <= 0.0 || gamma <= 0.0) throw ParameterError("optimal kappa_ex needs kappa_in > 0 and gamma > 0");
  return kappa_in * std::sqrt(1.0 + g * g / (kappa_in * gamma));
}

// ---------------------------------------------------------------------------
// PulseShape

PulseShape PulseShape::linear(double omega0, double t_end) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ParameterError("linear pulse needs omega0 > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParameterError("pulse t_end must be positive");
  PulseShape p;
  p.kind_ = Kind::Linear;
  p.omega0_ = omega0;
  p.t_end_ = t_end;
  return p;
}

PulseShape PulseShape::tabulated(std::vector<double> times, std::vector<Complex> values, double t_end) {
  if (times.empty() || times.size() != values.size())
    throw ParameterError("tabulated pulse needs equally many (time, value) samples");
  if (times.front() < 0.0) throw ParameterError("tabulated pulse times must be non-negative");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw ParameterError("tabulated pulse samples must be finite");
    if (i > 0 && !(times[i] > times[i - 1])) throw ParameterError("tabulated pulse times must be strictly ascending");
  }
  PulseShape p;
  p.kind_ = Kind::Tabulated;
  p.t_end_ = t_end < 0.0 ? times.back() : t_end;
  if (!(p.t_end_ > 0.0)) throw ParameterError("pulse t_end must be positive");
  p.cumulative_.resize(times.size());
  p.cumulative_[0] = times[0] * std::norm(values[0]);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    const Complex slope = (values[i] - values[i - 1]) / dt;
    p.cumulative_[i] = p.cumulative_[i - 1] + segment_integral(values[i - 1], slope, dt);
  }
  p.times_ = std::move(times);
  p.values_ = std::move(values);
  return p;
}

Complex PulseShape::amplitude(double t) const {
  t = std::clamp(t, 0.0, t_end_);
  if (kind_ == Kind::Linear) return {omega0_ * t, 0.0};
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double frac = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

double PulseShape::cumulative(double t) const {
  if (t <= 0.0) return t * std::norm(amplitude(0.0));
  if (t > t_end_) return cumulative(t_end_) + (t - t_end_) * std::norm(amplitude(t_end_));
  if (kind_ == Kind::Linear) return omega0_ * omega0_ * t * t * t / 3.0;
  if (t <= times_.front()) return t * std::norm(values_.front());
  if (t >= times_.back()) return cumulative_.back() + (t - times_.back()) * std::norm(values_.back());
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const Complex slope = (values_[k + 1] - values_[k]) / (times_[k + 1] - times_[k]);
  return cumulative_[k] + segment_integral(values_[k], slope, t - times_[k]);
}

double PulseShape::time_at_cumulative(double u) const {
  if (u <= 0.0) return 0.0;
  const double h_end = cumulative(t_end_);
  if (u > h_end) {
    const double tail_rate = std::norm(amplitude(t_end_));
    if (tail_rate <= 0.0) throw ArgumentError("pulse area never reaches the requested value");
    return t_end_ + (u - h_end) / tail_rate;
  }
  if (kind_ == Kind::Linear) return std::cbrt(3.0 * u / (omega0_ * omega0_));
  double lo = 0.0;
  double hi = t_end_;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cumulative(mid) >= u) hi = mid; else lo = mid;
  }
  return hi;
}

double PulseShape::peak_amplitude() const {
  if (kind_ == Kind::Linear) return omega0_ * t_end_;
  double peak = std::abs(amplitude(t_end_));
  for (std::size_t i = 0; i < times_.size() && times_[i] <= t_end_; ++i) peak = std::max(peak, std::abs(values_[i]));
  return peak;
}

PulseSample eval_pulse(const PulseShape& pulse, double t) {
  return {pulse.amplitude(t), t < 0.0 || t > pulse.t_end()};
}

double h_integral(const PulseShape& pulse, double t1, double t2) {
  if (t1 > t2) throw ArgumentError("h_integral requires t1 <= t2");
  if (t1 == t2) return 0.0;
  return std::max(0.0, pulse.cumulative(t2) - pulse.cumulative(t1));
}

// ---------------------------------------------------------------------------
// Operators

Operator build_hamiltonian(const SystemParams& params, LevelScheme scheme, Complex omega_t) {
  params.validate(scheme);
  const int n = dimension(scheme);
  Operator h = Operator::Zero(n, n);
  const int u = basis_index(scheme, Level::U0);
  const int e = basis_index(scheme, Level::E0);
  const int g1 = basis_index(scheme, Level::G1);

  h(e, e) = params.delta_e;
  h(g1, e) = params.g;
  h(e, g1) = params.g;
  if (scheme == LevelScheme::FourLevel) {
    const int e2 = basis_index(scheme, Level::E2_0);
    h(e2, e2) = params.delta_e2;
    h(e2, u) = omega_t;
    h(u, e2) = std::conj(omega_t);
    h(e, e2) = params.omega2;
    h(e2, e) = params.omega2;
  } else {
    h(e, u) = omega_t;
    h(u, e) = std::conj(omega_t);
  }
  return h;
}

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::Ex: return "ex";
    case Channel::In: return "in";
    case Channel::U: return "u";
    case Channel::O: return "o";
    case Channel::O2: return "o2";
    case Channel::E: return "e";
  }
  return "?";
}

std::vector<LindbladTerm> build_lindblads(const SystemParams& params, LevelScheme scheme) {
  params.validate(scheme);
  const int n = dimension(scheme);
  const bool four = scheme == LevelScheme::FourLevel;

  struct Spec {
    Channel channel;
    double rate;
    Level from;
    Level to;
  };
  std::vector<Spec> specs = {
      {Channel::Ex, params.kappa_ex, Level::G1, Level::G0},
      {Channel::In, params.kappa_in, Level::G1, Level::G0},
      {Channel::U, params.gamma_u, four ? Level::E2_0 : Level::E0, Level::U0},
      {Channel::O, params.gamma_o, Level::E0, Level::O0},
  };
  if (four) {
    specs.push_back({Channel::O2, params.gamma_o2, Level::E2_0, Level::O0});
    specs.push_back({Channel::E, params.gamma_e, Level::E2_0, Level::E0});
  }

  std::vector<LindbladTerm> terms;
  for (const auto& s : specs) {
    if (s.rate == 0.0) continue;
    LindbladTerm term{s.channel, s.rate, basis_index(scheme, s.from), basis_index(scheme, s.to),
                      Operator::Zero(n, n)};
    term.op(term.target, term.source) = std::sqrt(2.0 * s.rate);
    terms.push_back(std::move(term));
  }
  return terms;
}

DensityDiagnostics diagnose(const Operator& rho) {
  const Operator herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(herm, Eigen::EigenvaluesOnly);
  return {(rho - rho.adjoint()).cwiseAbs().maxCoeff(), rho.trace(), solver.eigenvalues().minCoeff()};
}

}  // namespace photon_src
