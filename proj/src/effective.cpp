#include "photon_src/effective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace photon_src {

namespace {

constexpr double kConditionLimit = 1e12;

const std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
const std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};

double integrate_intensity(const PulseShape& pulse, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k)
    sum += kGaussWeights[k] * std::norm(pulse.amplitude(mid + half * kGaussNodes[k]));
  return half * sum;
}

// Breakpoints where |Omega|^2 is not smooth.
std::vector<double> pulse_kinks(const PulseShape& pulse) {
  std::vector<double> kinks{pulse.t_end()};
  if (pulse.kind() == PulseShape::Kind::Tabulated)
    for (double t : pulse.times())
      if (t < pulse.t_end()) kinks.push_back(t);
  std::sort(kinks.begin(), kinks.end());
  return kinks;
}

double integrate_piecewise(const PulseShape& pulse, const std::vector<double>& kinks, double a, double b) {
  double total = 0.0;
  double left = a;
  for (auto it = std::upper_bound(kinks.begin(), kinks.end(), a); it != kinks.end() && *it < b; ++it) {
    total += integrate_intensity(pulse, left, *it);
    left = *it;
  }
  return total + integrate_intensity(pulse, left, b);
}

}  // namespace

std::vector<Level> excited_levels(LevelScheme scheme) {
  if (scheme == LevelScheme::FourLevel) return {Level::E2_0, Level::E0, Level::G1};
  return {Level::E0, Level::G1};
}

Operator build_nonhermitian(const SystemParams& params, LevelScheme scheme) {
  const Operator h = build_hamiltonian(params, scheme, Complex(0.0, 0.0));
  const int n = dimension(scheme);
  Operator decay = Operator::Zero(n, n);
  for (const auto& term : build_lindblads(params, scheme)) decay += term.op.adjoint() * term.op;

  const auto levels = excited_levels(scheme);
  const auto m = static_cast<Eigen::Index>(levels.size());
  Operator out(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      const int i = basis_index(scheme, levels[static_cast<std::size_t>(r)]);
      const int j = basis_index(scheme, levels[static_cast<std::size_t>(c)]);
      out(r, c) = h(i, j) - Complex(0.0, 0.5) * decay(i, j);
    }
  }
  Eigen::JacobiSVD<Operator> svd(out);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > kConditionLimit)
    throw SingularityError("non-Hermitian excited-subspace Hamiltonian is numerically singular");
  return out;
}

RatePrefactors generic_effective_prefactors(const SystemParams& params, LevelScheme scheme) {
  const Operator hnh = build_nonhermitian(params, scheme);
  const auto levels = excited_levels(scheme);
  const Level driven = scheme == LevelScheme::FourLevel ? Level::E2_0 : Level::E0;

  Ket v_plus = Ket::Zero(static_cast<Eigen::Index>(levels.size()));
  auto local = [&levels](Level l) {
    return static_cast<Eigen::Index>(std::find(levels.begin(), levels.end(), l) - levels.begin());
  };
  v_plus(local(driven)) = 1.0;
  const Ket x = hnh.fullPivLu().solve(v_plus);

  RatePrefactors out;
  out.detuning = -x(local(driven)).real();
  const auto basis = basis_levels(scheme);
  for (const auto& term : build_lindblads(params, scheme)) {
    const Level source = basis[static_cast<std::size_t>(term.source)];
    if (std::find(levels.begin(), levels.end(), source) == levels.end()) continue;
    const double rate = term.rate * std::norm(x(local(source)));
    switch (term.channel) {
      case Channel::Ex: out.kappa_ex += rate; break;
      case Channel::In: out.kappa_in += rate; break;
      case Channel::U: out.gamma_u += rate; break;
      case Channel::O: out.gamma_o += rate; break;
      case Channel::O2: out.gamma_o2 += rate; break;
      case Channel::E: out.gamma_e += rate; break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

EffectiveModel::EffectiveModel(const SystemParams& params, LevelScheme scheme, PulseShape pulse)
    : params_(params), scheme_(scheme), pulse_(std::move(pulse)) {
  params_.validate(scheme_);
  const double g = params_.g;
  const double kappa = params_.kappa();
  const double de = params_.delta_e;
  const Complex i(0.0, 1.0);

  if (scheme_ == LevelScheme::FourLevel) {
    const double o2 = params_.omega2;
    const double de2 = params_.delta_e2;
    const double width = params_.gamma_total_e2();
    const double big_g = g * g + kappa * params_.gamma_o;
    const Complex denom(big_g * width + kappa * (o2 * o2 - de * de2), big_g * de2 + kappa * width * de);
    const double scale = big_g * width + kappa * o2 * o2 + kappa * std::abs(de * de2) + big_g * std::abs(de2) +
                         kappa * width * std::abs(de);
    if (!(std::abs(denom) > 1e-14 * std::max(1.0, scale)) || kappa == 0.0)
      throw SingularityError("effective coupling A(t) has a vanishing denominator");
    a_coefficient_ = kappa / denom;
    const double a2 = std::norm(a_coefficient_);
    const double b = big_g * big_g + kappa * kappa * de * de;
    prefactors_.kappa_ex = params_.kappa_ex * g * g * o2 * o2 / (kappa * kappa) * a2;
    prefactors_.kappa_in = params_.kappa_in * g * g * o2 * o2 / (kappa * kappa) * a2;
    prefactors_.gamma_u = params_.gamma_u * b / (kappa * kappa) * a2;
    prefactors_.gamma_o = params_.gamma_o * o2 * o2 * a2;
    prefactors_.gamma_o2 = params_.gamma_o2 * b / (kappa * kappa) * a2;
    prefactors_.gamma_e = params_.gamma_e * b / (kappa * kappa) * a2;
    prefactors_.detuning = -(big_g * big_g * de2 + kappa * kappa * (de * de2 - o2 * o2) * de) / (kappa * kappa) * a2;
    ex_amplitude_ = -i * std::sqrt(2.0 * params_.kappa_ex) * (g / kappa) * o2 * a_coefficient_;
  } else {
    const Complex denom = g * g + kappa * Complex(params_.gamma(), de);
    if (!(std::abs(denom) > 0.0) || kappa == 0.0)
      throw SingularityError("effective coupling A(t) has a vanishing denominator");
    a_coefficient_ = kappa / denom;
    const double a2 = std::norm(a_coefficient_);
    prefactors_.kappa_ex = params_.kappa_ex * g * g / (kappa * kappa) * a2;
    prefactors_.kappa_in = params_.kappa_in * g * g / (kappa * kappa) * a2;
    prefactors_.gamma_u = params_.gamma_u * a2;
    prefactors_.gamma_o = params_.gamma_o * a2;
    prefactors_.detuning = -de * a2;
    ex_amplitude_ = std::sqrt(2.0 * params_.kappa_ex) * (g / kappa) * a_coefficient_;
  }

  Eigen::JacobiSVD<Operator> svd(build_nonhermitian(params_, scheme_));
  const auto& sv = svd.singularValues();
  drive_diagnostic_ = pulse_.peak_amplitude() / sv(sv.size() - 1);
}

EffectiveModel build_effective(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse) {
  return EffectiveModel(params, scheme, pulse);
}

ExcitedState excited_state(const SystemParams& params, LevelScheme scheme, Complex omega_t, double u_population,
                           bool use_total_e2_decay) {
  params.validate(scheme);
  if (!(u_population >= 0.0 && u_population <= 1.0)) throw ArgumentError("u_population must lie in [0, 1]");
  const double g = params.g;
  const double kappa = params.kappa();
  const double de = params.delta_e;
  const Complex i(0.0, 1.0);
  const double root = std::sqrt(u_population);

  ExcitedState out{scheme, excited_levels(scheme), Ket()};
  if (scheme == LevelScheme::FourLevel) {
    const double width = use_total_e2_decay ? params.gamma_total_e2() : params.gamma_u;
    const Complex wide(width, params.delta_e2);
    const Complex denom = g * g * wide + kappa * (Complex(params.gamma_o, de) * wide + params.omega2 * params.omega2);
    if (std::abs(denom) == 0.0) throw SingularityError("excited-state denominator vanishes");
    const Complex pref = i * omega_t / denom * root;
    out.amplitudes.resize(3);
    out.amplitudes << pref * (g * g + kappa * Complex(params.gamma_o, de)), pref * (-i * kappa * params.omega2),
        pref * (-g * params.omega2);
  } else {
    const Complex denom = g * g + kappa * Complex(params.gamma(), de);
    if (std::abs(denom) == 0.0) throw SingularityError("excited-state denominator vanishes");
    const Complex pref = omega_t / denom * root;
    out.amplitudes.resize(2);
    out.amplitudes << pref * (i * kappa), pref * g;
  }
  return out;
}

NoJumpEvolution effective_evolve(const EffectiveModel& model, const std::vector<double>& t_grid, double s) {
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw ArgumentError("effective_evolve needs a strictly ascending grid");

  const RatePrefactors& p = model.prefactors();
  const Complex exponent(p.no_jump(), p.detuning);
  const double depletion = p.u_depletion();
  const auto kinks = pulse_kinks(model.pulse());

  NoJumpEvolution out;
  out.times = t_grid;
  const std::size_t n = t_grid.size();
  out.log_amplitude.resize(n);
  out.amplitude.resize(n);
  out.u_population.resize(n);
  out.g0_population.resize(n);
  out.o_population.resize(n);

  double area = 0.0;  // int_s^t |Omega|^2
  double last = s;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_grid[k];
    if (t < s) {
      out.log_amplitude[k] = Complex(-std::numeric_limits<double>::infinity(), 0.0);
      out.amplitude[k] = 0.0;
      out.u_population[k] = out.g0_population[k] = out.o_population[k] = 0.0;
      continue;
    }
    area += integrate_piecewise(model.pulse(), kinks, last, t);
    last = t;
    out.log_amplitude[k] = -exponent * area;
    out.amplitude[k] = std::exp(out.log_amplitude[k]);
    const double u_pop = std::exp(-2.0 * depletion * area);
    out.u_population[k] = u_pop;
    out.g0_population[k] = depletion > 0.0 ? p.kappa() / depletion * (1.0 - u_pop) : 0.0;
    out.o_population[k] = depletion > 0.0 ? (p.gamma_o + p.gamma_o2) / depletion * (1.0 - u_pop) : 0.0;
  }
  return out;
}

}  // namespace photon_src
