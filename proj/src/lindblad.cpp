#include "photon_src/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photon_src/closedform.hpp"

namespace photon_src {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kMinStep = 1e-14;
constexpr std::size_t kMaxSteps = 20'000'000;

// y = [vec(rho) (column major), E_c ...]
class LindbladRhs {
 public:
  explicit LindbladRhs(const MasterEquation& eq) : eq_(eq), n_(dimension(eq.scheme)) {
    decay_ = Operator::Zero(n_, n_);
    for (const auto& term : eq.terms) decay_ += term.op.adjoint() * term.op;
  }

  int n() const { return n_; }

  void operator()(double t, const Ket& y, Ket& dy) const {
    Eigen::Map<const Operator> rho(y.data(), n_, n_);
    const Operator h = eq_.hamiltonian(t);
    const Operator h_rho = h * rho;
    const Operator k_rho = decay_ * rho;
    Operator d = Complex(0.0, -1.0) * (h_rho - h_rho.adjoint()) - 0.5 * (k_rho + k_rho.adjoint());
    for (std::size_t c = 0; c < eq_.terms.size(); ++c) {
      const auto& term = eq_.terms[c];
      const Operator jump = term.op * rho * term.op.adjoint();
      dy(n_ * n_ + static_cast<Eigen::Index>(c)) = jump.trace().real();
      if (!eq_.suppressed.count(term.channel)) d += jump;
    }
    Eigen::Map<Operator>(dy.data(), n_, n_) = d;
  }

 private:
  const MasterEquation& eq_;
  int n_;
  Operator decay_;
};

double manifold_population(const Operator& rho, const MasterEquation& eq) {
  double total = 0.0;
  for (Level level : eq.manifold) {
    const int i = basis_index(eq.scheme, level);
    total += rho(i, i).real();
  }
  return total;
}

void record_snapshot(SimResult& result, double t, const Ket& y, const Ket& dy, int n,
                     std::vector<Eigen::VectorXd>& rates) {
  result.times.push_back(t);
  result.rho.emplace_back(Eigen::Map<const Operator>(y.data(), n, n));
  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i) diag(i) = dy(i * n + i).real();
  rates.push_back(std::move(diag));
  for (std::size_t c = 0; c < result.channels.size(); ++c)
    result.channels[c].cumulative.push_back(y(n * n + static_cast<Eigen::Index>(c)).real());
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ArgumentError("integrator tolerances must be positive");
  if (!(dt_init > 0.0) || !(dt_max > 0.0)) throw ArgumentError("integrator step bounds must be positive");
  if (const auto* fixed = std::get_if<FixedTime>(&stop); fixed && !(fixed->t_final > 0.0))
    throw ArgumentError("fixed integration time must be positive");
  if (const auto* thr = std::get_if<PopulationThreshold>(&stop)) {
    if (!(thr->epsilon > 0.0)) throw ArgumentError("population threshold must be positive");
    if (thr->t_cap && !(*thr->t_cap > 0.0)) throw ArgumentError("time cap must be positive");
  }
}

std::vector<double> SimResult::population(Level level) const {
  const int i = basis_index(scheme, level);
  std::vector<double> out;
  out.reserve(rho.size());
  for (const auto& r : rho) out.push_back(r(i, i).real());
  return out;
}

double SimResult::residual_manifold() const {
  if (rho.empty()) return 0.0;
  double total = 0.0;
  for (Level level : manifold_levels(scheme)) {
    const int i = basis_index(scheme, level);
    total += rho.back()(i, i).real();
  }
  return total;
}

const ChannelRecord* SimResult::find(Channel channel) const {
  for (const auto& c : channels)
    if (c.channel == channel) return &c;
  return nullptr;
}

double SimResult::emission(Channel channel) const {
  const ChannelRecord* c = find(channel);
  return c && !c->cumulative.empty() ? c->cumulative.back() : 0.0;
}

SimResult evolve_master(const MasterEquation& eq, const Operator& rho0, const IntegratorConfig& config) {
  config.validate();
  const int n = dimension(eq.scheme);
  if (rho0.rows() != n || rho0.cols() != n) throw ArgumentError("initial density matrix has the wrong dimension");

  double t_stop = 0.0;
  const PopulationThreshold* threshold = std::get_if<PopulationThreshold>(&config.stop);
  if (threshold) {
    if (!threshold->t_cap) throw ArgumentError("population-threshold stop needs a time cap");
    t_stop = *threshold->t_cap;
  } else {
    t_stop = std::get<FixedTime>(config.stop).t_final;
  }

  const LindbladRhs rhs(eq);
  const Eigen::Index size = n * n + static_cast<Eigen::Index>(eq.terms.size());

  SimResult result;
  result.scheme = eq.scheme;
  for (const auto& term : eq.terms) result.channels.push_back({term.channel, term.rate, term.source, {}});

  Ket y = Ket::Zero(size);
  Eigen::Map<Operator>(y.data(), n, n) = rho0;
  Ket k1(size), k2(size), k3(size), k4(size), k5(size), k6(size), k7(size), tmp(size), y_new(size);
  std::vector<Eigen::VectorXd> rates;

  double t = 0.0;
  rhs(t, y, k1);
  record_snapshot(result, t, y, k1, n, rates);

  double dt = std::min(config.dt_init, config.dt_max);
  std::size_t steps = 0;
  while (t < t_stop) {
    if (++steps > kMaxSteps) throw IntegrationError("step budget exhausted at t = " + std::to_string(t));
    bool last = false;
    if (t + dt >= t_stop) {
      dt = t_stop - t;
      last = true;
    }

    tmp = y + dt * a21 * k1;
    rhs(t + c2 * dt, tmp, k2);
    tmp = y + dt * (a31 * k1 + a32 * k2);
    rhs(t + c3 * dt, tmp, k3);
    tmp = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * dt, tmp, k4);
    tmp = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * dt, tmp, k5);
    tmp = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + dt, tmp, k6);
    y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + dt, y_new, k7);

    if (!y_new.allFinite()) throw IntegrationError("non-finite state at t = " + std::to_string(t));

    const Ket err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < size; ++i) {
      const double scale = config.atol + config.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      err_norm = std::max(err_norm, std::abs(err(i)) / scale);
    }

    if (err_norm <= 1.0) {
      t = last ? t_stop : t + dt;
      y.swap(y_new);
      k1.swap(k7);
      record_snapshot(result, t, y, k1, n, rates);
      if (threshold) {
        const Eigen::Map<const Operator> rho(y.data(), n, n);
        if (manifold_population(rho, eq) < threshold->epsilon) {
          result.reached_threshold = true;
          break;
        }
      }
      const double grow = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      dt = std::min(dt * grow, config.dt_max);
    } else {
      ++result.rejected_steps;
      dt *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
      if (dt < kMinStep) throw IntegrationError("step size underflow at t = " + std::to_string(t));
    }
  }

  result.population_rates.resize(static_cast<Eigen::Index>(rates.size()), n);
  for (std::size_t i = 0; i < rates.size(); ++i) result.population_rates.row(static_cast<Eigen::Index>(i)) = rates[i];
  return result;
}

IntegratorConfig default_config(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse) {
  IntegratorConfig config;
  double cap = 10.0 * pulse.t_end();
  try {
    cap = 10.0 * closedform::emission_time_estimate(params, scheme, pulse);
  } catch (const NotReachedError&) {
  } catch (const SingularityError&) {
  }
  if (!std::isfinite(cap) || cap <= 0.0) cap = 10.0 * pulse.t_end();
  config.stop = PopulationThreshold{1e-6, cap};
  return config;
}

SimResult evolve(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse,
                 const IntegratorConfig& config, const std::set<Channel>& suppressed) {
  params.validate(scheme);
  MasterEquation eq{scheme,
                    [&params, &pulse, scheme](double t) { return build_hamiltonian(params, scheme, pulse.amplitude(t)); },
                    build_lindblads(params, scheme),
                    suppressed,
                    manifold_levels(scheme)};
  for (Channel c : suppressed) {
    const bool known = std::any_of(eq.terms.begin(), eq.terms.end(), [c](const auto& t) { return t.channel == c; });
    if (!known) throw ArgumentError("suppressed channel '" + std::string(channel_name(c)) + "' is not present");
  }

  IntegratorConfig cfg = config;
  if (auto* thr = std::get_if<PopulationThreshold>(&cfg.stop); thr && !thr->t_cap)
    thr->t_cap = std::get<PopulationThreshold>(default_config(params, scheme, pulse).stop).t_cap;

  const int n = dimension(scheme);
  Operator rho0 = Operator::Zero(n, n);
  rho0(basis_index(scheme, Level::U0), basis_index(scheme, Level::U0)) = 1.0;
  return evolve_master(eq, rho0, cfg);
}

FluxSeries photon_flux(const SimResult& result) {
  FluxSeries out;
  out.times = result.times;
  out.flux.assign(result.times.size(), 0.0);
  out.slope.assign(result.times.size(), 0.0);
  const ChannelRecord* ex = result.find(Channel::Ex);
  if (!ex) return out;
  const int g1 = ex->source;
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    out.flux[i] = std::max(0.0, 2.0 * ex->rate * result.rho[i](g1, g1).real());
    out.slope[i] = 2.0 * ex->rate * result.population_rates(static_cast<Eigen::Index>(i), g1);
  }
  return out;
}

double integrate_flux(const FluxSeries& flux) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < flux.times.size(); ++i) {
    const double h = flux.times[i + 1] - flux.times[i];
    total += 0.5 * h * (flux.flux[i] + flux.flux[i + 1]) + h * h / 12.0 * (flux.slope[i] - flux.slope[i + 1]);
  }
  return total;
}

}  // namespace photon_src
