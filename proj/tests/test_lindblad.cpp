#include <doctest.h>

#include <cmath>

#include "photon_src/lindblad.hpp"
#include "support.hpp"

using namespace photon_src;

namespace {

Operator pure(LevelScheme scheme, Level level) {
  const int n = dimension(scheme);
  Operator rho = Operator::Zero(n, n);
  const int i = basis_index(scheme, level);
  rho(i, i) = 1.0;
  return rho;
}

const SimResult& baseline_run() {
  static const SimResult result = [] {
    const auto p = testing::baseline();
    const auto pulse = PulseShape::linear(0.01, 1000.0);
    return evolve(p, LevelScheme::FourLevel, pulse, default_config(p, LevelScheme::FourLevel, pulse));
  }();
  return result;
}

}  // namespace

TEST_CASE("pure decay matches the exponential") {
  const auto scheme = LevelScheme::ThreeLevel;
  const int e = basis_index(scheme, Level::E0);
  const int g0 = basis_index(scheme, Level::G0);
  MasterEquation eq;
  eq.scheme = scheme;
  const int n = dimension(scheme);
  eq.hamiltonian = [n](double) { return Operator(Operator::Zero(n, n)); };
  LindbladTerm term{Channel::O, 0.5, e, g0, Operator::Zero(n, n)};
  term.op(g0, e) = 1.0;
  eq.terms.push_back(term);
  eq.manifold = {Level::E0};

  IntegratorConfig cfg;
  cfg.stop = FixedTime{1.0};
  const auto r = evolve_master(eq, pure(scheme, Level::E0), cfg);
  CHECK(r.times.back() == doctest::Approx(1.0));
  CHECK(r.rho.back()(e, e).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(r.emission(Channel::O) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
  CHECK(r.emission(Channel::Ex) == 0.0);

  cfg.stop = PopulationThreshold{1e-3, 50.0};
  const auto r2 = evolve_master(eq, pure(scheme, Level::E0), cfg);
  CHECK(r2.reached_threshold);
  // stops on the first accepted step below the threshold
  const std::size_t last = r2.times.size() - 1;
  CHECK(r2.rho[last](e, e).real() < 1e-3);
  CHECK(r2.rho[last - 1](e, e).real() >= 1e-3);
  CHECK(r2.times.back() > std::log(1e3));

  cfg.stop = PopulationThreshold{1e-3, std::nullopt};
  CHECK_THROWS_AS(evolve_master(eq, pure(scheme, Level::E0), cfg), ArgumentError);
}

TEST_CASE("baseline four-level emission") {
  const auto& r = baseline_run();
  CHECK(r.reached_threshold);
  CHECK(r.emission(Channel::Ex) == doctest::Approx(0.9649).epsilon(0.005));
  // probability accounting: every excitation leaves through some channel
  double out = 0.0;
  for (const auto& ch : r.channels)
    if (ch.channel != Channel::U) out += ch.cumulative.back();
  CHECK(out + r.residual_manifold() == doctest::Approx(1.0).epsilon(1e-6));

  double worst_trace = 0.0, worst_eig = 0.0, worst_herm = 0.0;
  for (const auto& rho : r.rho) {
    const auto d = diagnose(rho);
    worst_trace = std::max(worst_trace, std::abs(d.trace.real() - 1.0));
    worst_eig = std::min(worst_eig, d.min_eigenvalue);
    worst_herm = std::max(worst_herm, d.hermiticity_error);
  }
  CHECK(worst_trace < 1e-7);
  CHECK(worst_eig > -1e-7);
  CHECK(worst_herm < 1e-10);
}

TEST_CASE("flux integral equals the cumulative emission") {
  const auto& r = baseline_run();
  const auto flux = photon_flux(r);
  REQUIRE(flux.times.size() == r.times.size());
  CHECK(integrate_flux(flux) == doctest::Approx(r.emission(Channel::Ex)).epsilon(1e-6));
  for (double f : flux.flux) CHECK(f >= -1e-12);
}

TEST_CASE("suppressing u jumps leaves the single-excitation part") {
  const auto p = testing::baseline();
  const auto pulse = PulseShape::linear(0.01, 1000.0);
  const auto r = evolve(p, LevelScheme::FourLevel, pulse, default_config(p, LevelScheme::FourLevel, pulse),
                        {Channel::U});
  CHECK(r.emission(Channel::Ex) == doctest::Approx(0.9355).epsilon(0.005));
  CHECK(r.emission(Channel::Ex) < baseline_run().emission(Channel::Ex));
  // trace now tracks the no-re-excitation weight
  CHECK(r.rho.back().trace().real() == doctest::Approx(1.0 - r.emission(Channel::U)).epsilon(1e-6));
  CHECK_THROWS_AS(evolve(p, LevelScheme::FourLevel, pulse, default_config(p, LevelScheme::FourLevel, pulse),
                         {Channel::E}),
                  ArgumentError);
}

TEST_CASE("external and internal loss swap symmetrically") {
  auto p = testing::baseline();
  p.omega2 = 0.0;
  p.kappa_ex = 0.2;
  p.kappa_in = 0.05;
  const auto pulse = PulseShape::linear(0.05, 200.0);
  IntegratorConfig cfg;
  cfg.stop = FixedTime{200.0};
  const auto a = evolve(p, LevelScheme::ThreeLevel, pulse, cfg);
  std::swap(p.kappa_ex, p.kappa_in);
  const auto b = evolve(p, LevelScheme::ThreeLevel, pulse, cfg);
  CHECK(a.emission(Channel::Ex) == doctest::Approx(b.emission(Channel::In)).epsilon(1e-7));
  CHECK(a.emission(Channel::In) == doctest::Approx(b.emission(Channel::Ex)).epsilon(1e-7));
  CHECK(a.emission(Channel::Ex) / a.emission(Channel::In) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("tolerance halving converges") {
  const auto p = testing::baseline();
  const auto pulse = PulseShape::linear(0.02, 60.0);
  IntegratorConfig cfg;
  cfg.stop = FixedTime{60.0};
  cfg.rtol = 1e-6;
  cfg.atol = 1e-8;
  const double coarse = evolve(p, LevelScheme::FourLevel, pulse, cfg).emission(Channel::Ex);
  cfg.rtol /= 2.0;
  cfg.atol /= 2.0;
  const double fine = evolve(p, LevelScheme::FourLevel, pulse, cfg).emission(Channel::Ex);
  CHECK(std::abs(coarse - fine) < 1e-5);
}

TEST_CASE("integrator rejects bad settings") {
  const auto p = testing::baseline();
  const auto pulse = PulseShape::linear(0.01, 100.0);
  IntegratorConfig cfg;
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(evolve(p, LevelScheme::FourLevel, pulse, cfg), ArgumentError);
  cfg = {};
  cfg.stop = FixedTime{-1.0};
  CHECK_THROWS_AS(evolve(p, LevelScheme::FourLevel, pulse, cfg), ArgumentError);
  cfg = {};
  cfg.stop = PopulationThreshold{};  // no cap: evolve fills in the default one
  CHECK(evolve(p, LevelScheme::FourLevel, pulse, cfg).reached_threshold);
  cfg = {};
  cfg.rtol = 1e-300;
  cfg.atol = 1e-300;
  cfg.stop = FixedTime{10.0};
  CHECK_THROWS_AS(evolve(p, LevelScheme::FourLevel, pulse, cfg), IntegrationError);

  auto bad = p;
  bad.kappa_in = -1.0;
  CHECK_THROWS_AS(evolve(bad, LevelScheme::FourLevel, pulse, default_config(p, LevelScheme::FourLevel, pulse)),
                  ParameterError);
}

TEST_CASE("population threshold cap follows the emission estimate") {
  const auto p = testing::baseline();
  const auto pulse = PulseShape::linear(0.01, 1000.0);
  const auto cfg = default_config(p, LevelScheme::FourLevel, pulse);
  const auto* thr = std::get_if<PopulationThreshold>(&cfg.stop);
  REQUIRE(thr);
  REQUIRE(thr->t_cap);
  // P_si(u) saturates as 1 - exp(-lambda u) with lambda = 0.609448156; u = t^3 omega0^2 / 3
  const double u99 = std::log(100.0) / 0.609448156;
  CHECK(*thr->t_cap == doctest::Approx(10.0 * std::cbrt(3.0 * u99 / 1e-4)).epsilon(1e-8));
}
