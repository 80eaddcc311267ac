#pragma once

// Adaptive Dormand-Prince integration of the Lindblad master equation, with
// cumulative per-channel emission bookkeeping and optional suppression of the
// feeding (recycling) term of selected jump channels.

#include <functional>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "photon_src/qmodel.hpp"

namespace photon_src {

struct FixedTime {
  double t_final;
};

/// Stop once the generation-manifold population drops below epsilon, or at t_cap.
struct PopulationThreshold {
  double epsilon = 1e-6;
  std::optional<double> t_cap;  // default: 10 x the closed-form emission time estimate
};

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 1e-3;
  double dt_max = 0.5;
  std::variant<FixedTime, PopulationThreshold> stop = PopulationThreshold{};

  void validate() const;
};

/// A master equation in generic form: time-dependent Hamiltonian plus jump terms.
struct MasterEquation {
  LevelScheme scheme;
  std::function<Operator(double)> hamiltonian;
  std::vector<LindbladTerm> terms;
  std::set<Channel> suppressed;  // jump (feeding) term dropped, anticommutator kept
  std::vector<Level> manifold;   // levels summed for PopulationThreshold
};

struct ChannelRecord {
  Channel channel;
  double rate;
  int source;
  std::vector<double> cumulative;  // E_c(t) at each snapshot
};

struct SimResult {
  LevelScheme scheme;
  std::vector<double> times;
  std::vector<Operator> rho;
  /// d(rho_xx)/dt at each snapshot, one row per snapshot.
  Eigen::MatrixXd population_rates;
  std::vector<ChannelRecord> channels;
  bool reached_threshold = false;
  std::size_t rejected_steps = 0;

  std::vector<double> population(Level level) const;
  /// Population left in the generation manifold at the last snapshot.
  double residual_manifold() const;
  /// E_c at the final snapshot; zero if the channel is absent.
  double emission(Channel channel) const;
  const ChannelRecord* find(Channel channel) const;
};

/// Generic entry point; rho0 is the initial density matrix.
SimResult evolve_master(const MasterEquation& eq, const Operator& rho0, const IntegratorConfig& config);

/// Full atom-cavity evolution from |u,0>. Channels in `suppressed` keep their
/// decay but never repopulate their target, so with {U} the trace tracks the
/// no-re-excitation weight and E_ex(t) is the single-excitation photon probability.
SimResult evolve(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse,
                 const IntegratorConfig& config = {}, const std::set<Channel>& suppressed = {});

/// IntegratorConfig with the threshold cap set to 10 x the emission time estimate.
IntegratorConfig default_config(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse);

struct FluxSeries {
  std::vector<double> times;
  std::vector<double> flux;   // 2 kappa_ex rho_{g1,g1}
  std::vector<double> slope;  // d flux / dt
};

FluxSeries photon_flux(const SimResult& result);

/// Trapezoid with Hermite end corrections (fourth order on the snapshot grid).
double integrate_flux(const FluxSeries& flux);

}  // namespace photon_src
