#pragma once

// Numerical photon record: wavepackets psi_s(t) sampled on a grid, the
// jump-rate weights r(s), the mixed temporal-mode state built from them, and
// its purity and fidelity.
//
// Grids are uniform in the pulse area u = H(t). Time samples sit at the
// midpoints of the u cells and carry weight du / |Omega(t)|^2, so that
// sum_i f(t_i) w_i approximates int f dt. Jump times sit on the u nodes.

#include <optional>
#include <string>
#include <vector>

#include "photon_src/effective.hpp"
#include "photon_src/qmodel.hpp"

namespace photon_src::photonics {

struct RecordGrids {
  std::vector<double> u_nodes;  // pulse area at the cell edges, u_nodes[0] = 0
  std::vector<double> s;        // time at each u node (jump times)
  std::vector<double> t;        // time at each cell midpoint
  std::vector<double> w;        // quadrature weight of each t sample

  std::size_t cells() const { return t.size(); }

  /// Throws ArgumentError unless the nodes start at 0 and ascend strictly.
  static RecordGrids from_area_nodes(const PulseShape& pulse, std::vector<double> u_nodes);
};

struct RecordOptions {
  std::size_t cells = 400;        // must be even (the coarse check drops every other node)
  double tail = 1e-12;            // |u,0> population left at the end of the grid
  double tolerance = 1e-3;        // fine/coarse disagreement that triggers a warning
  unsigned threads = 1;
};

/// Area grid reaching u_max = -ln(tail) / mu, with mu the depletion rate of |u,0>.
RecordGrids default_grids(const EffectiveModel& model, const RecordOptions& options = {});

/// psi_s(t_i) = ex_amplitude * Omega(t_i) * <u,0|Phi_s(t_i)>; zero for t_i < s.
/// Throws ArgumentError for an empty or non-ascending grid or s beyond its end.
std::vector<Complex> wavepacket(const EffectiveModel& model, double s, const std::vector<double>& t_grid);
std::vector<Complex> wavepacket(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s,
                                const std::vector<double>& t_grid);

/// Three-level wavepacket from its explicit exponential form.
std::vector<Complex> wavepacket_three_level_closed_form(const SystemParams& params, const PulseShape& pulse,
                                                        double s, const std::vector<double>& t_grid);

/// Weighted grid inner product sum_i conj(a_i) b_i w_i.
Complex inner_product(const std::vector<Complex>& a, const std::vector<Complex>& b, const std::vector<double>& w);

struct PhotonRecord {
  RecordGrids grids;
  Eigen::MatrixXcd psi;            // psi(j, i) = psi_{s_j}(t_i); row 0 is the no-jump packet
  std::vector<double> rate;        // r(s_j)
  std::vector<double> jump_mass;   // r(s_j) ds_j (trapezoid in u)
  double p_si = 0.0;
  double p_re = 0.0;
  double p_total = 0.0;
  double residual = 0.0;           // max |fine - coarse| over p_si, p_re
  std::optional<std::string> warning;
};

/// P_si and P_re are Richardson-extrapolated from the fine grid and a grid with
/// every other node. Throws ParameterError when gamma_e > 0.
PhotonRecord build_record(const EffectiveModel& model, const RecordOptions& options = {});
PhotonRecord build_record(const EffectiveModel& model, const RecordGrids& grids, const RecordOptions& options = {});

struct TemporalModeState {
  std::vector<double> t;
  std::vector<double> w;
  Eigen::MatrixXcd kernel;  // rho_S(t_i, t_l), weighted trace 1
  std::vector<Complex> ideal;  // psi_0 normalized on the grid
  double p_total = 0.0;
  double vacuum = 0.0;      // 1 - P_total

  double weighted_trace() const;
  double min_weighted_eigenvalue() const;
  double hermiticity_error() const;
};

/// Throws ArgumentError when the record carries no photon.
TemporalModeState temporal_state(const PhotonRecord& record);

struct PurityFidelity {
  double d_s;
  double f_s;
};

PurityFidelity purity_fidelity_numeric(const TemporalModeState& state);

/// int_0^t |psi_0|^2 by Gauss-Legendre quadrature on `intervals` equal time steps.
double p_si_numeric(const EffectiveModel& model, double t, int intervals = 64);

/// Bisection for the time at which p_si_numeric reaches fraction * p_si_limit.
/// Throws NotReachedError if it never does.
double emission_time_numeric(const EffectiveModel& model, double p_si_limit, double fraction = 0.99);

}  // namespace photon_src::photonics
