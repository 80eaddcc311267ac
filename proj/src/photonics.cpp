#include "photon_src/photonics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "photon_src/errors.hpp"
#include "photon_src/parallel.hpp"

namespace photon_src::photonics {

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ArgumentError("time grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("time grid must be strictly ascending");
}

// An |e2> -> |e> jump keeps the atom in the excited manifold; the photon it
// leads to is not any psi_s, so the record would be incomplete.
void check_model(const EffectiveModel& model) {
  if (model.params().gamma_e > 0.0) throw ParameterError("the photon record does not cover gamma_e > 0");
}

double jump_rate_per_area(const EffectiveModel& model) { return 2.0 * model.prefactors().gamma_u; }
double depletion_per_area(const EffectiveModel& model) { return 2.0 * model.prefactors().u_depletion(); }

struct Quadrature {
  double p_si;
  double p_re;
  Eigen::MatrixXcd psi;
  std::vector<double> rate;
  std::vector<double> mass;
};

Quadrature integrate(const EffectiveModel& model, const RecordGrids& grids, unsigned threads) {
  const std::size_t nodes = grids.s.size();
  const std::size_t cells = grids.cells();
  Quadrature q{0.0, 0.0, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(cells)),
               std::vector<double>(nodes), std::vector<double>(nodes)};

  parallel_for(nodes, threads, [&](std::size_t j) {
    if (j + 1 == nodes) return;  // no samples after the last node
    const auto packet = wavepacket(model, grids.s[j], grids.t);
    for (std::size_t i = 0; i < cells; ++i)
      q.psi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = packet[i];
  });

  const double jump = jump_rate_per_area(model);
  const double mu = depletion_per_area(model);
  std::vector<double> norms(nodes, 0.0);
  for (std::size_t j = 0; j < nodes; ++j) {
    for (std::size_t i = 0; i < cells; ++i)
      norms[j] += std::norm(q.psi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) * grids.w[i];
    const double left = j > 0 ? grids.u_nodes[j] - grids.u_nodes[j - 1] : 0.0;
    const double right = j + 1 < nodes ? grids.u_nodes[j + 1] - grids.u_nodes[j] : 0.0;
    const double decay = std::exp(-mu * grids.u_nodes[j]);
    q.rate[j] = jump * std::norm(model.pulse().amplitude(grids.s[j])) * decay;
    q.mass[j] = 0.5 * (left + right) * jump * decay;
  }
  q.p_si = norms[0];
  for (std::size_t j = 0; j < nodes; ++j) q.p_re += q.mass[j] * norms[j];
  return q;
}

// Gauss-Legendre nodes on [-1, 1].
constexpr std::array<double, 8> kNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                          -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                          0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                            0.2223810344533745, 0.1012285362903763};

}  // namespace

RecordGrids RecordGrids::from_area_nodes(const PulseShape& pulse, std::vector<double> u_nodes) {
  if (u_nodes.size() < 2 || u_nodes.front() != 0.0) throw ArgumentError("area grid must start at 0 with >= 2 nodes");
  for (std::size_t k = 1; k < u_nodes.size(); ++k)
    if (!(u_nodes[k] > u_nodes[k - 1])) throw ArgumentError("area grid must be strictly ascending");

  RecordGrids g;
  g.s.reserve(u_nodes.size());
  for (double u : u_nodes) g.s.push_back(pulse.time_at_cumulative(u));
  for (std::size_t k = 0; k + 1 < u_nodes.size(); ++k) {
    const double du = u_nodes[k + 1] - u_nodes[k];
    const double t = pulse.time_at_cumulative(u_nodes[k] + 0.5 * du);
    const double intensity = std::norm(pulse.amplitude(t));
    g.t.push_back(t);
    // where the drive vanishes the integrand does too; any finite weight will do
    g.w.push_back(intensity > 0.0 ? du / intensity : g.s[k + 1] - g.s[k]);
  }
  g.u_nodes = std::move(u_nodes);
  return g;
}

RecordGrids default_grids(const EffectiveModel& model, const RecordOptions& options) {
  check_model(model);
  if (options.cells < 2) throw ArgumentError("record grid needs at least 2 cells");
  if (!(options.tail > 0.0 && options.tail < 1.0)) throw ArgumentError("tail must lie in (0, 1)");
  const double mu = depletion_per_area(model);
  if (!(mu > 0.0)) throw ArgumentError("|u,0> never depletes; the record has no finite extent");

  const PulseShape& pulse = model.pulse();
  double u_max = -std::log(options.tail) / mu;
  if (std::norm(pulse.amplitude(pulse.t_end())) == 0.0)
    u_max = std::min(u_max, pulse.cumulative(pulse.t_end()));
  if (!(u_max > 0.0)) throw ArgumentError("pulse delivers no area");

  std::vector<double> nodes(options.cells + 1);
  for (std::size_t k = 0; k <= options.cells; ++k)
    nodes[k] = u_max * static_cast<double>(k) / static_cast<double>(options.cells);
  return RecordGrids::from_area_nodes(pulse, std::move(nodes));
}

std::vector<Complex> wavepacket(const EffectiveModel& model, double s, const std::vector<double>& t_grid) {
  check_grid(t_grid);
  if (s < 0.0 || s > t_grid.back()) throw ArgumentError("jump time lies outside the time grid");
  const NoJumpEvolution ev = effective_evolve(model, t_grid, s);
  std::vector<Complex> out(t_grid.size(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] >= s) out[i] = model.ex_amplitude() * model.pulse().amplitude(t_grid[i]) * ev.amplitude[i];
  return out;
}

std::vector<Complex> wavepacket(const SystemParams& params, LevelScheme scheme, const PulseShape& pulse, double s,
                                const std::vector<double>& t_grid) {
  return wavepacket(EffectiveModel(params, scheme, pulse), s, t_grid);
}

std::vector<Complex> wavepacket_three_level_closed_form(const SystemParams& params, const PulseShape& pulse,
                                                        double s, const std::vector<double>& t_grid) {
  params.validate(LevelScheme::ThreeLevel);
  check_grid(t_grid);
  if (s < 0.0 || s > t_grid.back()) throw ArgumentError("jump time lies outside the time grid");
  const double kappa = params.kappa();
  const Complex den = params.g * params.g + kappa * Complex(params.gamma(), params.delta_e);
  const double h_s = pulse.cumulative(s);
  std::vector<Complex> out(t_grid.size(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < s) continue;
    const double h = pulse.cumulative(t_grid[i]) - h_s;
    out[i] = std::sqrt(2.0 * params.kappa_ex) * params.g * pulse.amplitude(t_grid[i]) / den * std::exp(-kappa * h / den);
  }
  return out;
}

Complex inner_product(const std::vector<Complex>& a, const std::vector<Complex>& b, const std::vector<double>& w) {
  if (a.size() != b.size() || a.size() != w.size()) throw ArgumentError("inner product needs equal-length samples");
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i] * w[i];
  return sum;
}

PhotonRecord build_record(const EffectiveModel& model, const RecordOptions& options) {
  return build_record(model, default_grids(model, options), options);
}

PhotonRecord build_record(const EffectiveModel& model, const RecordGrids& grids, const RecordOptions& options) {
  check_model(model);
  Quadrature fine = integrate(model, grids, options.threads);

  PhotonRecord rec;
  rec.grids = grids;
  rec.psi = std::move(fine.psi);
  rec.rate = std::move(fine.rate);
  rec.jump_mass = std::move(fine.mass);
  rec.p_si = fine.p_si;
  rec.p_re = fine.p_re;

  if (grids.cells() % 2 == 0) {
    std::vector<double> coarse_nodes;
    for (std::size_t k = 0; k < grids.u_nodes.size(); k += 2) coarse_nodes.push_back(grids.u_nodes[k]);
    const Quadrature coarse =
        integrate(model, RecordGrids::from_area_nodes(model.pulse(), std::move(coarse_nodes)), options.threads);
    rec.residual = std::max(std::abs(fine.p_si - coarse.p_si), std::abs(fine.p_re - coarse.p_re));
    rec.p_si += (fine.p_si - coarse.p_si) / 3.0;
    rec.p_re += (fine.p_re - coarse.p_re) / 3.0;
    if (rec.residual > options.tolerance)
      rec.warning = "quadrature residual " + std::to_string(rec.residual) + " exceeds tolerance";
  } else {
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    rec.warning = "odd cell count; no coarse-grid check";
  }
  rec.p_total = rec.p_si + rec.p_re;
  return rec;
}

double TemporalModeState::weighted_trace() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() * w[i];
  return sum;
}

double TemporalModeState::min_weighted_eigenvalue() const {
  const Eigen::VectorXd root = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())).cwiseSqrt();
  const Eigen::MatrixXcd m = root.asDiagonal() * kernel * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double TemporalModeState::hermiticity_error() const { return (kernel - kernel.adjoint()).cwiseAbs().maxCoeff(); }

TemporalModeState temporal_state(const PhotonRecord& record) {
  const auto nt = static_cast<Eigen::Index>(record.grids.cells());
  const auto ns = static_cast<Eigen::Index>(record.grids.s.size());
  if (!(record.p_total > 0.0) || !std::isfinite(record.p_total)) throw ArgumentError("record carries no photon");

  Eigen::MatrixXcd b(nt, ns + 1);
  b.col(0) = record.psi.row(0).transpose();
  for (Eigen::Index j = 0; j < ns; ++j)
    b.col(j + 1) = std::sqrt(record.jump_mass[static_cast<std::size_t>(j)]) * record.psi.row(j).transpose();

  TemporalModeState st;
  st.t = record.grids.t;
  st.w = record.grids.w;
  st.kernel = b * b.adjoint();
  double norm = 0.0;
  for (Eigen::Index i = 0; i < nt; ++i) norm += st.kernel(i, i).real() * st.w[static_cast<std::size_t>(i)];
  st.kernel /= norm;

  std::vector<Complex> psi0(static_cast<std::size_t>(nt));
  for (Eigen::Index i = 0; i < nt; ++i) psi0[static_cast<std::size_t>(i)] = record.psi(0, i);
  const double n0 = std::sqrt(inner_product(psi0, psi0, st.w).real());
  st.ideal.resize(psi0.size());
  for (std::size_t i = 0; i < psi0.size(); ++i) st.ideal[i] = psi0[i] / n0;

  st.p_total = record.p_total;
  st.vacuum = 1.0 - record.p_total;
  return st;
}

PurityFidelity purity_fidelity_numeric(const TemporalModeState& state) {
  const auto n = static_cast<Eigen::Index>(state.w.size());
  const Eigen::Map<const Eigen::VectorXd> w(state.w.data(), n);
  Eigen::VectorXcd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) phi(i) = state.ideal[static_cast<std::size_t>(i)] * w(i);

  double d_s = 0.0;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index i = 0; i < n; ++i) d_s += w(i) * w(l) * std::norm(state.kernel(i, l));
  const double f_s = (phi.adjoint() * state.kernel * phi)(0, 0).real();
  return {d_s, f_s};
}

double p_si_numeric(const EffectiveModel& model, double t, int intervals) {
  if (t <= 0.0) return 0.0;
  if (intervals < 1) throw ArgumentError("need at least one interval");
  const PulseShape& pulse = model.pulse();

  std::vector<double> edges;
  for (int k = 0; k <= intervals; ++k) edges.push_back(t * k / intervals);
  if (pulse.t_end() < t) edges.push_back(pulse.t_end());
  if (pulse.kind() == PulseShape::Kind::Tabulated)
    for (double x : pulse.times())
      if (x > 0.0 && x < t) edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> nodes;
  std::vector<double> weights;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double half = 0.5 * (edges[k + 1] - edges[k]);
    const double mid = 0.5 * (edges[k + 1] + edges[k]);
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      nodes.push_back(mid + half * kNodes[q]);
      weights.push_back(half * kWeights[q]);
    }
  }
  const auto packet = wavepacket(model, 0.0, nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += std::norm(packet[i]) * weights[i];
  return sum;
}

double emission_time_numeric(const EffectiveModel& model, double p_si_limit, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("emission fraction must lie in (0, 1)");
  const double goal = fraction * p_si_limit;
  if (!(goal > 0.0)) throw NotReachedError("no single-excitation photon to wait for");
  double hi = model.pulse().t_end();
  int doublings = 0;
  const double decay = model.prefactors().no_jump();
  while (p_si_numeric(model, hi) < goal) {
    // once |u,0> is empty nothing more can arrive
    if (++doublings > 40 || decay * model.pulse().cumulative(hi) > 40.0)
      throw NotReachedError("emission threshold never reached");
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p_si_numeric(model, mid) >= goal) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace photon_src::photonics
