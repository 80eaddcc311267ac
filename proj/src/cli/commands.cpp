#include "photon_src/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "photon_src/cli/csv.hpp"
#include "photon_src/parallel.hpp"

namespace photon_src::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void warn(const std::string& what) { std::cerr << "warning: " << what << '\n'; }

std::filesystem::path prepare_out(const CommandOptions& options) {
  if (options.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  std::filesystem::create_directories(options.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + options.out.string() + "': " + ec.message());
  return options.out;
}

double optional_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

template <class F>
double or_nan_if_unreached(F f) {
  try {
    return f();
  } catch (const NotReachedError&) {
    return kNaN;
  }
}

struct Extras {
  SimResult* lindblad = nullptr;
  photonics::PhotonRecord* record = nullptr;
};

SweepRow compute(const RunConfig& config, bool numeric, unsigned threads, Extras extras = {}) {
  const SystemParams params = config.system();
  const PulseShape pulse = config.pulse();
  const double fraction = config.emission_fraction;

  SweepRow row{kNaN, closedform::summarize(params, config.scheme, pulse), std::nullopt};
  row.closed.t_em =
      or_nan_if_unreached([&] { return closedform::emission_time(params, config.scheme, pulse, fraction); });
  if (std::isnan(*row.closed.t_em)) row.closed.t_em.reset();
  if (!numeric) return row;

  NumericColumns n{};
  const EffectiveModel model(params, config.scheme, pulse);
  n.drive_diagnostic = model.drive_diagnostic();

  if (params.gamma_e > 0.0) {
    warn("gamma_e > 0: record columns left empty");
    n.p_si_record = n.p_re_record = n.p_total_record = n.r_re_record = kNaN;
    n.d_s_record = n.f_s_record = n.t_em_record = n.record_residual = kNaN;
  } else {
    photonics::PhotonRecord rec = photonics::build_record(model, config.record_options(threads));
    if (rec.warning) warn(*rec.warning);
    const auto pf = photonics::purity_fidelity_numeric(photonics::temporal_state(rec));
    n.p_si_record = rec.p_si;
    n.p_re_record = rec.p_re;
    n.p_total_record = rec.p_total;
    n.r_re_record = 1.0 - rec.p_si / rec.p_total;
    n.d_s_record = pf.d_s;
    n.f_s_record = pf.f_s;
    n.record_residual = rec.residual;
    n.t_em_record = or_nan_if_unreached([&] { return photonics::emission_time_numeric(model, rec.p_si, fraction); });
    if (extras.record) *extras.record = std::move(rec);
  }

  SimResult full = evolve(params, config.scheme, pulse, config.integrator());
  if (!full.reached_threshold)
    warn(fmt::format("master equation hit its time cap with {:.3g} left in the manifold", full.residual_manifold()));
  n.p_total_lindblad = full.emission(Channel::Ex);
  n.p_si_lindblad = n.p_total_lindblad;
  if (params.gamma_u > 0.0)
    n.p_si_lindblad = evolve(params, config.scheme, pulse, config.integrator(), {Channel::U}).emission(Channel::Ex);
  n.p_re_lindblad = n.p_total_lindblad - n.p_si_lindblad;
  if (extras.lindblad) *extras.lindblad = std::move(full);

  row.numeric = n;
  return row;
}

std::size_t point_count(const CommandOptions& options, std::size_t fallback) {
  if (options.points && *options.points == 0) throw ConfigError("--points must be positive");
  return options.points.value_or(fallback);
}

}  // namespace

unsigned thread_limit() {
  const char* env = std::getenv("PHOTON_SRC_THREADS");
  if (env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("PHOTON_SRC_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepRow compute_row(const RunConfig& config, bool numeric, unsigned threads) {
  return compute(config, numeric, threads);
}

std::vector<std::string> row_header(bool numeric) {
  std::vector<std::string> h = {"p_si", "p_re", "p_total", "r_re", "d_s", "f_s", "lambda_si", "lambda_si_bound", "t_em"};
  if (!numeric) return h;
  const std::vector<std::string> extra = {
      "p_si_record",      "p_re_record",        "p_total_record",       "r_re_record",
      "d_s_record",       "f_s_record",         "t_em_record",          "record_residual",
      "p_si_lindblad",    "p_re_lindblad",      "p_total_lindblad",     "drive_diagnostic",
      "dev_p_si_record",  "dev_p_re_record",    "dev_p_total_record",   "dev_r_re_record",
      "dev_d_s_record",   "dev_f_s_record",     "dev_t_em_record",      "dev_p_si_lindblad",
      "dev_p_re_lindblad", "dev_p_total_lindblad"};
  h.insert(h.end(), extra.begin(), extra.end());
  return h;
}

std::vector<double> row_values(const SweepRow& row, bool numeric) {
  const auto& c = row.closed;
  const double p_re = c.p_total - c.p_si;
  const double t_em = optional_or_nan(c.t_em);
  std::vector<double> v = {c.p_si, p_re, c.p_total, c.r_re, c.d_s, c.f_s, c.lambda_si, c.lambda_si_bound, t_em};
  if (!numeric) return v;
  if (!row.numeric) throw std::logic_error("row has no numeric columns");
  const auto& n = *row.numeric;
  const std::vector<double> extra = {
      n.p_si_record, n.p_re_record, n.p_total_record, n.r_re_record, n.d_s_record, n.f_s_record,
      n.t_em_record, n.record_residual, n.p_si_lindblad, n.p_re_lindblad, n.p_total_lindblad, n.drive_diagnostic,
      std::abs(n.p_si_record - c.p_si), std::abs(n.p_re_record - p_re), std::abs(n.p_total_record - c.p_total),
      std::abs(n.r_re_record - c.r_re), std::abs(n.d_s_record - c.d_s), std::abs(n.f_s_record - c.f_s),
      std::abs(n.t_em_record - t_em), std::abs(n.p_si_lindblad - c.p_si), std::abs(n.p_re_lindblad - p_re),
      std::abs(n.p_total_lindblad - c.p_total)};
  v.insert(v.end(), extra.begin(), extra.end());
  return v;
}

double lindblad_emission_time(const SimResult& result, double fraction) {
  const ChannelRecord* ex = result.find(Channel::Ex);
  if (!ex || ex->cumulative.empty()) return kNaN;
  const double goal = fraction * ex->cumulative.back();
  if (!(goal > 0.0)) return kNaN;
  for (std::size_t i = 1; i < ex->cumulative.size(); ++i) {
    const double a = ex->cumulative[i - 1];
    const double b = ex->cumulative[i];
    if (b >= goal) {
      const double f = b > a ? (goal - a) / (b - a) : 1.0;
      return result.times[i - 1] + f * (result.times[i] - result.times[i - 1]);
    }
  }
  return kNaN;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const RunConfig& config, const CommandOptions& options) {
  const auto dir = prepare_out(options);
  SimResult lindblad;
  photonics::PhotonRecord record;
  const SweepRow row = compute(config, true, options.threads, {&lindblad, &record});

  std::vector<std::string> header = {"t"};
  const auto levels = basis_levels(config.scheme);
  for (Level l : levels) header.push_back("rho_" + std::string(level_name(l)));
  header.push_back("flux");
  CsvWriter pops(dir / "populations.csv", header);
  const FluxSeries flux = photon_flux(lindblad);
  for (std::size_t i = 0; i < lindblad.times.size(); ++i) {
    std::vector<double> values = {lindblad.times[i]};
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto idx = static_cast<Eigen::Index>(k);
      values.push_back(lindblad.rho[i](idx, idx).real());
    }
    values.push_back(flux.flux[i]);
    pops.row(values);
  }

  CsvWriter rec(dir / "record.csv", {"t", "re_psi0", "im_psi0", "weight"});
  for (std::size_t i = 0; i < record.grids.cells(); ++i) {
    const Complex psi = record.psi.rows() ? record.psi(0, static_cast<Eigen::Index>(i)) : Complex();
    rec.row({record.grids.t[i], psi.real(), psi.imag(), record.grids.w[i]});
  }

  CsvWriter summary(dir / "summary.csv", row_header(true));
  summary.row(row_values(row, true));
}

void cmd_sweep(const RunConfig& config, const CommandOptions& options) {
  if (!config.sweep) throw ConfigError("sweep needs 'sweep_param' in the config");
  const SweepSpec& spec = *config.sweep;
  std::vector<double> values = spec.values;
  if (options.points) {
    if (!spec.lo) throw ConfigError("--points needs a sweep given by sweep_min/sweep_max");
    values = spaced_values(*spec.lo, *spec.hi, point_count(options, values.size()), spec.log);
  }
  const auto dir = prepare_out(options);

  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), options.threads, [&](std::size_t k) {
    RunConfig point = config;
    point.set_parameter(spec.param, values[k]);
    rows[k] = compute(point, options.numeric, 1);
    rows[k].value = values[k];
  });

  std::vector<std::string> header = {spec.param};
  const auto rest = row_header(options.numeric);
  header.insert(header.end(), rest.begin(), rest.end());
  CsvWriter out(dir / "sweep.csv", header);
  for (const auto& row : rows) {
    std::vector<double> v = {row.value};
    const auto rest_values = row_values(row, options.numeric);
    v.insert(v.end(), rest_values.begin(), rest_values.end());
    out.row(v);
  }
}

void cmd_fig2(const RunConfig& config, const CommandOptions& options) {
  if (config.pulse_kind != PulseShape::Kind::Linear) throw ConfigError("fig2 needs pulse=linear");
  if (config.scheme != LevelScheme::FourLevel) throw ConfigError("fig2 needs scheme=four");
  const auto omega2 =
      spaced_values(config.fig2_omega2_min, config.fig2_omega2_max, point_count(options, config.fig2_points), false);
  const auto& omega0 = config.fig2_omega0;
  const auto dir = prepare_out(options);

  struct Point {
    double p_re, p_re_num, p_total, p_total_num, t_em, t_em_lindblad;
  };
  std::vector<Point> points(omega0.size() * omega2.size());
  parallel_for(points.size(), options.threads, [&](std::size_t k) {
    RunConfig cfg = config;
    cfg.omega0 = omega0[k / omega2.size()];
    cfg.params.omega2 = omega2[k % omega2.size()];
    const SystemParams params = cfg.system();
    const PulseShape pulse = cfg.pulse();
    const auto cf = closedform::p_si_total_rre(params, cfg.scheme);

    const SimResult full = evolve(params, cfg.scheme, pulse, cfg.integrator());
    const SimResult single = evolve(params, cfg.scheme, pulse, cfg.integrator(), {Channel::U});
    if (!full.reached_threshold)
      warn(fmt::format("omega0={:.3g} omega2={:.4g}: master equation hit its time cap with {:.3g} left in the manifold",
                       cfg.omega0, params.omega2, full.residual_manifold()));
    const double total = full.emission(Channel::Ex);
    points[k] = {cf.p_total - cf.p_si,
                 total - single.emission(Channel::Ex),
                 cf.p_total,
                 total,
                 or_nan_if_unreached(
                     [&] { return closedform::emission_time(params, cfg.scheme, pulse, cfg.emission_fraction); }),
                 lindblad_emission_time(single, cfg.emission_fraction)};
  });

  CsvWriter a(dir / "fig2a.csv", {"omega0", "omega2", "p_re_analytic", "p_re_numeric"});
  CsvWriter b(dir / "fig2b.csv", {"omega0", "omega2", "p_total_analytic", "p_total_numeric"});
  CsvWriter c(dir / "fig2c.csv", {"omega0", "omega2", "t_em", "t_em_lindblad"});
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double o0 = omega0[k / omega2.size()];
    const double o2 = omega2[k % omega2.size()];
    const Point& p = points[k];
    a.row({o0, o2, p.p_re, p.p_re_num});
    b.row({o0, o2, p.p_total, p.p_total_num});
    c.row({o0, o2, p.t_em, p.t_em_lindblad});
  }

  // three-level reference lines
  const SystemParams params = config.system();
  SystemParams three = params;
  three.omega2 = three.delta_e2 = three.gamma_o2 = three.gamma_e = 0.0;
  const auto ref = closedform::p_si_total_rre(three, LevelScheme::ThreeLevel);
  const PulseShape pulse3 = PulseShape::linear(config.fig2_three_level_omega0, config.pulse().t_end());
  const double t_em3 = or_nan_if_unreached(
      [&] { return closedform::emission_time(three, LevelScheme::ThreeLevel, pulse3, config.emission_fraction); });
  CsvWriter meta(dir / "fig2_meta.csv", {"kappa_ex", "omega0_three_level", "p_si_three_level",
                                         "p_total_three_level", "r_re_three_level", "p_re_three_level",
                                         "t_em_three_level"});
  meta.row({params.kappa_ex, config.fig2_three_level_omega0, ref.p_si, ref.p_total, ref.r_re,
            ref.p_total - ref.p_si, t_em3});
  std::cout << "kappa_ex = " << format_number(params.kappa_ex) << '\n';
}

void cmd_figc(const RunConfig& config, const CommandOptions& options) {
  const std::size_t n = point_count(options, config.figc_points);
  const auto g = spaced_values(config.figc_g_min, config.figc_g_max, n, true);
  const auto omega2 = spaced_values(config.figc_omega2_min, config.figc_omega2_max, n, true);
  const auto dir = prepare_out(options);

  CsvWriter map(dir / "ratio_map.csv", {"g_over_gamma", "omega2_over_gamma", "ratio", "r_re", "r_re_three_level"});
  for (double gg : g) {
    for (double oo : omega2) {
      const auto p = closedform::ratio_map(gg, oo, config.figc_slice);
      map.row({gg, oo, p.ratio, p.r_re, p.r_re3});
    }
  }
  CsvWriter contour(dir / "ratio_contour.csv", {"g_over_gamma", "omega2_over_gamma"});
  for (double gg : g) contour.row({gg, closedform::ratio_contour_omega2(gg, config.figc_slice)});
}

int run(const std::string& command, const std::filesystem::path& config_path, CommandOptions options) {
  try {
    options.threads = std::min(options.threads == 0 ? thread_limit() : options.threads, thread_limit());
    const RunConfig config = load_config(config_path);
    if (command == "simulate") cmd_simulate(config, options);
    else if (command == "sweep") cmd_sweep(config, options);
    else if (command == "fig2") cmd_fig2(config, options);
    else if (command == "figC") cmd_figc(config, options);
    else throw ConfigError("unknown command '" + command + "'");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {  // ParameterError, ArgumentError
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace photon_src::cli
