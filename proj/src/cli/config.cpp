#include "photon_src/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace photon_src::cli {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::optional<double> to_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

class Entries {
 public:
  void add(const std::string& key, const std::string& value, int line) {
    if (values_.count(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& text(const std::string& key) const { return values_.at(key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto v = to_double(text(key));
    if (!v) throw ConfigError("key '" + key + "': '" + text(key) + "' is not a finite number");
    out = *v;
  }

  void count(const std::string& key, std::size_t& out) const {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    if (v < 1.0 || v != std::floor(v) || v > 1e7) throw ConfigError("key '" + key + "' must be a positive integer");
    out = static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(text(key), ',')) {
      const auto v = to_double(item);
      if (!v) throw ConfigError("key '" + key + "': '" + item + "' is not a finite number");
      out.push_back(*v);
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is empty");
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "scheme",         "g",           "kappa_ex",         "kappa_in",         "gamma_u",
      "gamma_o",        "gamma_o2",    "gamma_e",          "delta_e",          "delta_e2",
      "omega2",         "pulse",       "omega0",           "t_end",            "pulse_file",
      "rtol",           "atol",        "dt_max",           "epsilon",          "record_cells",
      "record_tail",    "emission_fraction",               "sweep_param",      "sweep_min",
      "sweep_max",      "sweep_points", "sweep_scale",     "sweep_values",     "fig2_omega2_min",
      "fig2_omega2_max", "fig2_points", "fig2_omega0",     "fig2_three_level_omega0",
      "figc_g_min",     "figc_g_max",  "figc_omega2_min",  "figc_omega2_max",  "figc_points",
      "figc_kappa_ex_over_gamma",      "figc_kappa_in_over_gamma"};
  return keys;
}

}  // namespace

std::vector<double> spaced_values(double lo, double hi, std::size_t n, bool log) {
  if (log && !(lo > 0.0 && hi > 0.0)) throw ConfigError("log spacing needs positive bounds");
  if (hi < lo) throw ConfigError("range maximum is below its minimum");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  if (n > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

namespace {

double* param_slot(SystemParams& p, const std::string& name) {
  if (name == "g") return &p.g;
  if (name == "kappa_ex") return &p.kappa_ex;
  if (name == "kappa_in") return &p.kappa_in;
  if (name == "gamma_u") return &p.gamma_u;
  if (name == "gamma_o") return &p.gamma_o;
  if (name == "gamma_o2") return &p.gamma_o2;
  if (name == "gamma_e") return &p.gamma_e;
  if (name == "delta_e") return &p.delta_e;
  if (name == "delta_e2") return &p.delta_e2;
  if (name == "omega2") return &p.omega2;
  return nullptr;
}

}  // namespace

SystemParams RunConfig::system() const {
  SystemParams p = params;
  if (kappa_ex_optimal) p.kappa_ex = optimal_kappa_ex(p.g, p.kappa_in, p.gamma());
  return p;
}

PulseShape RunConfig::pulse() const {
  if (pulse_kind == PulseShape::Kind::Linear) return PulseShape::linear(omega0, t_end.value_or(1000.0));
  return PulseShape::tabulated(pulse_times, pulse_values, t_end.value_or(-1.0));
}

IntegratorConfig RunConfig::integrator() const {
  IntegratorConfig c;
  c.rtol = rtol;
  c.atol = atol;
  c.dt_max = dt_max;
  c.stop = PopulationThreshold{epsilon, std::nullopt};
  return c;
}

photonics::RecordOptions RunConfig::record_options(unsigned threads) const {
  photonics::RecordOptions o;
  o.cells = record_cells;
  o.tail = record_tail;
  o.threads = threads;
  return o;
}

void RunConfig::set_parameter(const std::string& name, double value) {
  if (name == "omega0") {
    if (pulse_kind != PulseShape::Kind::Linear) throw ConfigError("omega0 only applies to the linear pulse");
    omega0 = value;
    return;
  }
  if (name == "t_end") {
    t_end = value;
    return;
  }
  double* slot = param_slot(params, name);
  if (!slot) throw ConfigError("unknown sweep parameter '" + name + "'");
  *slot = value;
  if (name == "kappa_ex") kappa_ex_optimal = false;
}

double RunConfig::get_parameter(const std::string& name) const {
  if (name == "omega0") return omega0;
  if (name == "t_end") return pulse().t_end();
  SystemParams p = system();
  if (const double* slot = param_slot(p, name)) return *slot;
  throw ConfigError("unknown sweep parameter '" + name + "'");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  Entries e;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected key=value, got '" + body + "'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(number) + ": key '" + key + "' has no value");
    e.add(key, value, number);
  }

  RunConfig c;
  if (e.has("scheme")) {
    const auto& s = e.text("scheme");
    if (s == "four") c.scheme = LevelScheme::FourLevel;
    else if (s == "three") c.scheme = LevelScheme::ThreeLevel;
    else throw ConfigError("key 'scheme' must be 'four' or 'three'");
  }
  SystemParams& p = c.params;
  if (c.scheme == LevelScheme::ThreeLevel) p.omega2 = 0.0;
  for (const char* key : {"g", "kappa_in", "gamma_u", "gamma_o", "gamma_o2", "gamma_e", "delta_e", "delta_e2", "omega2"})
    e.number(key, *param_slot(p, key));
  if (e.has("kappa_ex")) {
    if (e.text("kappa_ex") == "optimal") {
      c.kappa_ex_optimal = true;
    } else {
      e.number("kappa_ex", p.kappa_ex);
      c.kappa_ex_optimal = false;
    }
  }

  if (e.has("pulse")) {
    const auto& kind = e.text("pulse");
    if (kind == "linear") c.pulse_kind = PulseShape::Kind::Linear;
    else if (kind == "tabulated") c.pulse_kind = PulseShape::Kind::Tabulated;
    else throw ConfigError("key 'pulse' must be 'linear' or 'tabulated'");
  }
  e.number("omega0", c.omega0);
  if (e.has("t_end")) {
    double t = 0.0;
    e.number("t_end", t);
    c.t_end = t;
  }
  if (c.pulse_kind == PulseShape::Kind::Tabulated) {
    if (!e.has("pulse_file")) throw ConfigError("pulse=tabulated needs key 'pulse_file'");
    std::filesystem::path file = e.text("pulse_file");
    if (file.is_relative()) file = base_dir / file;
    load_pulse_table(file, c.pulse_times, c.pulse_values);
  } else if (e.has("pulse_file")) {
    throw ConfigError("key 'pulse_file' needs pulse=tabulated");
  }

  e.number("rtol", c.rtol);
  e.number("atol", c.atol);
  e.number("dt_max", c.dt_max);
  e.number("epsilon", c.epsilon);
  e.count("record_cells", c.record_cells);
  if (c.record_cells % 2 != 0) throw ConfigError("key 'record_cells' must be even");
  e.number("record_tail", c.record_tail);
  e.number("emission_fraction", c.emission_fraction);
  if (!(c.emission_fraction > 0.0 && c.emission_fraction < 1.0))
    throw ConfigError("key 'emission_fraction' must lie in (0, 1)");

  if (e.has("sweep_param")) {
    SweepSpec sweep;
    sweep.param = e.text("sweep_param");
    c.get_parameter(sweep.param);
    if (e.has("sweep_values")) {
      sweep.values = e.list("sweep_values");
    } else {
      if (!e.has("sweep_min") || !e.has("sweep_max"))
        throw ConfigError("sweep needs 'sweep_values' or 'sweep_min' and 'sweep_max'");
      double lo = 0.0, hi = 0.0;
      std::size_t n = 11;
      e.number("sweep_min", lo);
      e.number("sweep_max", hi);
      e.count("sweep_points", n);
      bool log = false;
      if (e.has("sweep_scale")) {
        const auto& scale = e.text("sweep_scale");
        if (scale != "linear" && scale != "log") throw ConfigError("key 'sweep_scale' must be 'linear' or 'log'");
        log = scale == "log";
      }
      sweep.values = spaced_values(lo, hi, n, log);
      sweep.lo = lo;
      sweep.hi = hi;
      sweep.log = log;
    }
    std::sort(sweep.values.begin(), sweep.values.end());
    c.sweep = std::move(sweep);
  } else {
    for (const char* key : {"sweep_min", "sweep_max", "sweep_points", "sweep_scale", "sweep_values"})
      if (e.has(key)) throw ConfigError("key '" + std::string(key) + "' needs 'sweep_param'");
  }

  e.number("fig2_omega2_min", c.fig2_omega2_min);
  e.number("fig2_omega2_max", c.fig2_omega2_max);
  e.count("fig2_points", c.fig2_points);
  if (e.has("fig2_omega0")) c.fig2_omega0 = e.list("fig2_omega0");
  e.number("fig2_three_level_omega0", c.fig2_three_level_omega0);
  e.number("figc_g_min", c.figc_g_min);
  e.number("figc_g_max", c.figc_g_max);
  e.number("figc_omega2_min", c.figc_omega2_min);
  e.number("figc_omega2_max", c.figc_omega2_max);
  e.count("figc_points", c.figc_points);
  e.number("figc_kappa_ex_over_gamma", c.figc_slice.kappa_ex_over_gamma);
  e.number("figc_kappa_in_over_gamma", c.figc_slice.kappa_in_over_gamma);

  // surface parameter problems now rather than mid-command
  c.system().validate(c.scheme);
  c.pulse();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void load_pulse_table(const std::filesystem::path& path, std::vector<double>& times, std::vector<Complex>& values) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read pulse file '" + path.string() + "'");
  times.clear();
  values.clear();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    std::vector<double> nums;
    for (const auto& f : fields) {
      const auto v = to_double(f);
      if (!v) break;
      nums.push_back(*v);
    }
    if (nums.size() != fields.size() || nums.size() < 2 || nums.size() > 3) {
      if (times.empty() && values.empty() && nums.empty()) continue;  // header row
      throw ConfigError("pulse file line " + std::to_string(number) + ": expected 't, re[, im]'");
    }
    times.push_back(nums[0]);
    values.emplace_back(nums[1], nums.size() == 3 ? nums[2] : 0.0);
  }
  if (times.empty()) throw ConfigError("pulse file '" + path.string() + "' has no samples");
}

}  // namespace photon_src::cli
