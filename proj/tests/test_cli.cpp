#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "photon_src/cli/commands.hpp"
#include "photon_src/cli/config.hpp"
#include "photon_src/cli/csv.hpp"

using namespace photon_src;
using namespace photon_src::cli;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path path;
  ScratchDir() : path(fs::temp_directory_path() / ("photon_src_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch() {
  static const ScratchDir dir;
  return dir.path;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path path = scratch() / name;
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    FAIL("no column " << name);
    return 0;
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = col(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  Table t;
  std::string line;
  std::getline(in, line);
  t.header = split(line);
  while (std::getline(in, line)) {
    std::vector<double> r;
    for (const auto& cell : split(line)) r.push_back(std::stod(cell));
    t.rows.push_back(r);
  }
  return t;
}

// exit code plus whatever went to stderr
std::pair<int, std::string> run_captured(const std::string& command, const fs::path& config, const fs::path& out,
                                         bool numeric = false, std::optional<std::size_t> points = {},
                                         unsigned threads = 1) {
  CommandOptions opt;
  opt.threads = threads;
  opt.out = out;
  opt.numeric = numeric;
  opt.points = points;
  std::stringstream err;
  auto* old = std::cerr.rdbuf(err.rdbuf());
  const int code = run(command, config, opt);
  std::cerr.rdbuf(old);
  return {code, err.str()};
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.964908118) == "9.64908118e-01");
  CHECK(format_number(-0.0) == "0.00000000e+00");
  CHECK(format_number(0.0) == "0.00000000e+00");
  CHECK(format_number(-12345.6789) == "-1.23456789e+04");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("config defaults and parsing") {
  const auto c = parse("# baseline\n\n  omega2 = 3.2  # trailing comment\n");
  CHECK(c.scheme == LevelScheme::FourLevel);
  CHECK(c.kappa_ex_optimal);
  CHECK(c.system().kappa_ex == doctest::Approx(0.30167713).epsilon(1e-8));
  CHECK(c.params.omega2 == 3.2);
  CHECK(c.pulse().t_end() == 1000.0);
  CHECK(c.omega0 == 0.01);

  const auto d = parse("scheme=three\nomega2=0\nkappa_ex=0.2\npulse=linear\nomega0=0.05\nt_end=50\n");
  CHECK(d.scheme == LevelScheme::ThreeLevel);
  CHECK_FALSE(d.kappa_ex_optimal);
  CHECK(d.system().kappa_ex == 0.2);
  CHECK(d.pulse().t_end() == 50.0);

  const auto e = parse("sweep_param=omega2\nsweep_min=1\nsweep_max=100\nsweep_points=3\nsweep_scale=log\n");
  REQUIRE(e.sweep);
  CHECK(e.sweep->values.size() == 3);
  CHECK(e.sweep->values[1] == doctest::Approx(10.0));

  const auto f = parse("sweep_param=delta_e\nsweep_values=0.5, -0.5, 0\n");
  REQUIRE(f.sweep);
  CHECK(f.sweep->values == std::vector<double>{-0.5, 0.0, 0.5});
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("gamma_uu=0.1\n").find("gamma_uu") != std::string::npos);
  CHECK(message("gamma_u=abc\n").find("gamma_u") != std::string::npos);
  CHECK(message("gamma_u=0.1\ngamma_u=0.2\n").find("duplicate") != std::string::npos);
  CHECK(message("omega2 3.2\n").find("line 1") != std::string::npos);
  CHECK(message("pulse=tabulated\n").find("pulse_file") != std::string::npos);
  CHECK(message("sweep_min=1\n").find("sweep_param") != std::string::npos);
  CHECK(message("record_cells=401\n").find("record_cells") != std::string::npos);
  CHECK(message("scheme=five\n").find("scheme") != std::string::npos);

  RunConfig c;
  CHECK_THROWS_AS(c.set_parameter("nonsense", 1.0), ConfigError);
  c.set_parameter("gamma_o2", 0.02);
  CHECK(c.get_parameter("gamma_o2") == 0.02);
}

TEST_CASE("tabulated pulse file resolves next to the config") {
  std::ofstream(scratch() / "ramp.csv") << "t,re,im\n0,0,0\n10,0.1,0\n# done\n20,0.2,0\n";
  const auto path = write_config("tab.cfg", "pulse=tabulated\npulse_file=ramp.csv\n");
  const auto c = load_config(path);
  CHECK(c.pulse_kind == PulseShape::Kind::Tabulated);
  CHECK(c.pulse().t_end() == 20.0);
  CHECK(c.pulse().amplitude(15.0).real() == doctest::Approx(0.15));
}

TEST_CASE("spaced values") {
  const auto lin = spaced_values(1.0, 3.0, 5, false);
  CHECK(lin == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  const auto lg = spaced_values(0.1, 1000.0, 5, true);
  CHECK(lg.front() == 0.1);
  CHECK(lg.back() == 1000.0);
  CHECK(lg[2] == doctest::Approx(10.0));
  CHECK_THROWS_AS(spaced_values(-1.0, 2.0, 3, true), ConfigError);
}

TEST_CASE("simulate writes reproducible files") {
  const auto cfg = write_config("base.cfg", "omega2=3.2\nomega0=0.01\n");
  const auto out1 = scratch() / "sim1";
  const auto out2 = scratch() / "sim2";
  REQUIRE(run_captured("simulate", cfg, out1).first == 0);
  REQUIRE(run_captured("simulate", cfg, out2).first == 0);
  for (const char* name : {"populations.csv", "record.csv", "summary.csv"}) {
    CHECK(fs::exists(out1 / name));
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
  const auto summary = read_csv(out1 / "summary.csv");
  REQUIRE(summary.rows.size() == 1);
  CHECK(std::abs(summary.column("p_total")[0] - 0.964908) < 5e-7);
  CHECK(std::abs(summary.column("p_total_lindblad")[0] - 0.964908) < 0.005);
  CHECK(summary.column("dev_p_si_record")[0] < 1e-5);
  CHECK(slurp(out1 / "summary.csv").find("9.64908118e-01") != std::string::npos);

  const auto pops = read_csv(out1 / "populations.csv");
  const std::vector<std::string> want = {"t", "rho_u0", "rho_e20", "rho_e0", "rho_g1", "rho_g0", "rho_o0", "flux"};
  CHECK(pops.header == want);
  const auto rec = read_csv(out1 / "record.csv");
  CHECK(rec.header[0] == "t");
  CHECK(rec.header[1] == "re_psi0");
  CHECK(rec.header[2] == "im_psi0");
}

TEST_CASE("simulate without re-excitation") {
  const auto cfg = write_config("nore.cfg", "gamma_u=0\nkappa_ex=0.3\n");
  const auto out = scratch() / "nore";
  REQUIRE(run_captured("simulate", cfg, out).first == 0);
  CHECK(read_csv(out / "summary.csv").column("r_re")[0] == 0.0);
}

TEST_CASE("exit codes") {
  const auto bad_key = write_config("bad.cfg", "omega_2=3.2\n");
  const auto [code, err] = run_captured("simulate", bad_key, scratch() / "bad");
  CHECK(code == 2);
  CHECK(err.find("omega_2") != std::string::npos);

  CHECK(run_captured("simulate", scratch() / "missing.cfg", scratch() / "x").first == 2);
  CHECK(run_captured("bogus", write_config("ok.cfg", ""), scratch() / "x").first == 2);
  const auto negative = write_config("neg.cfg", "gamma_u=-1\n");
  CHECK(run_captured("simulate", negative, scratch() / "neg").first == 2);

  const auto stiff = write_config("stiff.cfg", "rtol=1e-300\natol=1e-300\n");
  CHECK(run_captured("simulate", stiff, scratch() / "stiff").first == 3);

  const auto sweep_bad = write_config("sweep_bad.cfg", "sweep_param=colour\nsweep_values=1,2\n");
  CHECK(run_captured("sweep", sweep_bad, scratch() / "sb").first == 2);
  CHECK(run_captured("sweep", write_config("nosweep.cfg", ""), scratch() / "ns").first == 2);
}

TEST_CASE("sweep invariants") {
  const auto w = write_config("sw_omega2.cfg", "sweep_param=omega2\nsweep_min=0.5\nsweep_max=10\nsweep_points=7\n");
  REQUIRE(run_captured("sweep", w, scratch() / "sw1").first == 0);
  const auto a = read_csv(scratch() / "sw1" / "sweep.csv");
  CHECK(a.header[0] == "omega2");
  REQUIRE(a.rows.size() == 7);
  const auto pt = a.column("p_total");
  for (double v : pt) CHECK(std::abs(v - pt[0]) < 1e-12);
  const auto x = a.column("omega2");
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  const auto t_em = a.column("t_em");
  for (std::size_t i = 1; i < t_em.size(); ++i) CHECK(t_em[i] > t_em[i - 1]);

  // --points respaces a min/max sweep
  REQUIRE(run_captured("sweep", w, scratch() / "sw1b", false, 4).first == 0);
  CHECK(read_csv(scratch() / "sw1b" / "sweep.csv").rows.size() == 4);

  const auto d = write_config("sw_de.cfg", "sweep_param=delta_e\nsweep_values=-0.8,-0.3,0,0.3,0.8\n");
  REQUIRE(run_captured("sweep", d, scratch() / "sw2").first == 0);
  const auto r = read_csv(scratch() / "sw2" / "sweep.csv").column("r_re");
  REQUIRE(r.size() == 5);
  CHECK(r[0] == doctest::Approx(r[4]).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(r[3]).epsilon(1e-14));
  CHECK(r[2] < r[1]);

  const auto o = write_config("sw_o2.cfg", "sweep_param=gamma_o2\nsweep_values=0,0.01,0.02\n");
  REQUIRE(run_captured("sweep", o, scratch() / "sw3").first == 0);
  const auto p = read_csv(scratch() / "sw3" / "sweep.csv").column("p_total");
  CHECK(p[0] > p[1]);
  CHECK(p[1] > p[2]);
  CHECK(std::abs(p[1] - 0.961885) < 1e-6);
}

TEST_CASE("numeric sweep is thread independent") {
  const auto cfg = write_config("sw_num.cfg", "omega0=0.04\nsweep_param=omega2\nsweep_values=2,5\n");
  REQUIRE(run_captured("sweep", cfg, scratch() / "num1", true, {}, 1).first == 0);
  REQUIRE(run_captured("sweep", cfg, scratch() / "num2", true, {}, 2).first == 0);
  CHECK(slurp(scratch() / "num1" / "sweep.csv") == slurp(scratch() / "num2" / "sweep.csv"));
  const auto t = read_csv(scratch() / "num1" / "sweep.csv");
  for (double dev : t.column("dev_p_si_record")) CHECK(dev < 1e-5);
  for (double dev : t.column("dev_p_total_lindblad")) CHECK(dev < 0.01);
}

TEST_CASE("figC map") {
  const auto cfg = write_config("figc.cfg", "figc_points=20\n");
  REQUIRE(run_captured("figC", cfg, scratch() / "fc").first == 0);
  const auto map = read_csv(scratch() / "fc" / "ratio_map.csv");
  CHECK(map.rows.size() == 400);
  const auto g = map.column("g_over_gamma");
  const auto w = map.column("omega2_over_gamma");
  const auto ratio = map.column("ratio");
  for (std::size_t i = 0; i < ratio.size(); ++i)
    if (w[i] >= g[i] * g[i] + 0.5) CHECK(ratio[i] <= 1.0 + 1e-12);
  const auto contour = read_csv(scratch() / "fc" / "ratio_contour.csv");
  CHECK(contour.rows.size() == 20);

  // a finer grid reproduces shared cells exactly
  REQUIRE(run_captured("figC", cfg, scratch() / "fc2", false, 39).first == 0);
  const auto fine = read_csv(scratch() / "fc2" / "ratio_map.csv");
  CHECK(fine.rows[0] == map.rows[0]);
  CHECK(fine.rows.back() == map.rows.back());
}

TEST_CASE("fig2 on a small grid") {
  const auto cfg = write_config("fig2.cfg", "fig2_omega2_min=1\nfig2_omega2_max=3.2\nfig2_omega0=0.01\n");
  REQUIRE(run_captured("fig2", cfg, scratch() / "f2", false, 3).first == 0);
  const auto b = read_csv(scratch() / "f2" / "fig2b.csv");
  REQUIRE(b.rows.size() == 3);
  CHECK(b.rows[2][1] == 3.2);
  CHECK(std::abs(b.rows[2][2] - b.rows[2][3]) < 0.005);
  const auto a = read_csv(scratch() / "f2" / "fig2a.csv");
  CHECK(std::abs(a.rows[2][2] - a.rows[2][3]) < 0.005);
  const auto c = read_csv(scratch() / "f2" / "fig2c.csv").column("t_em");
  CHECK(c[0] < c[1]);
  CHECK(c[1] < c[2]);
  const auto meta = read_csv(scratch() / "f2" / "fig2_meta.csv");
  CHECK(std::abs(meta.column("kappa_ex")[0] - 0.301677) < 1e-6);
  CHECK(std::abs(meta.column("r_re_three_level")[0] - 0.030135) < 1e-6);
}
