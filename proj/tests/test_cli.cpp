#include "revshell/config.hpp"
#include "revshell/pipeline.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace revshell;
namespace fs = std::filesystem;

namespace {

const std::string small_tank = R"(
analysis = e
support = b
geometry {
  fill = 4
  segment { kind = line; from = 0 0; to = 1 0 }
  segment { kind = line; from = 1 0; to = 1 2 }
  segment { kind = line; from = 1 2; to = 0.5 4 }
  segment { kind = arc; from = 0.5 4; to = 0 4.1339745962155614; center = 0 3.1339745962155614; sense = ccw }
}
material { E = 2e5 MPa; nu = 0.3; rho = 7800; h = 0.01; yield = 320 MPa }
liquid { rho = 1000; g = 9.81 }
discretization { n = 24; modes = 4; degree = 10; t_end = 5 ms }
load { q0 = 0.1 MPa; tau = 14.2 us }
probes { p1 = 40 80 cm; p2 = 100 200 cm; p3 = 50 400 cm; top = 0.25 4.1 }
)";

std::string with_class(std::string text, const std::string& cls) {
  text.replace(text.find("analysis = e"), 12, "analysis = " + cls);
  return text;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("revshell_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& out = {}) {
  std::string cmd;
  if (!out.empty()) cmd = "REVSHELL_OUTPUT_DIR='" + out.string() + "' ";
  cmd += std::string("'") + REVSHELL_HYDRO_BIN + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string header_of(const std::string& csv) {
  const std::string body = csv_body(csv);
  return body.substr(0, body.find('\n'));
}

}  // namespace

TEST_CASE("class e writes every output") {
  const FileSet files = run(parse_config_text(small_tank));
  for (const char* name : {"modes_dry.csv", "modes_wet.csv", "free_surface.csv", "report.txt", "displacement_p1.csv",
                           "displacement_p2.csv", "displacement_p3.csv", "pressure_p1.csv", "pressure_p2.csv",
                           "pressure_p3.csv", "displacement_top.csv"}) {
    CHECK_MESSAGE(files.count(name) == 1, name);
  }
  // the cap probe is above the liquid
  CHECK(files.count("pressure_top.csv") == 0);

  CHECK(header_of(files.at("modes_dry.csv")) == "index,omega_rad_s,frequency_hz");
  CHECK(header_of(files.at("modes_wet.csv")) == "index,omega_rad_s,frequency_hz");
  CHECK(header_of(files.at("displacement_p1.csv")) == "t_s,w_m");
  CHECK(header_of(files.at("pressure_p1.csv")) == "t_s,p_pa");
  CHECK(header_of(files.at("free_surface.csv")) == "t_s,f_m");

  // monotone time grid starting from rest
  std::istringstream body(csv_body(files.at("displacement_p2.csv")));
  std::string line;
  std::getline(body, line);
  double previous = -1.0;
  bool first = true;
  while (std::getline(body, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    const double w = std::stod(line.substr(line.find(',') + 1));
    if (first) CHECK(w == 0.0);
    first = false;
    CHECK(t > previous);
    previous = t;
  }
  CHECK(previous == doctest::Approx(5e-3));
}

TEST_CASE("wet frequencies sit below dry ones") {
  const FileSet files = run_modes(parse_config_text(small_tank), true);
  auto column = [](const std::string& csv) {
    std::istringstream in(csv_body(csv));
    std::string line;
    std::getline(in, line);
    std::vector<double> w;
    while (std::getline(in, line)) w.push_back(std::stod(line.substr(line.find(',') + 1)));
    return w;
  };
  const auto dry = column(files.at("modes_dry.csv")), wet = column(files.at("modes_wet.csv"));
  REQUIRE(dry.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(wet[k] < dry[k]);
}

TEST_CASE("class dispatch") {
  const FileSet b = run(parse_config_text(with_class(small_tank, "b")));
  CHECK(b.size() == 2);
  CHECK(b.count("modes_dry.csv") == 1);
  CHECK(b.count("report.txt") == 1);

  const FileSet d = run(parse_config_text(with_class(small_tank, "d")));
  CHECK(d.count("displacement_p1.csv") == 1);
  CHECK(d.count("pressure_p1.csv") == 0);
  CHECK(d.count("modes_wet.csv") == 0);

  std::string zero = with_class(small_tank, "a");
  zero.replace(zero.find("q0 = 0.1 MPa"), 12, "q0 = 0");
  const FileSet a = run(parse_config_text(zero));
  REQUIRE(a.count("static.csv") == 1);
  std::istringstream in(csv_body(a.at("static.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line == "segment,xi,r_m,z_m,u_m,w_m");
  while (std::getline(in, line)) {
    const auto w = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(w == 0.0);
  }
}

TEST_CASE("repeated runs give identical CSV bodies") {
  const RunConfig c = parse_config_text(small_tank);
  const FileSet a = run(c), b = run(c);
  REQUIRE(a.size() == b.size());
  for (const auto& [name, content] : a) {
    if (name.ends_with(".csv")) CHECK_MESSAGE(csv_body(content) == csv_body(b.at(name)), name);
  }
}

TEST_CASE("convergence study validation and decay") {
  const RunConfig c = parse_config_text(small_tank);
  CHECK_THROWS_AS(convergence_study(c, {8, 8, 16}), ValidationError);
  CHECK_THROWS_AS(convergence_study(c, {2, 8, 16}), ValidationError);
  CHECK_THROWS_AS(convergence_study(c, {8, 16}), ValidationError);
  const ConvergenceStudy s = convergence_study(c, {8, 16, 32});
  REQUIRE(s.parts.size() == 3);
  CHECK(s.parts[0] == "disk");
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(s.eps[1][p] < s.eps[0][p]);
    CHECK(s.eps[2][p] < s.eps[1][p]);
  }
  const FileSet f = convergence_files(s);
  CHECK(header_of(f.at("convergence.csv")) == "n,eps_disk,eps_cylinder,eps_cone");
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run_cli("run /nonexistent/file.cfg", dir / "out") == 2);
  CHECK(run_cli("run '" + write_text(dir / "empty.cfg", "").string() + "'", dir / "out") == 3);

  std::string bad_nu = small_tank;
  bad_nu.replace(bad_nu.find("nu = 0.3"), 8, "nu = 0.6");
  CHECK(run_cli("run '" + write_text(dir / "nu.cfg", bad_nu).string() + "'", dir / "out") == 3);

  const fs::path cfg = write_text(dir / "tank.cfg", with_class(small_tank, "b"));
  write_text(dir / "blocker", "a file, not a directory");
  CHECK(run_cli("run '" + cfg.string() + "'", dir / "blocker" / "out") == 4);

  CHECK(run_cli("modes '" + cfg.string() + "' --dry", dir / "modes") == 0);
  CHECK(fs::exists(dir / "modes" / "modes_dry.csv"));
  CHECK(fs::exists(dir / "modes" / "config_resolved.cfg"));
  CHECK_FALSE(fs::exists(dir / "modes" / "modes_wet.csv"));
  // the echoed configuration parses back to the same run
  CHECK(parse_config((dir / "modes" / "config_resolved.cfg").string()) == parse_config(cfg.string()));

  CHECK(run_cli("converge '" + cfg.string() + "' --n 8,8,16", dir / "conv") == 3);
  CHECK(run_cli("bogus", dir / "out") == 2);
}

TEST_CASE("CLI runs are byte identical") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_text(dir / "tank.cfg", small_tank);
  REQUIRE(run_cli("run '" + cfg.string() + "'", dir / "a") == 0);
  REQUIRE(run_cli("run '" + cfg.string() + "'", dir / "b") == 0);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const std::string name = entry.path().filename().string();
    if (!name.ends_with(".csv")) continue;
    CHECK_MESSAGE(csv_body(read_text(entry.path())) == csv_body(read_text(dir / "b" / name)), name);
  }
}
