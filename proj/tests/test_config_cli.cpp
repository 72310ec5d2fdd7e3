#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "evtrig/cli.hpp"
#include "evtrig/config.hpp"

using namespace evtrig;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("EVTRIG_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "evtrig_cli_tests";
  dir /= name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

template <class E>
std::size_t line_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const E& ex) {
    return ex.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("config defaults and direct mapping") {
  const Config c = parse_config("");
  CHECK(c == Config{});
  CHECK(c.sim.h == 1e-3);
  CHECK(c.sim.event_tol == 1e-9);
  CHECK(c.policy.epsilon == 1e-6);
  CHECK(c.policy.sigma == 0.5);
  CHECK(c.bench.seed == 42);
  CHECK(c.bench.n_runs == 200);

  const Config e = parse_config("[policy]\nkind = eta_threshold\neta0 = 2.0\n");
  CHECK(e.policy.kind == PolicyKind::eta_threshold);
  CHECK(e.policy.eta0 == 2.0);
  CHECK(policy_spec(e).param == 2.0);

  const Config w = parse_config("# comment\n[policy]   # trailing\n  kind=wl\n sigma_bar = 2e-3\n[bench]\nseed = 7\n");
  CHECK(w.policy.kind == PolicyKind::wl);
  CHECK(w.policy.sigma_bar == 2e-3);
  CHECK(w.bench.seed == 7);
  const auto b = bench_config(w);
  CHECK(b.seed == 7);
  CHECK(b.policies[1].param == 2e-3);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(line_of<TypeError>("[sim]\nh = abc\n") == 2);
  CHECK(line_of<TypeError>("[sim]\n\nh = 1e400\n") == 3);
  CHECK(line_of<TypeError>("[sim]\nmax_jumps = -4\n") == 2);
  CHECK(line_of<TypeError>("[policy]\nkind = eta\n") == 2);
  CHECK(line_of<UnknownKey>("[sim]\nstep = 0.1\n") == 2);
  CHECK(line_of<UnknownKey>("[solver]\n") == 1);
  CHECK(line_of<ParseError>("[sim\n") == 1);
  CHECK(line_of<ParseError>("h = 0.1\n") == 1);
  CHECK(line_of<ParseError>("[sim]\njust words\n") == 2);
  CHECK(line_of<ParseError>("[sim]\nh = 0.1\nh = 0.2\n") == 3);
  CHECK_THROWS_AS(parse_config("[sim]\nnan_value = nan\n"), UnknownKey);
  CHECK_THROWS_AS(parse_config("[sim]\nh = nan\n"), TypeError);
}

TEST_CASE("config round trip") {
  Config c;
  c.system.d = 0.123456789012345678;
  c.system.x0 = -0.7;
  c.policy.kind = PolicyKind::periodic;
  c.policy.period = 0.1 + 0.2;
  c.sim.max_jumps = 17;
  c.bench.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.bench.x0_min = -1e-300;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(Config{})) == Config{});
}

TEST_CASE("semantic validation") {
  Config c;
  CHECK_NOTHROW(validate_config(c));
  c.system.model = "pendulum";
  CHECK_THROWS_AS(validate_config(c), InvalidArgument);
  c = Config{};
  c.sim.h = -1.0;
  CHECK_THROWS_AS(validate_config(c), InvalidArgument);
  c = Config{};
  c.bench.d_min = 2.0;
  CHECK_THROWS_AS(validate_config(c), InvalidArgument);
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"plot"}).code == kExitUsage);
  CHECK(cli({"simulate"}).code == kExitUsage);
  CHECK(cli({"bench", "--config"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli validation errors exit 1") {
  const auto dir = scratch("validation");
  put(dir / "bad.cfg", "[sim]\nh = abc\n");
  auto r = cli({"simulate", "--config", (dir / "bad.cfg").string(), "--out", (dir / "t.csv").string()});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t.csv"));
  r = cli({"simulate", "--config", (dir / "missing.cfg").string(), "--out", (dir / "t.csv").string()});
  CHECK(r.code == kExitValidation);
  put(dir / "model.cfg", "[system]\nmodel = pendulum\n");
  r = cli({"dwell", "--config", (dir / "model.cfg").string()});
  CHECK(r.code == kExitValidation);
}

TEST_CASE("cli simulate writes a deterministic trajectory") {
  const auto dir = scratch("simulate");
  put(dir / "example_vi.cfg", "[system]\nd = 0.3\nx0 = 0.8\n[policy]\nkind = eta_threshold\neta0 = 1\n[sim]\nt_end = 3\n");
  const auto cfg = (dir / "example_vi.cfg").string();
  REQUIRE(cli({"simulate", "--config", cfg, "--out", (dir / "a.csv").string()}).code == kExitOk);
  REQUIRE(cli({"simulate", "--config", cfg, "--out", (dir / "b.csv").string()}).code == kExitOk);
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  std::istringstream in(a);
  std::string line;
  std::string first_data;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (!header) {
      CHECK(line == "t,j,phase,x,e,eta,V,R");
      header = true;
      continue;
    }
    first_data = line;
    break;
  }
  CHECK(first_data.rfind("0,0,flow,0.80000000000000004,0,1,", 0) == 0);
  CHECK(a.find("# kind = eta_threshold\n") != std::string::npos);
  // Only the requested outputs exist.
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 3);
}

TEST_CASE("cli bench, certify, dwell") {
  const auto dir = scratch("bench");
  put(dir / "table1.cfg", "[sim]\nt_end = 2\n[bench]\nn_runs = 4\n");
  const auto cfg = (dir / "table1.cfg").string();
  auto r = cli({"bench", "--config", cfg, "--out", (dir / "table1.csv").string()});
  REQUIRE(r.code == kExitOk);
  const auto csv = slurp(dir / "table1.csv");
  CHECK(csv.find("\npolicy,param,avg_executions,min_dwell,max_flow_violation,max_jump_violation,max_final_abs_x\n") !=
        std::string::npos);
  CHECK(csv.find("\nperiodic,0.36799999999999999,5,") != std::string::npos);
  REQUIRE(cli({"bench", "--config", cfg, "--out", (dir / "again.csv").string()}).code == kExitOk);
  CHECK(csv == slurp(dir / "again.csv"));

  put(dir / "wl.cfg", "[policy]\nkind = wl\n[sim]\nt_end = 4\n");
  r = cli({"certify", "--config", (dir / "wl.cfg").string(), "--out", (dir / "report.txt").string()});
  const auto report = slurp(dir / "report.txt");
  const std::regex line_re(R"(^[A-Za-z0-9_]+ (pass|fail) \S+ \S+$)");
  std::istringstream in(report);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    CHECK(std::regex_match(line, line_re));
    ++n;
  }
  CHECK(n >= 8);
  CHECK(report.find("iss_dissipation pass ") != std::string::npos);
  CHECK(r.code == (report.find(" fail ") == std::string::npos ? kExitOk : kExitValidation));

  r = cli({"dwell", "--config", (dir / "wl.cfg").string()});
  REQUIRE(r.code == kExitOk);
  std::istringstream dw(r.out);
  std::string key;
  double tau = 0.0;
  dw >> key >> tau;
  CHECK(key == "tau");
  CHECK(tau > 0.0);
}
