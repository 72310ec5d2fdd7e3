#include <catch_amalgamated.hpp>

#include <sstream>

#include "evtrig/bench.hpp"

using namespace evtrig;

TEST_CASE("splitmix64 reference vector") {
  const auto a = splitmix64_next(0);
  CHECK(a.value == 0xE220A8397B1DCDAFULL);
  CHECK(a.state == 0x9E3779B97F4A7C15ULL);
  const auto b = splitmix64_next(a.state);
  CHECK(b.value != a.value);
  CHECK(b.value == 0x6E789E6AA1B965F4ULL);
  CHECK(unit_double(0) == 0.0);
  CHECK(unit_double(~0ULL) < 1.0);
}

TEST_CASE("draw pairing and ranges") {
  BenchConfig cfg;
  cfg.n_runs = 50;
  const auto c = draw_conditions(cfg);
  REQUIRE(c.size() == 50);
  std::uint64_t s = cfg.seed;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto dx = splitmix64_next(s);
    const auto dd = splitmix64_next(dx.state);
    s = dd.state;
    CHECK(c[i].x0 == -1.0 + 2.0 * unit_double(dx.value));
    CHECK(c[i].d == unit_double(dd.value));
    CHECK(c[i].x0 >= -1.0);
    CHECK(c[i].x0 < 1.0);
    CHECK(c[i].d >= 0.0);
    CHECK(c[i].d < 1.0);
  }
  cfg.n_runs = 10;
  const auto prefix = draw_conditions(cfg);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i].x0 == c[i].x0);
}

TEST_CASE("config validation") {
  BenchConfig cfg;
  cfg.n_runs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = BenchConfig{};
  cfg.d_range = {1.0, 0.0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = BenchConfig{};
  cfg.policies.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("small bench: pairing, determinism, thread independence") {
  BenchConfig cfg;
  cfg.n_runs = 6;
  cfg.solver.t_end = 5.0;
  cfg.threads = 1;
  const auto a = run_table1(cfg);
  cfg.threads = 3;
  const auto b = run_table1(cfg);
  std::ostringstream sa, sb;
  write_summary_csv(sa, a.summary, "cfg");
  write_summary_csv(sb, b.summary, "cfg");
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("# cfg\npolicy,param,avg_executions,min_dwell,max_flow_violation,max_jump_violation,max_final_abs_x\n") == 0);

  REQUIRE(a.runs.size() == table1_policies().size());
  for (const auto& col : a.runs) {
    for (std::size_t i = 0; i < col.size(); ++i) {
      CHECK(col[i].run_index == i);
      CHECK(col[i].x0 == a.conditions[i].x0);
      CHECK(col[i].d == a.conditions[i].d);
      if (col[i].executions >= 2) CHECK(col[i].min_dwell > 0.0);
      CHECK(col[i].max_post_jump_abs_e == 0.0);
    }
  }
  for (std::size_t p = 0; p < a.summary.policies.size(); ++p) {
    double total = 0.0;
    for (const auto& r : a.runs[p]) total += static_cast<double>(r.executions);
    CHECK(a.summary.policies[p].avg_executions == total / 6.0);
  }
  // 5 s horizon with T = 0.368 gives 13 periodic executions per run.
  CHECK(a.summary.policies[0].avg_executions == 13.0);
}

TEST_CASE("run errors carry the run index and config") {
  BenchConfig cfg;
  cfg.n_runs = 3;
  cfg.solver.t_end = 2.0;
  cfg.solver.max_jumps = 1;
  cfg.policies = {{PolicyKind::periodic, 0.1}};
  try {
    run_table1(cfg);
    FAIL("expected BenchRunError");
  } catch (const BenchRunError& ex) {
    const std::string what = ex.what();
    CHECK(what.find("bench run 0") != std::string::npos);
    CHECK(what.find("seed = 42") != std::string::npos);
  }
}
