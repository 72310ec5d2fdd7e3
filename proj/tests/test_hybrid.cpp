#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "evtrig/hybrid.hpp"
#include "evtrig/policies.hpp"
#include "evtrig/trajectory_csv.hpp"

using namespace evtrig;
using Catch::Approx;

namespace {

const StateDims k1{1, 0, 0};

HybridState s1(double v) {
  HybridState q(k1);
  q[0] = v;
  return q;
}

FlowMap field(double (*f)(double)) {
  return [f](const HybridState& q) { return s1(f(q[0])); };
}

HybridSystemDef decay_no_jumps() {
  HybridSystemDef sys;
  sys.dims = k1;
  sys.flow_map = field([](double x) { return -x; });
  sys.jump_map = [](const HybridState& q) { return q; };
  sys.flow_guard = [](const HybridState&) { return -1.0; };
  sys.jump_guard = [](const HybridState&) { return -1.0; };
  return sys;
}

}  // namespace

TEST_CASE("rk4 step oracles") {
  const auto q = rk4_step(field([](double x) { return -x; }), s1(1.0), 0.1);
  CHECK(std::abs(q[0] - std::exp(-0.1)) <= 1e-7);
  CHECK(rk4_step(field([](double) { return 0.0; }), s1(3.2), 0.37)[0] == 3.2);
  CHECK(rk4_step(field([](double) { return 1.0; }), s1(0.0), 0.5)[0] == 0.5);
}

TEST_CASE("rk4 flags non-finite stages") {
  auto bad = field([](double x) { return x > 1.0 ? std::nan("") : 1.0; });
  try {
    rk4_step(bad, s1(0.9), 0.5);
    FAIL("expected NonFiniteDynamics");
  } catch (const NonFiniteDynamics& ex) {
    CHECK(ex.stage() >= 2);
  }
}

TEST_CASE("locate_event oracles") {
  const double tol = 1e-9;
  auto hit = locate_event(field([](double) { return 1.0; }), [](const HybridState& q) { return q[0] - 1.0; },
                          s1(0.0), 0.0, 2.0, tol);
  CHECK(std::abs(hit.t - 1.0) <= tol);
  CHECK(hit.q[0] - 1.0 >= -1e-9);

  hit = locate_event(field([](double x) { return -x; }), [](const HybridState& q) { return 0.5 - q[0]; }, s1(1.0),
                     0.0, 1.0, tol);
  CHECK(std::abs(hit.t - std::log(2.0)) <= 1e-4);

  CHECK_THROWS_AS(locate_event(field([](double) { return 1.0; }), [](const HybridState&) { return 0.0; }, s1(0.0),
                               0.0, 1.0, tol),
                  BracketError);
}

TEST_CASE("solve without jumps matches exp(-t)") {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  const auto arc = solve(decay_no_jumps(), s1(1.0), cfg);
  CHECK(arc.executions() == 0);
  CHECK(arc.final_state()[0] == Approx(std::exp(-1.0)).margin(1e-6));
  CHECK(arc.intervals.back().samples.back().t == 1.0);
}

TEST_CASE("jump priority at t = 0") {
  auto sys = decay_no_jumps();
  int calls = 0;
  sys.jump_guard = [&calls](const HybridState&) { return calls == 0 ? 1.0 : -1.0; };
  sys.jump_map = [&calls](const HybridState& q) {
    ++calls;
    return q;
  };
  SolverConfig cfg;
  cfg.t_end = 0.01;
  const auto arc = solve(sys, s1(1.0), cfg);
  REQUIRE(arc.jumps.size() == 1);
  CHECK(arc.jumps[0].t == 0.0);
  CHECK(arc.domain().well_formed());
}

TEST_CASE("max_jumps and dead states are reported") {
  auto sys = decay_no_jumps();
  sys.jump_guard = [](const HybridState&) { return 1.0; };
  SolverConfig cfg;
  cfg.max_jumps = 5;
  CHECK_THROWS_AS(solve(sys, s1(1.0), cfg), MaxJumpsExceeded);

  auto dead = decay_no_jumps();
  dead.flow_guard = [](const HybridState&) { return 1.0; };
  CHECK_THROWS_AS(solve(dead, s1(1.0), SolverConfig{}), DeadState);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.h = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = SolverConfig{};
  cfg.event_tol = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_NOTHROW(SolverConfig{}.validate());
}

TEST_CASE("rk4 convergence order under step halving") {
  auto err = [](double h) {
    SolverConfig cfg;
    cfg.h = h;
    cfg.event_tol = h / 1000;
    cfg.t_end = 1.0;
    return std::abs(solve(decay_no_jumps(), s1(1.0), cfg).final_state()[0] - std::exp(-1.0));
  };
  CHECK(err(0.1) / err(0.05) >= std::pow(2.0, 3.5));
  CHECK(err(0.05) / err(0.025) >= std::pow(2.0, 3.5));
}

TEST_CASE("bouncing clock: jump times, domain and jump records") {
  // Clock that resets every 0.25 s.
  const auto policy = periodic_policy(0.25);
  HybridSystemDef sys;
  sys.dims = {0, 0, 1};
  sys.flow_map = [](const HybridState& q) {
    HybridState d(q.dims());
    d[0] = 1.0;
    return d;
  };
  sys.jump_map = [](const HybridState& q) {
    HybridState p(q.dims());
    p[0] = 0.0;
    return p;
  };
  sys.flow_guard = policy.flow_guard;
  sys.jump_guard = policy.jump_guard;
  SolverConfig cfg;
  cfg.t_end = 1.1;
  const auto arc = solve(sys, HybridState(sys.dims), cfg);
  REQUIRE(arc.executions() == 4);
  for (std::size_t k = 0; k < arc.jumps.size(); ++k) {
    CHECK(arc.jumps[k].t == Approx(0.25 * (k + 1)).margin(2e-9));
    CHECK(arc.jumps[k].j == k);
    CHECK(sys.jump_guard(arc.jumps[k].before) >= -cfg.guard_tol);
    CHECK(arc.jumps[k].after.bit_equal(sys.jump_map(arc.jumps[k].before)));
  }
  const auto dom = arc.domain();
  CHECK(dom.well_formed());
  CHECK(dom.intervals.size() == 5);
  CHECK(dom.horizon() == 1.1);
}

TEST_CASE("solve is deterministic") {
  auto run = [] {
    auto sys = decay_no_jumps();
    sys.jump_guard = [](const HybridState& q) { return 0.5 - q[0]; };
    sys.jump_map = [](const HybridState&) { return s1(1.0); };
    sys.flow_guard = [](const HybridState& q) { return q[0] - 1.0; };
    SolverConfig cfg;
    cfg.t_end = 3.0;
    std::ostringstream os;
    write_trajectory_csv(
        os, solve(sys, s1(1.0), cfg), [](const HybridState& q) { return q[0]; },
        [](const HybridState& q) { return q[0]; });
    return os.str();
  };
  const auto a = run();
  CHECK(a == run());
  CHECK(a.rfind("t,j,phase,x,e,eta,V,R\n", 0) == 0);
}

TEST_CASE("trajectory csv layout") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(54.0) == "54");
  const double v[] = {1.0, 2.0};
  CHECK(format_vector(v) == "1;2");
  CHECK(format_vector({}).empty());

  const auto policy = periodic_policy(0.5);
  HybridSystemDef sys;
  sys.dims = {1, 1, 1};
  sys.flow_map = [](const HybridState& q) {
    HybridState d(q.dims());
    d.eta()[0] = 1.0;
    return d;
  };
  sys.jump_map = [](const HybridState& q) {
    HybridState p = q;
    p.e()[0] = 0.0;
    p.eta()[0] = 0.0;
    return p;
  };
  sys.flow_guard = policy.flow_guard;
  sys.jump_guard = policy.jump_guard;
  SolverConfig cfg;
  cfg.t_end = 0.7;
  cfg.h = 0.1;
  const auto arc = solve(sys, HybridState::scalar(1.0, 0.25, 0.0), cfg);
  std::ostringstream os;
  write_trajectory_csv(
      os, arc, [](const HybridState& q) { return q.x()[0]; }, [](const HybridState&) { return 2.0; }, "a\nb");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# a");
  std::getline(in, line);
  CHECK(line == "# b");
  std::getline(in, line);
  CHECK(line == "t,j,phase,x,e,eta,V,R");
  std::getline(in, line);
  CHECK(line == "0,0,flow,1,0.25,0,1,2");
  bool saw_pre = false;
  bool saw_post = false;
  while (std::getline(in, line)) {
    if (line.find(",jump_pre,") != std::string::npos) {
      saw_pre = true;
      CHECK(line.rfind("0,", 0) != 0);
      CHECK(line.find(",0,jump_pre,1,0.25,") != std::string::npos);
    }
    if (line.find(",jump_post,") != std::string::npos) {
      saw_post = true;
      CHECK(line.find(",1,jump_post,1,0,0,") != std::string::npos);
    }
  }
  CHECK(saw_pre);
  CHECK(saw_post);
}
