// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "evtrig/bench.hpp"
#include "evtrig/certificate.hpp"
#include "evtrig/cli.hpp"
#include "evtrig/trajectory_csv.hpp"

using namespace evtrig;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string col_name(const PolicySpec& s) { return std::string(policy_kind_name(s.kind)) + "(" + fmt(s.param) + ")"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

bool theorem_backed(PolicyKind k) { return k == PolicyKind::wl || k == PolicyKind::eta_threshold; }

// ---------------------------------------------------------------------------

void ac1(const BenchResult& res, double seconds) {
  const double target[] = {18.47, 16.88, 15.27, 13.31};
  std::vector<double> avg;
  for (const auto& s : res.summary.policies) {
    if (theorem_backed(s.spec.kind)) avg.push_back(s.avg_executions);
  }
  bool pass = avg.size() == 4;
  std::string detail;
  for (std::size_t i = 0; i < avg.size() && i < 4; ++i) {
    const double rel = (avg[i] - target[i]) / target[i];
    const bool ok = std::abs(rel) <= 0.2;
    pass = pass && ok;
    detail += fmt(avg[i]) + "(target " + fmt(target[i]) + ", " + (ok ? "in" : "OUT of") + " band) ";
  }
  bool ordered = avg.size() == 4;
  for (std::size_t i = 1; i < avg.size(); ++i) ordered = ordered && avg[i - 1] > avg[i];
  pass = pass && ordered && seconds < 60.0;
  detail += std::string("ordering ") + (ordered ? "holds" : "VIOLATED") + "; runtime " + fmt(seconds) + " s";
  report("AC1", pass, detail);
}

void ac2() {
  const auto cert = example_vi_certificate(0.5);
  const Box box{{{-2.0, 2.0}}, {{-2.0, 2.0}}};
  const auto good = verify_iss(cert, example_vi_loop, box, {0.0, 1.0}, {201, 11});
  const auto broken = verify_iss(
      IssCertificate::quadratic(0.5, ClassKFunction::linear(10.0), ClassKFunction::power(2.66, 2.0), 0.5),
      example_vi_loop, box, {0.0, 1.0}, {201, 11});
  report("AC2", good.value <= 1e-12 && broken.value >= 1.0,
         "max_violation " + fmt(good.value) + " at " + good.location() + "; broken control " + fmt(broken.value) +
             " at " + broken.location());
}

void ac3(const BenchResult& res) {
  double flow = -std::numeric_limits<double>::infinity();
  double jump = -std::numeric_limits<double>::infinity();
  std::size_t arcs = 0;
  for (std::size_t p = 0; p < res.runs.size(); ++p) {
    if (!theorem_backed(res.summary.policies[p].spec.kind)) continue;
    for (const auto& r : res.runs[p]) {
      flow = std::max(flow, r.max_flow_violation);
      jump = std::max(jump, r.max_jump_violation);
      ++arcs;
    }
  }
  report("AC3", arcs == 800 && flow <= 1e-4 && jump <= 1e-9,
         std::to_string(arcs) + " arcs; max flow-slope violation " + fmt(flow) + ", max jump increment " + fmt(jump));
}

void ac4(const BenchResult& res, const BenchConfig& cfg) {
  bool pass = true;
  std::string detail;
  for (std::size_t p = 0; p < res.runs.size(); ++p) {
    const auto& spec = res.summary.policies[p].spec;
    if (!theorem_backed(spec.kind)) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : res.runs[p]) worst = std::max(worst, r.envelope_excess);
    pass = pass && worst <= 1e-6;
    detail += col_name(spec) + " rho=" + fmt(monitor_for(spec, cfg)->rate) + " excess=" + fmt(worst) + " ";
  }
  report("AC4", pass, detail);
}

void ac5(const BenchResult& res, const BenchConfig& cfg) {
  const auto cert = bench_certificate(cfg);
  std::vector<SampledLoop> loops;
  for (int k = 0; k <= 10; ++k) {
    loops.push_back(example_vi_loop(cfg.d_range.lo + (cfg.d_range.hi - cfg.d_range.lo) * k / 10.0));
  }
  bool pass = true;
  std::string detail;
  for (std::size_t p = 0; p < res.runs.size(); ++p) {
    const auto& spec = res.summary.policies[p].spec;
    if (!theorem_backed(spec.kind)) continue;
    // Reachable box from the observed extremes of this column.
    double xm = 0.0, em = 0.0, min_dwell = std::numeric_limits<double>::infinity();
    for (const auto& r : res.runs[p]) {
      xm = std::max(xm, r.max_abs_x);
      em = std::max(em, r.max_abs_e);
      min_dwell = std::min(min_dwell, r.min_dwell);
    }
    const Box box{{{-xm, xm}}, {{-em, em}}};
    const auto L = estimate_lipschitz(loops, cert, box, 201);
    const double abar = cert.alpha().linear_gain().value();
    auto tau_of = [&](const LipschitzEstimates& l) {
      return spec.kind == PolicyKind::wl ? wl_dwell_bound(l, spec.param, abar, cfg.epsilon).tau : eta_dwell_bound(l).tau;
    };
    const double tau = tau_of(L);
    const double tau_inf = tau_of(L.inflated(1.1));
    const bool ok = min_dwell >= tau && min_dwell >= tau_inf;
    pass = pass && ok;
    detail += col_name(spec) + " observed " + fmt(min_dwell) + " >= tau " + fmt(tau) + " (inflated " + fmt(tau_inf) +
              ")" + (ok ? "" : " VIOLATED") + "; ";
  }
  const double oracle = dwell_lower_bound([](double s) { return (1 + s) * (1 + s); }, 0.0, 1.0);
  const bool oracle_ok = std::abs(oracle - 0.5) <= 1e-9;
  detail += "closed-form tau " + format_double(oracle);
  report("AC5", pass && oracle_ok, detail);
}

void ac6() {
  // RK4 order on xdot = -x.
  auto err = [](double h) {
    HybridSystemDef sys;
    sys.dims = {1, 0, 0};
    sys.flow_map = [](const HybridState& q) {
      HybridState d(q.dims());
      d[0] = -q[0];
      return d;
    };
    sys.jump_map = [](const HybridState& q) { return q; };
    sys.flow_guard = [](const HybridState&) { return -1.0; };
    sys.jump_guard = [](const HybridState&) { return -1.0; };
    SolverConfig cfg;
    cfg.h = h;
    cfg.event_tol = h * 1e-3;
    cfg.t_end = 1.0;
    HybridState q0(sys.dims);
    q0[0] = 1.0;
    return std::abs(solve(sys, q0, cfg).final_state()[0] - std::exp(-1.0));
  };
  const double ratio = err(0.1) / err(0.05);
  const bool order_ok = ratio >= std::pow(2.0, 3.5);

  const fs::path dir = fs::temp_directory_path() / "evtrig_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = (dir / "run.cfg").string();
  std::ofstream(cfg) << "[system]\nd = 0.7\nx0 = -0.9\n[policy]\nkind = wl\n[bench]\nn_runs = 20\n";
  bool same = true;
  for (const char* cmd : {"simulate", "bench"}) {
    const auto a = (dir / (std::string(cmd) + "_a.csv")).string();
    const auto b = (dir / (std::string(cmd) + "_b.csv")).string();
    same = same && cli({cmd, "--config", cfg, "--out", a}) == 0 && cli({cmd, "--config", cfg, "--out", b}) == 0 &&
           slurp(a) == slurp(b) && !slurp(a).empty();
  }
  fs::remove_all(dir);
  report("AC6", order_ok && same,
         "error ratio under halving " + fmt(ratio) + " (need " + fmt(std::pow(2.0, 3.5)) + "); simulate/bench CSVs " +
             (same ? "byte-identical" : "DIFFER"));
}

void ac7(const BenchResult& res) {
  bool pass = true;
  std::string detail;
  for (std::size_t p = 0; p < res.runs.size(); ++p) {
    std::size_t bad = 0;
    double worst_x = 0.0, worst_e = 0.0;
    for (const auto& r : res.runs[p]) {
      if (!(r.final_abs_x <= 0.05)) ++bad;
      worst_x = std::max(worst_x, r.final_abs_x);
      worst_e = std::max(worst_e, r.max_post_jump_abs_e);
    }
    pass = pass && bad == 0 && worst_e == 0.0;
    detail += col_name(res.summary.policies[p].spec) + " max|x(20)|=" + fmt(worst_x) + " runs>0.05:" +
              std::to_string(bad) + " post-jump|e|=" + fmt(worst_e) + "; ";
  }
  report("AC7", pass, detail);
}

}  // namespace

int main() {
  BenchConfig cfg;  // defaults: 200 paired runs, seed 42, t_end 20, sigma 0.5
  const auto t0 = std::chrono::steady_clock::now();
  const BenchResult res = run_table1(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ac1(res, seconds);
  ac2();
  ac3(res);
  ac4(res, cfg);
  ac5(res, cfg);
  ac6();
  ac7(res);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
