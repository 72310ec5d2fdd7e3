#include "evtrig/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "evtrig/bench.hpp"
#include "evtrig/certificate.hpp"
#include "evtrig/config.hpp"
#include "evtrig/systems.hpp"
#include "evtrig/trajectory_csv.hpp"

namespace evtrig {

namespace {

constexpr double kCertifyTol = 1e-12;
constexpr double kFlowTol = 1e-4;
constexpr double kJumpTol = 1e-9;
constexpr double kEnvelopeTol = 1e-6;
constexpr std::size_t kLipschitzGrid = 201;

Config load_config(const std::string& path) {
  if (path.empty()) return Config{};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Config c = parse_config(ss.str());
  validate_config(c);
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidArgument("cannot open output file '" + path + "'");
  return os;
}

std::string echo(const Config& c) { return "effective config\n" + serialize_config(c); }

CompositeLyapunov r_for(const PolicySpec& spec, const Config& c) {
  BenchConfig b = bench_config(c);
  if (auto mon = monitor_for(spec, b)) return mon->R;
  return CompositeLyapunov(CompositeVariant::iss_max, example_vi_certificate(c.policy.sigma));
}

/// Reachable box used for the growth constants: |x| up to the largest initial
/// condition, |e| up to twice that.
Box reach_box(const Config& c) {
  const double m = std::max({std::abs(c.bench.x0_min), std::abs(c.bench.x0_max), std::abs(c.system.x0)});
  return Box{{{-m, m}}, {{-2.0 * m, 2.0 * m}}};
}

LipschitzEstimates lipschitz_for(const Config& c) {
  std::vector<SampledLoop> loops;
  const std::size_t n = 11;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = c.bench.d_min + (c.bench.d_max - c.bench.d_min) * static_cast<double>(i) / (n - 1);
    loops.push_back(example_vi_loop(d));
  }
  return estimate_lipschitz(loops, example_vi_certificate(c.policy.sigma), reach_box(c), kLipschitzGrid);
}

struct DwellResult {
  double a = 0.0;
  double b = 0.0;
  double tau = 0.0;
  double tau_inflated = 0.0;
};

DwellResult dwell_for(const Config& c, const LipschitzEstimates& L) {
  const auto& p = c.policy;
  if (p.kind == PolicyKind::periodic) return {0.0, p.period, p.period, p.period};
  const double alpha_bar = example_vi_certificate(p.sigma).alpha().linear_gain().value();
  auto bound = [&](const LipschitzEstimates& l) {
    return p.kind == PolicyKind::wl ? wl_dwell_bound(l, p.sigma_bar, alpha_bar, p.epsilon) : eta_dwell_bound(l);
  };
  const auto nominal = bound(L);
  const auto inflated = bound(L.inflated(1.1));
  return {nominal.a, nominal.b, nominal.tau, inflated.tau};
}

struct ReportLine {
  std::string name;
  bool pass;
  double worst;
  std::string location;
};

int cmd_simulate(const Config& c, const std::string& out_path, std::ostream& out) {
  const SampledLoop loop = example_vi_loop(c.system.d);
  const BenchConfig b = bench_config(c);
  const PolicySpec spec = policy_spec(c);
  const TriggerPolicy policy = make_policy(spec, b, loop);
  const double x0[] = {c.system.x0};
  const HybridArc arc = solve(closed_loop(loop, policy), initial_state(loop, policy, x0), solver_config(c));

  const IssCertificate cert = example_vi_certificate(c.policy.sigma);
  const CompositeLyapunov R = r_for(spec, c);
  auto os = open_out(out_path);
  write_trajectory_csv(
      os, arc, [&cert](const HybridState& q) { return cert.V(q.x()); },
      [&R](const HybridState& q) { return R(q); }, echo(c));
  if (!os) throw InvalidArgument("write failed for '" + out_path + "'");
  out << "simulate: " << arc.executions() << " executions, wrote " << out_path << '\n';
  return kExitOk;
}

int cmd_bench(const Config& c, const std::string& out_path, std::ostream& out) {
  const BenchResult res = run_table1(bench_config(c));
  auto os = open_out(out_path);
  write_summary_csv(os, res.summary, echo(c));
  if (!os) throw InvalidArgument("write failed for '" + out_path + "'");
  for (const auto& s : res.summary.policies) {
    out << policy_kind_name(s.spec.kind) << '(' << format_double(s.spec.param)
        << "): avg_executions = " << format_double(s.avg_executions) << '\n';
  }
  return kExitOk;
}

int cmd_certify(const Config& c, const std::string& out_path, std::ostream& out) {
  std::vector<ReportLine> lines;
  const IssCertificate cert = example_vi_certificate(c.policy.sigma);
  const Box iss_box{{{-2.0, 2.0}}, {{-2.0, 2.0}}};
  const Interval d_range{c.bench.d_min, c.bench.d_max};

  const auto iss = verify_iss(cert, example_vi_loop, iss_box, d_range, {});
  lines.push_back({"iss_dissipation", iss.value <= kCertifyTol, iss.value, iss.location()});
  const auto sw = verify_sandwich(cert, iss_box.x, GridSpec{}.n_state);
  lines.push_back({"sandwich_bounds", sw.value <= kCertifyTol, sw.value, sw.location()});

  const LipschitzEstimates L = lipschitz_for(c);
  const auto& bx = L.region;
  const std::string region = "x=" + format_double(bx.x[0].lo) + ".." + format_double(bx.x[0].hi) +
                             ";e=" + format_double(bx.e[0].lo) + ".." + format_double(bx.e[0].hi) +
                             ";d=" + format_double(d_range.lo) + ".." + format_double(d_range.hi) +
                             ";grid=" + std::to_string(L.grid_n);
  lines.push_back({"lipschitz_L1", std::isfinite(L.L1) && L.L1 > 0.0, L.L1, region});
  lines.push_back({"lipschitz_L2", std::isfinite(L.L2) && L.L2 > 0.0, L.L2, region});
  lines.push_back({"lipschitz_L3", std::isfinite(L.L3) && L.L3 > 0.0, L.L3, region});
  const DwellResult dw = dwell_for(c, L);
  lines.push_back({"dwell_bound", dw.tau > 0.0 && std::isfinite(dw.tau), dw.tau,
                   "a=" + format_double(dw.a) + ";b=" + format_double(dw.b)});

  // Monitors along the configured single run.
  const PolicySpec spec = policy_spec(c);
  HybridArc arc;
  const RunRecord rec = run_single(spec, {c.system.x0, c.system.d}, 0, bench_config(c), &arc);
  const std::string run_loc = "x0=" + format_double(c.system.x0) + ";d=" + format_double(c.system.d);
  if (auto mon = monitor_for(spec, bench_config(c))) {
    const auto rep = monitor_decrease(mon->R, arc, mon->alpha_R, kFlowTol);
    const double flow = std::max(rep.max_flow_violation, 0.0);
    const double jump = std::max(rep.max_jump_increment, 0.0);
    lines.push_back({"flow_decrease", flow <= kFlowTol, rep.max_flow_violation,
                     run_loc + ";t=" + format_double(rep.flow_violation_t)});
    lines.push_back({"jump_increment", jump <= kJumpTol, rep.max_jump_increment,
                     run_loc + ";t=" + format_double(rep.jump_increment_t)});
    lines.push_back({"envelope", rec.envelope_excess <= kEnvelopeTol, rec.envelope_excess,
                     run_loc + ";rate=" + format_double(mon->rate)});
    lines.push_back({"observed_dwell", rec.executions < 2 || rec.min_dwell >= dw.tau_inflated, rec.min_dwell,
                     run_loc + ";tau_inflated=" + format_double(dw.tau_inflated)});
  }
  lines.push_back({"post_jump_reset", rec.max_post_jump_abs_e == 0.0, rec.max_post_jump_abs_e, run_loc});

  auto os = open_out(out_path);
  bool all = true;
  for (const auto& l : lines) {
    os << l.name << ' ' << (l.pass ? "pass" : "fail") << ' ' << format_double(l.worst) << ' '
       << (l.location.empty() ? "-" : l.location) << '\n';
    all = all && l.pass;
  }
  if (!os) throw InvalidArgument("write failed for '" + out_path + "'");
  out << "certify: " << (all ? "all checks pass" : "some checks FAIL") << ", wrote " << out_path << '\n';
  return all ? kExitOk : kExitValidation;
}

int cmd_dwell(const Config& c, const std::string& out_path, std::ostream& out) {
  const LipschitzEstimates L = lipschitz_for(c);
  const DwellResult dw = dwell_for(c, L);
  std::ostringstream text;
  text << "tau " << format_double(dw.tau) << '\n'
       << "tau_inflated " << format_double(dw.tau_inflated) << '\n'
       << "a " << format_double(dw.a) << '\n'
       << "b " << format_double(dw.b) << '\n'
       << "L1 " << format_double(L.L1) << '\n'
       << "L2 " << format_double(L.L2) << '\n'
       << "L3 " << format_double(L.L3) << '\n';
  out << text.str();
  if (!out_path.empty()) {
    auto os = open_out(out_path);
    os << text.str();
    if (!os) throw InvalidArgument("write failed for '" + out_path + "'");
  }
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-triggered control: simulation, benchmarking and certification", "evtrig"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;

  auto add = [&](const char* name, const char* help, bool out_required) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file (defaults apply when omitted)");
    auto* o = sub->add_option("--out", out_path, "output file");
    if (out_required) o->required();
    return sub;
  };
  auto* simulate = add("simulate", "solve one closed-loop arc and write the trajectory CSV", true);
  auto* bench = add("bench", "run the paired Monte-Carlo benchmark and write the summary CSV", true);
  auto* certify = add("certify", "run the certificate checks and write the report", true);
  auto* dwell = add("dwell", "print the dwell-time lower bound of the configured policy", false);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    const Config c = load_config(config_path);
    if (simulate->parsed()) return cmd_simulate(c, out_path, out);
    if (bench->parsed()) return cmd_bench(c, out_path, out);
    if (certify->parsed()) return cmd_certify(c, out_path, out);
    if (dwell->parsed()) return cmd_dwell(c, out_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace evtrig
