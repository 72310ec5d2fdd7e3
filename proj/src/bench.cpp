#include "evtrig/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "evtrig/systems.hpp"
#include "evtrig/trajectory_csv.hpp"

namespace evtrig {

SplitMixDraw splitmix64_next(std::uint64_t state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return {z ^ (z >> 31), state};
}

std::vector<PolicySpec> table1_policies() {
  return {{PolicyKind::periodic, 0.368},
          {PolicyKind::wl, 1e-3},
          {PolicyKind::eta_threshold, 0.1},
          {PolicyKind::eta_threshold, 1.0},
          {PolicyKind::eta_threshold, 2.0}};
}

void BenchConfig::validate() const {
  if (n_runs < 1) throw InvalidArgument("bench: n_runs must be at least 1");
  if (!(x0_range.lo <= x0_range.hi) || !(d_range.lo <= d_range.hi)) {
    throw InvalidArgument("bench: sampling ranges must be nonempty");
  }
  if (policies.empty()) throw InvalidArgument("bench: no policies configured");
  solver.validate();
}

std::vector<InitialCondition> draw_conditions(const BenchConfig& cfg) {
  std::vector<InitialCondition> out(cfg.n_runs);
  std::uint64_t state = cfg.seed;
  auto uniform = [&state](Interval iv) {
    const auto draw = splitmix64_next(state);
    state = draw.state;
    return iv.lo + (iv.hi - iv.lo) * unit_double(draw.value);
  };
  for (auto& ic : out) {
    ic.x0 = uniform(cfg.x0_range);
    ic.d = uniform(cfg.d_range);
  }
  return out;
}

IssCertificate bench_certificate(const BenchConfig& cfg) { return example_vi_certificate(cfg.sigma); }

TriggerPolicy make_policy(const PolicySpec& spec, const BenchConfig& cfg, const SampledLoop& loop) {
  switch (spec.kind) {
    case PolicyKind::iss:
      return iss_policy(example_vi_certificate(spec.param));
    case PolicyKind::wl:
      return wl_policy(bench_certificate(cfg), {spec.param, std::nullopt, cfg.epsilon}, loop);
    case PolicyKind::eta_threshold:
      return eta_policy(bench_certificate(cfg), {ClassKFunction::linear(cfg.delta_gain), spec.param});
    case PolicyKind::periodic:
      return periodic_policy(spec.param);
  }
  throw InvalidArgument("bench: unknown policy kind");
}

std::optional<PolicyMonitor> monitor_for(const PolicySpec& spec, const BenchConfig& cfg) {
  switch (spec.kind) {
    case PolicyKind::iss: {
      auto cert = example_vi_certificate(spec.param);
      auto alpha_R = cert.alpha().scaled(1.0 - cert.sigma());
      const double rate = alpha_R.linear_gain().value_or(std::nan(""));
      return PolicyMonitor{CompositeLyapunov(CompositeVariant::iss_max, cert), alpha_R, rate};
    }
    case PolicyKind::wl: {
      auto cert = bench_certificate(cfg);
      const double rate = spec.param * cert.alpha().linear_gain().value();
      return PolicyMonitor{CompositeLyapunov(CompositeVariant::wl_max, cert), ClassKFunction::linear(rate), rate};
    }
    case PolicyKind::eta_threshold: {
      auto cert = bench_certificate(cfg);
      auto alpha_R = ClassKFunction::pointwise_min(cert.alpha().scaled(1.0 - cert.sigma()),
                                                   ClassKFunction::linear(cfg.delta_gain));
      const double rate = alpha_R.linear_gain().value_or(std::nan(""));
      return PolicyMonitor{CompositeLyapunov(CompositeVariant::eta_max, cert), alpha_R, rate};
    }
    case PolicyKind::periodic:
      return std::nullopt;
  }
  return std::nullopt;
}

RunRecord run_single(const PolicySpec& spec, const InitialCondition& ic, std::size_t index,
                     const BenchConfig& cfg, HybridArc* arc_out) {
  const SampledLoop loop = example_vi_loop(ic.d);
  const TriggerPolicy policy = make_policy(spec, cfg, loop);
  const HybridSystemDef sys = closed_loop(loop, policy);
  const double x0[] = {ic.x0};
  HybridArc arc = solve(sys, initial_state(loop, policy, x0), cfg.solver);

  RunRecord rec;
  rec.run_index = index;
  rec.x0 = ic.x0;
  rec.d = ic.d;
  rec.executions = arc.executions();
  rec.min_dwell = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < arc.jumps.size(); ++k) {
    rec.min_dwell = std::min(rec.min_dwell, arc.jumps[k].t - arc.jumps[k - 1].t);
  }
  rec.final_abs_x = norm(arc.final_state().x());
  for (const auto& jr : arc.jumps) rec.max_post_jump_abs_e = std::max(rec.max_post_jump_abs_e, norm(jr.after.e()));
  for (const auto& iv : arc.intervals) {
    for (const auto& s : iv.samples) {
      rec.max_abs_x = std::max(rec.max_abs_x, norm(s.q.x()));
      rec.max_abs_e = std::max(rec.max_abs_e, norm(s.q.e()));
    }
  }
  if (auto mon = monitor_for(spec, cfg)) {
    const auto rep = monitor_decrease(mon->R, arc, mon->alpha_R, 1e-4);
    rec.max_flow_violation = rep.max_flow_violation;
    rec.max_jump_violation = rep.max_jump_increment;
    rec.envelope_excess = std::isnan(mon->rate) ? std::nan("") : envelope_excess(mon->R, arc, mon->rate);
  } else {
    rec.max_flow_violation = rec.max_jump_violation = rec.envelope_excess = std::nan("");
  }
  if (arc_out) *arc_out = std::move(arc);
  return rec;
}

namespace {

// NaN-propagating max.
double nmax(double a, double b) { return (std::isnan(a) || std::isnan(b)) ? std::nan("") : std::max(a, b); }

std::string describe(const PolicySpec& spec) {
  return std::string(policy_kind_name(spec.kind)) + "(" + format_double(spec.param) + ")";
}

}  // namespace

BenchResult run_table1(const BenchConfig& cfg) {
  cfg.validate();
  BenchResult result;
  result.conditions = draw_conditions(cfg);
  const std::size_t n_pol = cfg.policies.size();
  const std::size_t n = cfg.n_runs;
  const std::size_t jobs = n_pol * n;
  result.runs.assign(n_pol, std::vector<RunRecord>(n));
  std::vector<std::exception_ptr> errors(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      const std::size_t p = k / n;
      const std::size_t i = k % n;
      try {
        result.runs[p][i] = run_single(cfg.policies[p], result.conditions[i], i, cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < jobs; ++k) {
    if (!errors[k]) continue;
    const std::size_t p = k / n;
    const std::size_t i = k % n;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& ex) {
      what = ex.what();
    }
    std::ostringstream os;
    os << "bench run " << i << " failed for policy " << describe(cfg.policies[p])
       << " (x0 = " << format_double(result.conditions[i].x0) << ", d = " << format_double(result.conditions[i].d)
       << ", seed = " << cfg.seed << ", n_runs = " << cfg.n_runs << ", t_end = " << format_double(cfg.solver.t_end)
       << ", h = " << format_double(cfg.solver.h) << "): " << what;
    throw BenchRunError(os.str());
  }

  for (std::size_t p = 0; p < n_pol; ++p) {
    PolicySummary s;
    s.spec = cfg.policies[p];
    s.min_dwell = std::numeric_limits<double>::infinity();
    s.max_flow_violation = s.max_jump_violation = s.max_envelope_excess = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& r : result.runs[p]) {
      total += static_cast<double>(r.executions);
      s.min_dwell = std::min(s.min_dwell, r.min_dwell);
      s.max_flow_violation = nmax(s.max_flow_violation, r.max_flow_violation);
      s.max_jump_violation = nmax(s.max_jump_violation, r.max_jump_violation);
      s.max_envelope_excess = nmax(s.max_envelope_excess, r.envelope_excess);
      s.max_final_abs_x = std::max(s.max_final_abs_x, r.final_abs_x);
      s.max_post_jump_abs_e = std::max(s.max_post_jump_abs_e, r.max_post_jump_abs_e);
      s.max_abs_x = std::max(s.max_abs_x, r.max_abs_x);
      s.max_abs_e = std::max(s.max_abs_e, r.max_abs_e);
    }
    s.avg_executions = total / static_cast<double>(n);
    result.summary.policies.push_back(s);
  }
  return result;
}

void write_summary_csv(std::ostream& os, const BenchSummary& summary, std::string_view comment) {
  if (!comment.empty()) write_comment_block(os, comment);
  os << kSummaryHeader << '\n';
  for (const auto& s : summary.policies) {
    os << policy_kind_name(s.spec.kind) << ',' << format_double(s.spec.param) << ','
       << format_double(s.avg_executions) << ',' << format_double(s.min_dwell) << ','
       << format_double(s.max_flow_violation) << ',' << format_double(s.max_jump_violation) << ','
       << format_double(s.max_final_abs_x) << '\n';
  }
}

}  // namespace evtrig
