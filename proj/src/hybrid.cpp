#include "evtrig/hybrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace evtrig {

bool HybridState::all_finite() const {
  return std::all_of(values().begin(), values().end(), [](double v) { return std::isfinite(v); });
}

bool HybridState::bit_equal(const HybridState& other) const {
  if (!(dims_ == other.dims_)) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::bit_cast<std::uint64_t>(v_[i]) != std::bit_cast<std::uint64_t>(other.v_[i])) {
      return false;
    }
  }
  return true;
}

double norm(std::span<const double> v) {
  if (v.size() == 1) return std::abs(v[0]);
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

bool HybridTimeDomain::well_formed() const {
  if (intervals.empty()) return false;
  if (intervals.front().t_start != 0.0 || intervals.front().j != 0) return false;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const auto& iv = intervals[k];
    if (!(iv.t_start <= iv.t_end) || iv.t_start < 0.0) return false;
    if (k > 0) {
      const auto& prev = intervals[k - 1];
      if (iv.t_start != prev.t_end || iv.j != prev.j + 1) return false;
    }
  }
  return true;
}

void SolverConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("solver: h must be positive");
  if (!(event_tol > 0.0) || !(event_tol < h)) {
    throw InvalidArgument("solver: event_tol must satisfy 0 < event_tol < h");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("solver: t_end must be positive");
  if (max_jumps < 1) throw InvalidArgument("solver: max_jumps must be at least 1");
  if (!(guard_tol >= 0.0)) throw InvalidArgument("solver: guard_tol must be nonnegative");
}

HybridTimeDomain HybridArc::domain() const {
  HybridTimeDomain d;
  d.intervals.reserve(intervals.size());
  for (const auto& iv : intervals) d.intervals.push_back({iv.t_start, iv.t_end, iv.j});
  return d;
}

namespace {

HybridState eval_flow(const FlowMap& f, const HybridState& q, int stage) {
  HybridState dq = f(q);
  if (dq.size() != q.size()) throw DimensionError("flow map changed the state dimension");
  if (!dq.all_finite()) {
    throw NonFiniteDynamics("non-finite flow value at RK4 stage " + std::to_string(stage), q, stage);
  }
  return dq;
}

// out = q + a * k
HybridState axpy(const HybridState& q, double a, const HybridState& k) {
  HybridState out = q;
  auto o = out.values();
  auto kv = k.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * kv[i];
  return out;
}

}  // namespace

HybridState rk4_step(const FlowMap& flow_map, const HybridState& q, double h) {
  if (!(h > 0.0)) throw InvalidArgument("rk4_step: h must be positive");
  const HybridState k1 = eval_flow(flow_map, q, 1);
  const HybridState k2 = eval_flow(flow_map, axpy(q, 0.5 * h, k1), 2);
  const HybridState k3 = eval_flow(flow_map, axpy(q, 0.5 * h, k2), 3);
  const HybridState k4 = eval_flow(flow_map, axpy(q, h, k3), 4);

  HybridState out = q;
  auto o = out.values();
  const double w = h / 6.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

namespace {

// Probes longer than this are integrated in equal RK4 substeps.
constexpr double kMaxProbeStep = 1e-3;

HybridState integrate(const FlowMap& flow_map, const HybridState& q, double s, std::size_t substeps) {
  if (substeps == 1) return rk4_step(flow_map, q, s);
  HybridState out = q;
  const double dt = s / static_cast<double>(substeps);
  for (std::size_t k = 0; k < substeps; ++k) out = rk4_step(flow_map, out, dt);
  return out;
}

EventHit bisect_event(const FlowMap& flow_map, const Guard& jump_guard, const HybridState& q_left, double t_left,
                      double h, double event_tol, double guard_tol, std::size_t substeps) {
  if (!(h > 0.0)) throw InvalidArgument("locate_event: h must be positive");
  if (!(event_tol > 0.0)) throw InvalidArgument("locate_event: event_tol must be positive");
  const double g_left = jump_guard(q_left);
  if (!(g_left < 0.0)) {
    throw BracketError("locate_event: jump guard is already nonnegative at the left end");
  }
  const double overshoot_tol = guard_tol * -g_left;
  HybridState q_hi = integrate(flow_map, q_left, h, substeps);
  double g_hi = jump_guard(q_hi);
  if (!(g_hi >= 0.0)) {
    throw BracketError("locate_event: no sign change of the jump guard over the step");
  }
  double lo = 0.0;
  double hi = h;
  // Narrow until the bracket is event_tol wide and the guard overshoot is below
  // guard_tol relative to the guard at the left end.
  while (hi - lo > event_tol || g_hi > overshoot_tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    HybridState q_mid = integrate(flow_map, q_left, mid, substeps);
    const double g_mid = jump_guard(q_mid);
    if (g_mid >= 0.0) {
      hi = mid;
      q_hi = q_mid;
      g_hi = g_mid;
    } else {
      lo = mid;
    }
  }
  return {t_left + hi, q_hi};
}

}  // namespace

EventHit locate_event(const FlowMap& flow_map, const Guard& jump_guard, const HybridState& q_left,
                      double t_left, double h, double event_tol, double guard_tol) {
  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(h / kMaxProbeStep)));
  return bisect_event(flow_map, jump_guard, q_left, t_left, h, event_tol, guard_tol, substeps);
}

HybridArc solve(const HybridSystemDef& sys, const HybridState& q0, const SolverConfig& cfg) {
  cfg.validate();
  if (!(q0.dims() == sys.dims)) throw DimensionError("solve: initial state dimensions mismatch");
  if (!q0.all_finite()) throw NonFiniteDynamics("solve: non-finite initial state", q0, 0);

  HybridState q = q0;
  double t = 0.0;
  if (!(sys.flow_guard(q) <= cfg.guard_tol || sys.jump_guard(q) >= -cfg.guard_tol)) {
    throw DeadState("solve: initial state is in neither the flow set nor the jump set", t, q);
  }

  HybridArc arc;
  arc.intervals.push_back({0.0, 0.0, 0, {{0.0, q}}});

  while (true) {
    // Jump priority on C ∩ D.
    if (sys.jump_guard(q) >= 0.0) {
      if (arc.jumps.size() >= cfg.max_jumps) {
        throw MaxJumpsExceeded("solve: more than " + std::to_string(cfg.max_jumps) +
                                   " jumps before t = " + std::to_string(t),
                               t);
      }
      HybridState after = sys.jump_map(q);
      if (!(after.dims() == sys.dims)) throw DimensionError("jump map changed the state dimension");
      if (!after.all_finite()) throw NonFiniteDynamics("non-finite jump map value", q, 0);
      auto& cur = arc.intervals.back();
      cur.t_end = t;
      arc.jumps.push_back({t, cur.j, q, after});
      arc.intervals.push_back({t, t, cur.j + 1, {{t, after}}});
      q = after;
      continue;
    }
    if (t >= cfg.t_end) break;

    const double remaining = cfg.t_end - t;
    const bool last = remaining <= cfg.h;
    const double step = last ? remaining : cfg.h;
    HybridState next = rk4_step(sys.flow_map, q, step);
    if (sys.jump_guard(next) >= 0.0) {
      // Single-step probes, consistent with the step that detected the crossing.
      EventHit hit = bisect_event(sys.flow_map, sys.jump_guard, q, t, step, cfg.event_tol, cfg.guard_tol, 1);
      t = (last && hit.t > cfg.t_end) ? cfg.t_end : hit.t;
      q = hit.q;
    } else {
      if (sys.flow_guard(next) > cfg.guard_tol) {
        throw DeadState("solve: state left the flow set without reaching the jump set", t + step, next);
      }
      t = last ? cfg.t_end : t + step;
      q = next;
    }
    arc.intervals.back().samples.push_back({t, q});
  }
  arc.intervals.back().t_end = t;
  return arc;
}

}  // namespace evtrig
