#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "evtrig/errors.hpp"
#include "evtrig/state.hpp"

namespace evtrig {

using FlowMap = std::function<HybridState(const HybridState&)>;
using JumpMap = std::function<HybridState(const HybridState&)>;
using Guard = std::function<double(const HybridState&)>;

/// A flow value (or jump value) was NaN or infinite.
class NonFiniteDynamics : public Error {
 public:
  NonFiniteDynamics(const std::string& what, HybridState state, int stage)
      : Error(what), state_(state), stage_(stage) {}
  const HybridState& state() const { return state_; }
  /// RK4 stage index 1..4, or 0 for a jump map evaluation.
  int stage() const { return stage_; }

 private:
  HybridState state_;
  int stage_;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class MaxJumpsExceeded : public Error {
 public:
  MaxJumpsExceeded(const std::string& what, double t) : Error(what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// The state is neither in C nor in D.
class DeadState : public Error {
 public:
  DeadState(const std::string& what, double t, HybridState state)
      : Error(what), t_(t), state_(state) {}
  double t() const { return t_; }
  const HybridState& state() const { return state_; }

 private:
  double t_;
  HybridState state_;
};

struct HybridTime {
  double t = 0.0;
  std::size_t j = 0;
};

struct DomainInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t j = 0;
};

/// Ordered ([t_j, t_{j+1}], j) pieces of a hybrid time domain.
struct HybridTimeDomain {
  std::vector<DomainInterval> intervals;

  /// Consecutive intervals share endpoints, j increments by one, times are nondecreasing.
  bool well_formed() const;
  double horizon() const { return intervals.empty() ? 0.0 : intervals.back().t_end; }
};

/// Flow map F, jump map G, and the two guards. flow_guard(q) <= 0 means q in C,
/// jump_guard(q) >= 0 means q in D.
struct HybridSystemDef {
  StateDims dims;
  FlowMap flow_map;
  JumpMap jump_map;
  Guard flow_guard;
  Guard jump_guard;
};

struct SolverConfig {
  double h = 1e-3;
  double event_tol = 1e-9;
  double t_end = 20.0;
  std::size_t max_jumps = 100000;
  double guard_tol = 1e-9;

  /// Throws InvalidArgument unless h > 0, 0 < event_tol < h, t_end > 0, max_jumps >= 1.
  void validate() const;
};

struct FlowSample {
  double t = 0.0;
  HybridState q;
};

struct JumpRecord {
  double t = 0.0;
  std::size_t j = 0;  // jump counter before the jump
  HybridState before;
  HybridState after;
};

struct ArcInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t j = 0;
  std::vector<FlowSample> samples;
};

/// One solution on a hybrid time domain: sampled flow pieces plus jump records.
struct HybridArc {
  std::vector<ArcInterval> intervals;
  std::vector<JumpRecord> jumps;

  std::size_t executions() const { return jumps.size(); }
  HybridTimeDomain domain() const;
  /// Last sampled state (after any terminal jump).
  const HybridState& final_state() const { return intervals.back().samples.back().q; }
};

/// Classical fourth-order Runge-Kutta step.
HybridState rk4_step(const FlowMap& flow_map, const HybridState& q, double h);

struct EventHit {
  double t = 0.0;
  HybridState q;
};

/// Bisection on the step length so that the bracket around the zero of jump_guard
/// is at most event_tol wide and jump_guard at its right end is at most
/// guard_tol * |jump_guard(q_left)| (relative, so rescaled guards give the same times).
/// Each probe re-integrates from q_left (in RK4 substeps of at most 1e-3 s). The
/// returned state is the right end of the final bracket, so jump_guard(q) >= 0.
EventHit locate_event(const FlowMap& flow_map, const Guard& jump_guard, const HybridState& q_left,
                      double t_left, double h, double event_tol, double guard_tol = 1e-9);

/// Fixed-step RK4 with event localization and jump priority on C ∩ D.
HybridArc solve(const HybridSystemDef& sys, const HybridState& q0, const SolverConfig& cfg);

}  // namespace evtrig
