#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "evtrig/certificate.hpp"
#include "evtrig/hybrid.hpp"
#include "evtrig/policies.hpp"

namespace evtrig {

// ---------------------------------------------------------------------------
// SplitMix64

struct SplitMixDraw {
  std::uint64_t value = 0;
  std::uint64_t state = 0;
};

SplitMixDraw splitmix64_next(std::uint64_t state);

/// Top 53 bits scaled into [0, 1).
inline double unit_double(std::uint64_t value) {
  return static_cast<double>(value >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------

/// One benchmark column. `param` is sigma_bar (wl), eta0 (eta_threshold),
/// T (periodic) or sigma (iss).
struct PolicySpec {
  PolicyKind kind = PolicyKind::eta_threshold;
  double param = 1.0;
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Periodic T = 0.368, wl sigma_bar = 1e-3, eta_threshold eta0 = 0.1, 1, 2.
std::vector<PolicySpec> table1_policies();

struct BenchConfig {
  std::size_t n_runs = 200;
  std::uint64_t seed = 42;
  Interval x0_range{-1.0, 1.0};
  Interval d_range{0.0, 1.0};
  std::vector<PolicySpec> policies = table1_policies();
  SolverConfig solver{};  // t_end defaults to 20 s
  double sigma = 0.5;
  double epsilon = 1e-6;
  double delta_gain = 0.5;
  /// Worker threads; 0 picks hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

struct InitialCondition {
  double x0 = 0.0;
  double d = 0.0;
};

/// Run i takes x0 from draw 2i and d from draw 2i+1 of the seeded stream.
std::vector<InitialCondition> draw_conditions(const BenchConfig& cfg);

struct RunRecord {
  std::size_t run_index = 0;
  double x0 = 0.0;
  double d = 0.0;
  std::size_t executions = 0;
  /// Smallest gap between consecutive jumps; +inf with fewer than two jumps.
  double min_dwell = 0.0;
  double final_abs_x = 0.0;
  /// From monitor_decrease; NaN for policies without a Lyapunov certificate.
  double max_flow_violation = 0.0;
  double max_jump_violation = 0.0;
  double envelope_excess = 0.0;
  /// max |e| right after a jump (0 exactly when resets are exact).
  double max_post_jump_abs_e = 0.0;
  double max_abs_x = 0.0;
  double max_abs_e = 0.0;
};

struct PolicySummary {
  PolicySpec spec;
  double avg_executions = 0.0;
  double min_dwell = 0.0;
  double max_flow_violation = 0.0;
  double max_jump_violation = 0.0;
  double max_final_abs_x = 0.0;
  double max_envelope_excess = 0.0;
  double max_post_jump_abs_e = 0.0;
  double max_abs_x = 0.0;
  double max_abs_e = 0.0;
};

struct BenchSummary {
  std::vector<PolicySummary> policies;
};

struct BenchResult {
  BenchSummary summary;
  std::vector<InitialCondition> conditions;
  /// runs[p][i]: policy p, run i.
  std::vector<std::vector<RunRecord>> runs;
};

class BenchRunError : public Error {
 public:
  using Error::Error;
};

/// Composite Lyapunov function, decrease rate and exponential envelope rate for a column.
struct PolicyMonitor {
  CompositeLyapunov R;
  ClassKFunction alpha_R;
  double rate = 0.0;
};

IssCertificate bench_certificate(const BenchConfig& cfg);
TriggerPolicy make_policy(const PolicySpec& spec, const BenchConfig& cfg, const SampledLoop& loop);
std::optional<PolicyMonitor> monitor_for(const PolicySpec& spec, const BenchConfig& cfg);

/// Solves one run and fills its record. The arc is returned through `arc_out` when given.
RunRecord run_single(const PolicySpec& spec, const InitialCondition& ic, std::size_t index,
                     const BenchConfig& cfg, HybridArc* arc_out = nullptr);

/// Paired Monte-Carlo over all policies; aggregation in run-index order.
BenchResult run_table1(const BenchConfig& cfg);

inline constexpr std::string_view kSummaryHeader =
    "policy,param,avg_executions,min_dwell,max_flow_violation,max_jump_violation,max_final_abs_x";

void write_summary_csv(std::ostream& os, const BenchSummary& summary, std::string_view comment = {});

}  // namespace evtrig
