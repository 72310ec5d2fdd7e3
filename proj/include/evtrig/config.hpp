#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "evtrig/bench.hpp"
#include "evtrig/errors.hpp"
#include "evtrig/hybrid.hpp"
#include "evtrig/policies.hpp"

namespace evtrig {

struct SystemSection {
  std::string model = "example_vi";
  double d = 0.5;
  double x0 = 0.5;
  friend bool operator==(const SystemSection&, const SystemSection&) = default;
};

struct PolicySection {
  PolicyKind kind = PolicyKind::eta_threshold;
  double sigma = 0.5;
  double sigma_bar = 1e-3;
  double epsilon = 1e-6;
  double eta0 = 1.0;
  double delta_gain = 0.5;
  double period = 0.368;
  friend bool operator==(const PolicySection&, const PolicySection&) = default;
};

struct SimSection {
  double t_end = 20.0;
  double h = 1e-3;
  double event_tol = 1e-9;
  std::size_t max_jumps = 100000;
  friend bool operator==(const SimSection&, const SimSection&) = default;
};

struct BenchSection {
  std::size_t n_runs = 200;
  std::uint64_t seed = 42;
  double x0_min = -1.0;
  double x0_max = 1.0;
  double d_min = 0.0;
  double d_max = 1.0;
  friend bool operator==(const BenchSection&, const BenchSection&) = default;
};

struct Config {
  SystemSection system;
  PolicySection policy;
  SimSection sim;
  BenchSection bench;
  friend bool operator==(const Config&, const Config&) = default;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  /// 1-based; 0 when the problem is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class UnknownKey : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class TypeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

Config parse_config(std::string_view text);
/// Every key of every section, in grammar order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& c);

/// Semantic checks beyond typing (positive step, ordered ranges, known model ...).
void validate_config(const Config& c);

SolverConfig solver_config(const Config& c);
/// The configured policy's column spec (param per kind).
PolicySpec policy_spec(const Config& c);
/// Benchmark column set with the configured sigma_bar and period.
BenchConfig bench_config(const Config& c);

}  // namespace evtrig
