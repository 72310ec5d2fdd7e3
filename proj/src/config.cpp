#include "evtrig/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "evtrig/trajectory_csv.hpp"

namespace evtrig {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

double parse_double(std::string_view key, std::string_view v, std::size_t line) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end || v.empty()) {
    throw TypeError(at_line(line, "'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'"), line);
  }
  if (!std::isfinite(out)) throw TypeError(at_line(line, "'" + std::string(key) + "' must be finite"), line);
  return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v, std::size_t line) {
  Int out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end || v.empty()) {
    throw TypeError(
        at_line(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'"),
        line);
  }
  return out;
}

using Setter = std::function<void(Config&, std::string_view, std::size_t)>;

template <class Section>
Setter real(Section Config::*sec, double Section::*field, std::string_view key) {
  return [=](Config& c, std::string_view v, std::size_t line) { (c.*sec).*field = parse_double(key, v, line); };
}

template <class Section, class Int>
Setter integer(Section Config::*sec, Int Section::*field, std::string_view key) {
  return [=](Config& c, std::string_view v, std::size_t line) { (c.*sec).*field = parse_int<Int>(key, v, line); };
}

const std::map<std::string, std::map<std::string, Setter>, std::less<>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>, std::less<>> s = {
      {"system",
       {{"model", [](Config& c, std::string_view v, std::size_t) { c.system.model = std::string(v); }},
        {"d", real(&Config::system, &SystemSection::d, "d")},
        {"x0", real(&Config::system, &SystemSection::x0, "x0")}}},
      {"policy",
       {{"kind",
         [](Config& c, std::string_view v, std::size_t line) {
           auto k = parse_policy_kind(v);
           if (!k) {
             throw TypeError(at_line(line, "'kind' must be one of iss, wl, eta_threshold, periodic; got '" +
                                               std::string(v) + "'"),
                             line);
           }
           c.policy.kind = *k;
         }},
        {"sigma", real(&Config::policy, &PolicySection::sigma, "sigma")},
        {"sigma_bar", real(&Config::policy, &PolicySection::sigma_bar, "sigma_bar")},
        {"epsilon", real(&Config::policy, &PolicySection::epsilon, "epsilon")},
        {"eta0", real(&Config::policy, &PolicySection::eta0, "eta0")},
        {"delta_gain", real(&Config::policy, &PolicySection::delta_gain, "delta_gain")},
        {"period", real(&Config::policy, &PolicySection::period, "period")}}},
      {"sim",
       {{"t_end", real(&Config::sim, &SimSection::t_end, "t_end")},
        {"h", real(&Config::sim, &SimSection::h, "h")},
        {"event_tol", real(&Config::sim, &SimSection::event_tol, "event_tol")},
        {"max_jumps", integer(&Config::sim, &SimSection::max_jumps, "max_jumps")}}},
      {"bench",
       {{"n_runs", integer(&Config::bench, &BenchSection::n_runs, "n_runs")},
        {"seed", integer(&Config::bench, &BenchSection::seed, "seed")},
        {"x0_min", real(&Config::bench, &BenchSection::x0_min, "x0_min")},
        {"x0_max", real(&Config::bench, &BenchSection::x0_max, "x0_max")},
        {"d_min", real(&Config::bench, &BenchSection::d_min, "d_min")},
        {"d_max", real(&Config::bench, &BenchSection::d_max, "d_max")}}},
  };
  return s;
}

}  // namespace

Config parse_config(std::string_view text) {
  Config c;
  const auto& sch = schema();
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(at_line(line_no, "unterminated section header"), line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      const auto it = sch.find(name);
      if (it == sch.end()) throw UnknownKey(at_line(line_no, "unknown section [" + std::string(name) + "]"), line_no);
      section = &it->second;
      section_name = it->first;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(at_line(line_no, "expected 'key = value'"), line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(at_line(line_no, "missing key"), line_no);
    if (!section) throw ParseError(at_line(line_no, "key outside of any section"), line_no);
    const auto it = section->find(std::string(key));
    if (it == section->end()) {
      throw UnknownKey(at_line(line_no, "unknown key '" + std::string(key) + "' in [" + section_name + "]"), line_no);
    }
    if (!seen.insert(section_name + "." + it->first).second) {
      throw ParseError(at_line(line_no, "duplicate key '" + std::string(key) + "'"), line_no);
    }
    it->second(c, value, line_no);
  }
  return c;
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  auto f = [](double v) { return format_double(v); };
  os << "[system]\n"
     << "model = " << c.system.model << '\n'
     << "d = " << f(c.system.d) << '\n'
     << "x0 = " << f(c.system.x0) << '\n'
     << "[policy]\n"
     << "kind = " << policy_kind_name(c.policy.kind) << '\n'
     << "sigma = " << f(c.policy.sigma) << '\n'
     << "sigma_bar = " << f(c.policy.sigma_bar) << '\n'
     << "epsilon = " << f(c.policy.epsilon) << '\n'
     << "eta0 = " << f(c.policy.eta0) << '\n'
     << "delta_gain = " << f(c.policy.delta_gain) << '\n'
     << "period = " << f(c.policy.period) << '\n'
     << "[sim]\n"
     << "t_end = " << f(c.sim.t_end) << '\n'
     << "h = " << f(c.sim.h) << '\n'
     << "event_tol = " << f(c.sim.event_tol) << '\n'
     << "max_jumps = " << c.sim.max_jumps << '\n'
     << "[bench]\n"
     << "n_runs = " << c.bench.n_runs << '\n'
     << "seed = " << c.bench.seed << '\n'
     << "x0_min = " << f(c.bench.x0_min) << '\n'
     << "x0_max = " << f(c.bench.x0_max) << '\n'
     << "d_min = " << f(c.bench.d_min) << '\n'
     << "d_max = " << f(c.bench.d_max) << '\n';
  return os.str();
}

void validate_config(const Config& c) {
  if (c.system.model != "example_vi") {
    throw InvalidArgument("unknown model '" + c.system.model + "' (available: example_vi)");
  }
  const auto& p = c.policy;
  if (!(p.sigma > 0.0 && p.sigma < 1.0)) throw InvalidArgument("policy.sigma must lie in (0, 1)");
  if (!(p.sigma_bar > 0.0 && p.sigma_bar < 1.0)) throw InvalidArgument("policy.sigma_bar must lie in (0, 1)");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw InvalidArgument("policy.epsilon must lie in (0, 1)");
  if (!(p.eta0 >= 0.0)) throw InvalidArgument("policy.eta0 must be >= 0");
  if (!(p.delta_gain > 0.0)) throw InvalidArgument("policy.delta_gain must be > 0");
  if (!(p.period > 0.0)) throw InvalidArgument("policy.period must be > 0");
  solver_config(c).validate();
  bench_config(c).validate();
}

SolverConfig solver_config(const Config& c) {
  SolverConfig s;
  s.t_end = c.sim.t_end;
  s.h = c.sim.h;
  s.event_tol = c.sim.event_tol;
  s.max_jumps = c.sim.max_jumps;
  return s;
}

PolicySpec policy_spec(const Config& c) {
  switch (c.policy.kind) {
    case PolicyKind::iss:
      return {PolicyKind::iss, c.policy.sigma};
    case PolicyKind::wl:
      return {PolicyKind::wl, c.policy.sigma_bar};
    case PolicyKind::eta_threshold:
      return {PolicyKind::eta_threshold, c.policy.eta0};
    case PolicyKind::periodic:
      return {PolicyKind::periodic, c.policy.period};
  }
  return {};
}

BenchConfig bench_config(const Config& c) {
  BenchConfig b;
  b.n_runs = c.bench.n_runs;
  b.seed = c.bench.seed;
  b.x0_range = {c.bench.x0_min, c.bench.x0_max};
  b.d_range = {c.bench.d_min, c.bench.d_max};
  b.solver = solver_config(c);
  b.sigma = c.policy.sigma;
  b.epsilon = c.policy.epsilon;
  b.delta_gain = c.policy.delta_gain;
  for (auto& spec : b.policies) {
    if (spec.kind == PolicyKind::wl) spec.param = c.policy.sigma_bar;
    if (spec.kind == PolicyKind::periodic) spec.param = c.policy.period;
  }
  return b;
}

}  // namespace evtrig
