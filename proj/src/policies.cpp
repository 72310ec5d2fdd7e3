#include "evtrig/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

namespace evtrig {

std::string_view policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::iss: return "iss";
    case PolicyKind::wl: return "wl";
    case PolicyKind::eta_threshold: return "eta_threshold";
    case PolicyKind::periodic: return "periodic";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view s) {
  for (auto k : {PolicyKind::iss, PolicyKind::wl, PolicyKind::eta_threshold, PolicyKind::periodic}) {
    if (policy_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

TriggerPolicy iss_policy(const IssCertificate& cert) {
  auto c = std::make_shared<const IssCertificate>(cert);
  TriggerPolicy p;
  p.kind = PolicyKind::iss;
  p.n_eta = 0;
  Guard g = [c](const HybridState& q) { return c->W(q.e()) - c->V(q.x()); };
  p.flow_guard = g;
  p.jump_guard = g;
  p.eta_flow = [](const HybridState&, std::span<double>) {};
  p.eta_jump = [](const HybridState&, std::span<double>) {};
  return p;
}

TriggerPolicy wl_policy(const IssCertificate& cert, const WlPolicyParams& params, const SampledLoop& loop) {
  const auto gain = cert.alpha().linear_gain();
  if (!gain) throw NonlinearAlphaError("wl_policy: the certificate's alpha must be linear");
  const double alpha_bar = params.alpha_bar.value_or(*gain);
  if (!(alpha_bar > 0.0) || alpha_bar > *gain) {
    throw InvalidArgument("wl_policy: alpha_bar must lie in (0, certificate gain]");
  }
  if (!(params.sigma_bar > 0.0 && params.sigma_bar < 1.0)) {
    throw InvalidArgument("wl_policy: sigma_bar must lie in (0, 1)");
  }
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw InvalidArgument("wl_policy: epsilon must lie in (0, 1)");
  }
  if (loop.nx() != loop.ne()) throw DimensionError("wl_policy: needs x and e of equal dimension");

  const double rate = params.sigma_bar * alpha_bar;
  const double eps = params.epsilon;
  auto c = std::make_shared<const IssCertificate>(cert);
  auto l = std::make_shared<const SampledLoop>(loop);

  // V(x) - eta V(x + e)
  auto threshold_gap = [c](const HybridState& q) {
    std::array<double, kMaxStateDim> s{};
    const auto x = q.x();
    const auto e = q.e();
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] + e[i];
    return c->V(x) - q.eta()[0] * c->V(std::span<const double>(s.data(), x.size()));
  };

  TriggerPolicy p;
  p.kind = PolicyKind::wl;
  p.n_eta = 1;
  p.flow_guard = [threshold_gap, eps](const HybridState& q) {
    const double eta = q.eta()[0];
    return std::max({threshold_gap(q), eta - 1.0, eps - eta});
  };
  p.jump_guard = [threshold_gap, c, l, rate, eps](const HybridState& q) {
    std::array<double, kMaxStateDim> xdot{};
    std::array<double, kMaxStateDim> edot{};
    const std::size_t nx = q.dims().nx;
    l->composed_flow(q.x(), q.e(), {xdot.data(), nx}, {edot.data(), q.dims().ne});
    const double decay = c->lie_derivative(q.x(), {xdot.data(), nx}) + rate * c->V(q.x());
    return std::max(std::min(threshold_gap(q), decay), eps - q.eta()[0]);
  };
  p.eta_flow = [rate](const HybridState&, std::span<double> out) { out[0] = -rate; };
  p.eta_jump = [](const HybridState&, std::span<double> out) { out[0] = 1.0; };
  p.eta_initial = {1.0};
  return p;
}

TriggerPolicy eta_policy(const IssCertificate& cert, const EtaPolicyParams& params) {
  if (!(params.eta0 >= 0.0) || !std::isfinite(params.eta0)) {
    throw InvalidArgument("eta_policy: eta0 must be a finite nonnegative number");
  }
  auto c = std::make_shared<const IssCertificate>(cert);
  const ClassKFunction delta = params.delta;

  TriggerPolicy p;
  p.kind = PolicyKind::eta_threshold;
  p.n_eta = 1;
  p.flow_guard = [c](const HybridState& q) {
    const double eta = q.eta()[0];
    return std::max(c->W(q.e()) - std::max(c->V(q.x()), eta), -eta);
  };
  p.jump_guard = [c](const HybridState& q) {
    const double eta = q.eta()[0];
    return std::min(c->W(q.e()) - std::max(c->V(q.x()), eta), eta);
  };
  p.eta_flow = [delta](const HybridState& q, std::span<double> out) { out[0] = -delta(q.eta()[0]); };
  p.eta_jump = [c](const HybridState& q, std::span<double> out) { out[0] = c->W(q.e()); };
  p.eta_initial = {params.eta0};
  return p;
}

TriggerPolicy periodic_policy(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("periodic_policy: T must be positive");
  TriggerPolicy p;
  p.kind = PolicyKind::periodic;
  p.n_eta = 1;
  Guard g = [period](const HybridState& q) { return q.eta()[0] - period; };
  p.flow_guard = g;
  p.jump_guard = g;
  p.eta_flow = [](const HybridState&, std::span<double> out) { out[0] = 1.0; };
  p.eta_jump = [](const HybridState&, std::span<double> out) { out[0] = 0.0; };
  p.eta_initial = {0.0};
  return p;
}

HybridSystemDef closed_loop(const SampledLoop& loop, const TriggerPolicy& policy) {
  const StateDims dims{loop.nx(), loop.ne(), policy.n_eta};
  if (dims.total() > kMaxStateDim) throw DimensionError("closed_loop: state too large");
  auto l = std::make_shared<const SampledLoop>(loop);
  auto eta_flow = policy.eta_flow;
  auto eta_jump = policy.eta_jump;

  HybridSystemDef sys;
  sys.dims = dims;
  sys.flow_map = [l, eta_flow](const HybridState& q) {
    HybridState dq(q.dims());
    l->composed_flow(q.x(), q.e(), dq.x(), dq.e());
    if (q.dims().neta > 0) eta_flow(q, dq.eta());
    return dq;
  };
  sys.jump_map = [eta_jump](const HybridState& q) {
    HybridState next = q;
    std::fill(next.e().begin(), next.e().end(), 0.0);
    if (q.dims().neta > 0) eta_jump(q, next.eta());
    return next;
  };
  sys.flow_guard = policy.flow_guard;
  sys.jump_guard = policy.jump_guard;
  return sys;
}

HybridState initial_state(const SampledLoop& loop, const TriggerPolicy& policy, std::span<const double> x0) {
  if (x0.size() != loop.nx()) throw DimensionError("initial_state: x0 has the wrong dimension");
  if (policy.eta_initial.size() != policy.n_eta) {
    throw DimensionError("initial_state: policy initial eta has the wrong dimension");
  }
  const std::vector<double> e0(loop.ne(), 0.0);
  return HybridState({loop.nx(), loop.ne(), policy.n_eta}, x0, e0, policy.eta_initial);
}

}  // namespace evtrig
