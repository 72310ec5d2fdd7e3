#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtrig/certificate.hpp"
#include "evtrig/class_k.hpp"
#include "evtrig/hybrid.hpp"
#include "evtrig/systems.hpp"

namespace evtrig {

enum class PolicyKind { iss, wl, eta_threshold, periodic };

std::string_view policy_kind_name(PolicyKind k);
std::optional<PolicyKind> parse_policy_kind(std::string_view s);

/// Writes the auxiliary-variable derivative (flow) or reset value (jump) into out.
using EtaMap = std::function<void(const HybridState&, std::span<double>)>;

/// Flow set C = {flow_guard <= 0}, jump set D = {jump_guard >= 0}, and the
/// auxiliary dynamics eta' = eta_flow(q), eta+ = eta_jump(q).
struct TriggerPolicy {
  PolicyKind kind = PolicyKind::iss;
  std::size_t n_eta = 0;
  Guard flow_guard;
  Guard jump_guard;
  EtaMap eta_flow;
  EtaMap eta_jump;
  std::vector<double> eta_initial;
};

class NonlinearAlphaError : public Error {
 public:
  using Error::Error;
};

struct WlPolicyParams {
  double sigma_bar = 1e-3;
  /// Decay rate of the linear alpha. Defaults to the certificate's gain; may be
  /// smaller (the dissipation inequality still holds) but not larger.
  std::optional<double> alpha_bar;
  double epsilon = 1e-6;
};

struct EtaPolicyParams {
  ClassKFunction delta = ClassKFunction::linear(0.5);
  double eta0 = 1.0;
};

/// Trigger when gamma_tilde(|e|) >= V(x).
TriggerPolicy iss_policy(const IssCertificate& cert);

/// Decreasing threshold on V: flow while V(x) <= eta V(x + e), eta' = -sigma_bar alpha_bar, eta+ = 1.
/// Jumps on D1 = {V(x) >= eta V(x+e) and dV/dx f >= -sigma_bar alpha_bar V(x)} or D2 = {eta <= eps}.
TriggerPolicy wl_policy(const IssCertificate& cert, const WlPolicyParams& p, const SampledLoop& loop);

/// Trigger when W(e) >= max{eta, V(x)}, eta' = -delta(eta), eta+ = W(e).
TriggerPolicy eta_policy(const IssCertificate& cert, const EtaPolicyParams& p);

/// Clock eta' = 1, reset to 0, jump when eta >= T.
TriggerPolicy periodic_policy(double period);

/// Closed loop of a sampled loop under a trigger policy: x+ = x, e+ = 0.
HybridSystemDef closed_loop(const SampledLoop& loop, const TriggerPolicy& policy);

/// q0 = (x0, 0, eta_initial).
HybridState initial_state(const SampledLoop& loop, const TriggerPolicy& policy, std::span<const double> x0);

}  // namespace evtrig
