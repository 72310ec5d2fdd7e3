#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtrig/class_k.hpp"
#include "evtrig/hybrid.hpp"
#include "evtrig/kernels.hpp"
#include "evtrig/systems.hpp"

namespace evtrig {

using ScalarField = std::function<double(std::span<const double>)>;
using GradientField = std::function<void(std::span<const double>, std::span<double>)>;

/// Pieces of an ISS-Lyapunov certificate for xdot = f(x, e):
///   lower(|x|) <= V(x) <= upper(|x|),  dV/dx f(x, e) <= -alpha(V(x)) + gamma(|e|).
struct IssCertificateParts {
  ScalarField V;
  GradientField grad_V;  // optional; central differences otherwise
  ClassKFunction alpha_v_lower;
  ClassKFunction alpha_v_upper;
  ClassKFunction alpha;
  ClassKFunction gamma;
  double sigma = 0.5;
  /// Set when V(x) = c |x|^2; enables the batched grid kernels.
  std::optional<double> quadratic_coeff;
};

class IssCertificate {
 public:
  explicit IssCertificate(IssCertificateParts parts);

  /// V(x) = c |x|^2 with alpha_V bounds c s^2.
  static IssCertificate quadratic(double c, ClassKFunction alpha, ClassKFunction gamma, double sigma);

  double V(std::span<const double> x) const { return parts_.V(x); }
  /// Analytic when available, else central differences with step 1e-6.
  void grad_V(std::span<const double> x, std::span<double> out) const;
  bool has_analytic_gradient() const { return static_cast<bool>(parts_.grad_V); }

  /// dV/dx(x) . v
  double lie_derivative(std::span<const double> x, std::span<const double> v) const;

  /// gamma_tilde(s) = alpha^{-1}(gamma(s) / sigma).
  const ClassKFunction& gamma_tilde() const { return gamma_tilde_; }
  /// W(e) = gamma_tilde(|e|).
  double W(std::span<const double> e) const;

  const ClassKFunction& alpha_v_lower() const { return parts_.alpha_v_lower; }
  const ClassKFunction& alpha_v_upper() const { return parts_.alpha_v_upper; }
  const ClassKFunction& alpha() const { return parts_.alpha; }
  const ClassKFunction& gamma() const { return parts_.gamma; }
  double sigma() const { return parts_.sigma; }

  /// Kernel coefficients when V is quadratic, alpha linear and gamma quadratic.
  std::optional<kernels::QuadraticIss> kernel_form() const;

 private:
  IssCertificateParts parts_;
  ClassKFunction gamma_tilde_;
};

/// V = x^2/2, alpha_V = s^2/2, alpha(s) = 0.84 s, gamma(s) = 2.66 s^2.
IssCertificate example_vi_certificate(double sigma = 0.5);

// ---------------------------------------------------------------------------
// Grid verification of the ISS dissipation inequality

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box in (x, e) space, one interval per component.
struct Box {
  std::vector<Interval> x;
  std::vector<Interval> e;
};

struct GridSpec {
  std::size_t n_state = 201;  // points per state axis
  std::size_t n_param = 11;   // points across the parameter range
};

struct GridWorst {
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> e;
  /// Parameter sample (d) where the worst value occurred; absent for parameter-free checks.
  std::optional<double> param;
  /// "x=..;e=..;d=.." with no spaces; empty parts are left out.
  std::string location() const;
};

using LoopFamily = std::function<SampledLoop(double)>;

/// Max over the grid (and parameter samples) of dV/dx f(x,e) + alpha(V(x)) - gamma(|e|).
/// Non-finite values count as +inf. <= 0 means the certificate holds on the grid.
/// Uses the batched kernels when loop and certificate have the polynomial/quadratic form.
GridWorst verify_iss(const IssCertificate& cert, const LoopFamily& loops, const Box& region,
                     Interval param_range, GridSpec grid);

/// Same quantity through the generic per-point path (no kernels).
GridWorst verify_iss_generic(const IssCertificate& cert, const LoopFamily& loops, const Box& region,
                             Interval param_range, GridSpec grid);

/// Max of alpha_V_lower(|x|) - V(x) and V(x) - alpha_V_upper(|x|) over the x grid.
GridWorst verify_sandwich(const IssCertificate& cert, const std::vector<Interval>& x_box,
                          std::size_t n);

// ---------------------------------------------------------------------------
// Composite hybrid Lyapunov functions

enum class CompositeVariant {
  iss_max,  // max{V(x), gamma_tilde(|e|)}
  wl_max,   // max{V(x), eta V(x + e)}
  eta_max,  // max{V(x), W(e), eta}
};

std::string_view variant_name(CompositeVariant v);

class CompositeLyapunov {
 public:
  static constexpr std::size_t kMaxBranches = 3;

  CompositeLyapunov(CompositeVariant variant, IssCertificate cert);

  CompositeVariant variant() const { return variant_; }
  const IssCertificate& certificate() const { return cert_; }
  std::size_t branch_count() const;

  double operator()(const HybridState& q) const;
  std::array<double, kMaxBranches> branches(const HybridState& q) const;
  /// Directional derivative of every branch along v (same layout as q).
  std::array<double, kMaxBranches> branch_derivatives(const HybridState& q, const HybridState& v) const;

  /// Clarke directional derivative: max over branches within act_tol * R(q) of the max.
  double clarke_dd(const HybridState& q, const HybridState& v, double act_tol = 1e-9) const;

 private:
  CompositeVariant variant_;
  IssCertificate cert_;
};

struct DecreaseReport {
  /// max over flow sample pairs of slope(R) + alpha_R(R).
  double max_flow_violation = -std::numeric_limits<double>::infinity();
  double flow_violation_t = 0.0;
  /// max over jumps of R(q_after) - R(q_before).
  double max_jump_increment = -std::numeric_limits<double>::infinity();
  double jump_increment_t = 0.0;
  double max_R = 0.0;
  bool flow_ok = true;
  bool jump_ok = true;
  bool passed() const { return flow_ok && jump_ok; }
};

/// Minimum time between the two samples of a slope; shorter steps are merged.
inline constexpr double kMinSlopeSpacing = 1e-4;

/// Numeric counterpart of the Lyapunov conditions along one arc. Slopes are
/// finite differences between consecutive flow samples, compared against
/// -alpha_R(min(R_k, R_k+1)).
DecreaseReport monitor_decrease(const CompositeLyapunov& R, const HybridArc& arc,
                                const ClassKFunction& alpha_R, double tol);

/// max over samples of R(t, j) - R(0, 0) exp(-rate t).
double envelope_excess(const CompositeLyapunov& R, const HybridArc& arc, double rate);

// ---------------------------------------------------------------------------
// Lipschitz-type growth constants

class UnboundedRatio : public Error {
 public:
  using Error::Error;
};

/// Grid maxima (hence lower bounds of the true constants):
///   L1 = max |f|/(|x|+|e|), L3 = max |g|/(|x|+|e|), L2 = max alpha_V_lower^{-1}(gamma_tilde(|e|))/|e|.
struct LipschitzEstimates {
  double L1 = 0.0;
  double L2 = 0.0;
  double L3 = 0.0;
  Box region;
  std::size_t grid_n = 0;

  LipschitzEstimates inflated(double factor) const;
};

inline constexpr double kMaxGrowthRatio = 1e12;

LipschitzEstimates estimate_lipschitz(const SampledLoop& loop, const IssCertificate& cert,
                                      const Box& region, std::size_t grid_n);
/// Componentwise max over a family of loops (e.g. sampled parameter values).
LipschitzEstimates estimate_lipschitz(std::span<const SampledLoop> loops, const IssCertificate& cert,
                                      const Box& region, std::size_t grid_n);

// ---------------------------------------------------------------------------
// Dwell-time lower bounds

using RateFunction = std::function<double(double)>;

class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

/// tau = integral_a^b ds / lambda(s): time for theta' = lambda(theta) to go from a to b.
/// Adaptive Simpson, relative tolerance 1e-9.
double dwell_lower_bound(const RateFunction& lambda, double a, double b);

struct DwellTimeBound {
  double a = 0.0;
  double b = 0.0;
  RateFunction lambda;
  double tau = 0.0;
};

/// s -> max{L1 L2 (1 + s/L2)^2, sigma_bar alpha_bar / (1 - eps)}.
RateFunction theorem2_lambda(const LipschitzEstimates& L, double sigma_bar, double alpha_bar, double eps);
/// s -> L3 + (L1 + L3) s + L1 s^2.
RateFunction theorem3_lambda(const LipschitzEstimates& L);

/// a = 0, b = 1 for the decreasing-Lyapunov-threshold rule.
DwellTimeBound wl_dwell_bound(const LipschitzEstimates& L, double sigma_bar, double alpha_bar, double eps);
/// a = 0, b = 1/L2 for the W(e)-threshold and plain ISS rules.
DwellTimeBound eta_dwell_bound(const LipschitzEstimates& L);

}  // namespace evtrig
