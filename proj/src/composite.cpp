#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "evtrig/certificate.hpp"

namespace evtrig {

std::string_view variant_name(CompositeVariant v) {
  switch (v) {
    case CompositeVariant::iss_max: return "iss_max";
    case CompositeVariant::wl_max: return "wl_max";
    case CompositeVariant::eta_max: return "eta_max";
  }
  return "unknown";
}

CompositeLyapunov::CompositeLyapunov(CompositeVariant variant, IssCertificate cert)
    : variant_(variant), cert_(std::move(cert)) {}

std::size_t CompositeLyapunov::branch_count() const {
  return variant_ == CompositeVariant::eta_max ? 3 : 2;
}

namespace {

double eta_of(const HybridState& q) {
  if (q.dims().neta < 1) throw DimensionError("composite Lyapunov: state has no threshold variable");
  return q.eta()[0];
}

void shifted(const HybridState& q, std::span<double> out) {
  const auto x = q.x();
  const auto e = q.e();
  if (x.size() != e.size()) throw DimensionError("wl_max: x and e must have the same dimension");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + e[i];
}

// d/dt gamma_tilde(|e|) along edot.
double norm_branch_derivative(const ClassKFunction& k, std::span<const double> e, std::span<const double> ve) {
  const double ne = norm(e);
  if (ne == 0.0) return k.derivative(0.0) * norm(ve);
  double dot = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) dot += e[i] * ve[i];
  return k.derivative(ne) * dot / ne;
}

}  // namespace

std::array<double, CompositeLyapunov::kMaxBranches> CompositeLyapunov::branches(const HybridState& q) const {
  const double inf = -std::numeric_limits<double>::infinity();
  std::array<double, kMaxBranches> b{inf, inf, inf};
  b[0] = cert_.V(q.x());
  switch (variant_) {
    case CompositeVariant::iss_max:
      b[1] = cert_.W(q.e());
      break;
    case CompositeVariant::wl_max: {
      std::array<double, kMaxStateDim> s{};
      const std::span<double> sx{s.data(), q.dims().nx};
      shifted(q, sx);
      b[1] = eta_of(q) * cert_.V(sx);
      break;
    }
    case CompositeVariant::eta_max:
      b[1] = cert_.W(q.e());
      b[2] = eta_of(q);
      break;
  }
  return b;
}

double CompositeLyapunov::operator()(const HybridState& q) const {
  const auto b = branches(q);
  return *std::max_element(b.begin(), b.end());
}

std::array<double, CompositeLyapunov::kMaxBranches> CompositeLyapunov::branch_derivatives(
    const HybridState& q, const HybridState& v) const {
  if (!(q.dims() == v.dims())) throw DimensionError("clarke_dd: direction has the wrong dimensions");
  const double inf = -std::numeric_limits<double>::infinity();
  std::array<double, kMaxBranches> d{inf, inf, inf};
  d[0] = cert_.lie_derivative(q.x(), v.x());
  switch (variant_) {
    case CompositeVariant::iss_max:
      d[1] = norm_branch_derivative(cert_.gamma_tilde(), q.e(), v.e());
      break;
    case CompositeVariant::wl_max: {
      const std::size_t n = q.dims().nx;
      std::array<double, kMaxStateDim> s{};
      std::array<double, kMaxStateDim> vs{};
      shifted(q, {s.data(), n});
      shifted(v, {vs.data(), n});
      const std::span<const double> sx{s.data(), n};
      const double eta = eta_of(q);
      d[1] = eta_of(v) * cert_.V(sx) + eta * cert_.lie_derivative(sx, {vs.data(), n});
      break;
    }
    case CompositeVariant::eta_max:
      d[1] = norm_branch_derivative(cert_.gamma_tilde(), q.e(), v.e());
      d[2] = eta_of(v);
      break;
  }
  return d;
}

double CompositeLyapunov::clarke_dd(const HybridState& q, const HybridState& v, double act_tol) const {
  const auto b = branches(q);
  const auto d = branch_derivatives(q, v);
  const double r = *std::max_element(b.begin(), b.end());
  const double floor = r - act_tol * std::abs(r);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < branch_count(); ++i) {
    if (b[i] >= floor) best = std::max(best, d[i]);
  }
  return best;
}

DecreaseReport monitor_decrease(const CompositeLyapunov& R, const HybridArc& arc,
                                const ClassKFunction& alpha_R, double tol) {
  DecreaseReport rep;
  rep.max_R = -std::numeric_limits<double>::infinity();
  std::vector<double> ts;
  std::vector<double> rs;
  auto check = [&](std::size_t a, std::size_t b) {
    const double slope = (rs[b] - rs[a]) / (ts[b] - ts[a]);
    const double v = slope + alpha_R(std::min(rs[a], rs[b]));
    if (v > rep.max_flow_violation) {
      rep.max_flow_violation = v;
      rep.flow_violation_t = ts[b];
    }
  };
  for (const auto& iv : arc.intervals) {
    ts.clear();
    rs.clear();
    for (const auto& s : iv.samples) {
      ts.push_back(s.t);
      rs.push_back(R(s.q));
      rep.max_R = std::max(rep.max_R, rs.back());
    }
    const std::size_t n = ts.size();
    // Anchored differences at least kMinSlopeSpacing apart; a short tail (the
    // located event point) is folded into the previous difference.
    std::size_t anchor = 0;
    std::optional<std::size_t> prev_anchor;
    for (std::size_t k = 1; k < n; ++k) {
      const bool last = k + 1 == n;
      if (ts[k] - ts[anchor] >= kMinSlopeSpacing) {
        check(anchor, k);
        prev_anchor = anchor;
        anchor = k;
      } else if (last && prev_anchor) {
        check(*prev_anchor, k);
      }
    }
  }
  for (const auto& jr : arc.jumps) {
    const double inc = R(jr.after) - R(jr.before);
    if (inc > rep.max_jump_increment) {
      rep.max_jump_increment = inc;
      rep.jump_increment_t = jr.t;
    }
  }
  rep.flow_ok = !(rep.max_flow_violation > tol);
  rep.jump_ok = !(rep.max_jump_increment > tol);
  return rep;
}

double envelope_excess(const CompositeLyapunov& R, const HybridArc& arc, double rate) {
  const double r0 = R(arc.intervals.front().samples.front().q);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& iv : arc.intervals) {
    for (const auto& s : iv.samples) worst = std::max(worst, R(s.q) - r0 * std::exp(-rate * s.t));
  }
  return worst;
}

}  // namespace evtrig
