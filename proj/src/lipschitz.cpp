#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "evtrig/certificate.hpp"
#include "grid.hpp"

namespace evtrig {

LipschitzEstimates LipschitzEstimates::inflated(double factor) const {
  LipschitzEstimates out = *this;
  out.L1 *= factor;
  out.L2 *= factor;
  out.L3 *= factor;
  return out;
}

namespace {

double checked_ratio(double r, const char* which) {
  if (!std::isfinite(r) || r > kMaxGrowthRatio) {
    throw UnboundedRatio(std::string("estimate_lipschitz: ") + which + " ratio exceeds " +
                         std::to_string(kMaxGrowthRatio));
  }
  return r;
}

void growth_constants(const SampledLoop& loop, const Box& region, std::size_t n, double& L1, double& L3) {
  if (region.x.size() != loop.nx() || region.e.size() != loop.ne()) {
    throw DimensionError("estimate_lipschitz: region dimensions do not match the loop");
  }
  // Zero-order hold around a scalar static loop: g = -f, so |g| = |f|.
  if (loop.poly_form() && loop.nx() == 1 && loop.ne() == 1) {
    const auto xs = detail::linspace(region.x[0], n);
    const auto es = detail::linspace(region.e[0], n);
    std::vector<double> row(xs.size());
    for (double e : es) {
      kernels::growth_ratio_row(*loop.poly_form(), e, xs, row);
      for (double r : row) L1 = std::max(L1, checked_ratio(r, "|f|/(|x|+|e|)"));
    }
    L3 = std::max(L3, L1);
    return;
  }
  std::vector<double> xdot(loop.nx()), edot(loop.ne());
  detail::for_each_grid_point(region, n, [&](std::span<const double> x, std::span<const double> e) {
    const double den = norm(x) + norm(e);
    if (den == 0.0) return;
    loop.composed_flow(x, e, xdot, edot);
    L1 = std::max(L1, checked_ratio(norm(xdot) / den, "|f|/(|x|+|e|)"));
    L3 = std::max(L3, checked_ratio(norm(edot) / den, "|g|/(|x|+|e|)"));
  });
}

double gain_ratio(const IssCertificate& cert, const Box& region, std::size_t n) {
  // |e| values of the e-grid.
  std::set<double> norms;
  detail::for_each_grid_point(Box{{}, region.e}, n, [&](std::span<const double>, std::span<const double> e) {
    const double ne = norm(e);
    if (ne > 0.0) norms.insert(ne);
  });
  double L2 = 0.0;
  for (double s : norms) {
    L2 = std::max(L2, checked_ratio(cert.alpha_v_lower().inverse(cert.gamma_tilde()(s)) / s,
                                    "alpha_V^-1(gamma_tilde(|e|))/|e|"));
  }
  return L2;
}

}  // namespace

LipschitzEstimates estimate_lipschitz(const SampledLoop& loop, const IssCertificate& cert,
                                      const Box& region, std::size_t grid_n) {
  return estimate_lipschitz(std::span<const SampledLoop>(&loop, 1), cert, region, grid_n);
}

LipschitzEstimates estimate_lipschitz(std::span<const SampledLoop> loops, const IssCertificate& cert,
                                      const Box& region, std::size_t grid_n) {
  if (grid_n < 2) throw InvalidArgument("estimate_lipschitz: need at least 2 points per axis");
  if (loops.empty()) throw InvalidArgument("estimate_lipschitz: no loops given");
  LipschitzEstimates out;
  out.region = region;
  out.grid_n = grid_n;
  for (const auto& loop : loops) growth_constants(loop, region, grid_n, out.L1, out.L3);
  out.L2 = gain_ratio(cert, region, grid_n);
  return out;
}

}  // namespace evtrig
