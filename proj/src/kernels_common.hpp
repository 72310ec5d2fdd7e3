#pragma once

#include <cmath>
#include <span>

#include "evtrig/errors.hpp"
#include "evtrig/kernels.hpp"

namespace evtrig::kernels::detail {

inline void check_row(std::span<const double> xs, std::span<double> out) {
  if (out.size() < xs.size()) throw DimensionError("kernel: output row shorter than input row");
}

// Shared by the scalar reference and the SIMD tails; the vector bodies mirror
// this operation order exactly.
inline double iss_violation_point(const PolyLoop& p, double v, double two_v, double alpha,
                                  double gamma_e, double x, double e) {
  const double x2 = x * x;
  const double f = (p.d * x2 - x2 * x) - p.gain * (x + e);
  const double dv = (two_v * x) * f;
  return (dv + alpha * (v * x2)) - gamma_e;
}

inline double growth_ratio_point(const PolyLoop& p, double abs_e, double x, double e) {
  const double x2 = x * x;
  const double f = (p.d * x2 - x2 * x) - p.gain * (x + e);
  const double den = std::abs(x) + abs_e;
  return den == 0.0 ? 0.0 : std::abs(f) / den;
}

}  // namespace evtrig::kernels::detail
