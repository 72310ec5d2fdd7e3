#pragma once

// Batched grid kernels for scalar polynomial loops. Each kernel has a scalar
// reference and SIMD variants; the active variant is picked once at runtime
// from the CPU and can be pinned for tests. All variants use the same operation
// order without contraction, so they agree bit for bit.

#include <optional>
#include <span>
#include <string_view>

namespace evtrig::kernels {

/// f(x, e) = d x^2 - x^3 - gain (x + e).
struct PolyLoop {
  double d = 0.0;
  double gain = 2.0;
};

/// V(x) = v x^2, alpha(s) = a s, gamma(s) = c s^2.
struct QuadraticIss {
  double v = 0.5;
  double alpha = 1.0;
  double gamma = 1.0;
};

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Best variant this binary and CPU support.
Isa detected_isa();
/// Variant used by the dispatching entry points.
Isa active_isa();
/// Pin a variant (must be supported); nullopt restores detection.
void force_isa(std::optional<Isa> isa);
bool isa_supported(Isa isa);

/// out[i] = dV/dx(x_i) f(x_i, e) + alpha(V(x_i)) - gamma(|e|).
void iss_violation_row(const PolyLoop& loop, const QuadraticIss& cert, double e,
                       std::span<const double> xs, std::span<double> out);

/// out[i] = |f(x_i, e)| / (|x_i| + |e|), and 0 where the denominator vanishes.
void growth_ratio_row(const PolyLoop& loop, double e, std::span<const double> xs,
                      std::span<double> out);

namespace scalar {
void iss_violation_row(const PolyLoop&, const QuadraticIss&, double, std::span<const double>,
                       std::span<double>);
void growth_ratio_row(const PolyLoop&, double, std::span<const double>, std::span<double>);
}  // namespace scalar

namespace avx2 {
void iss_violation_row(const PolyLoop&, const QuadraticIss&, double, std::span<const double>,
                       std::span<double>);
void growth_ratio_row(const PolyLoop&, double, std::span<const double>, std::span<double>);
}  // namespace avx2

namespace neon {
void iss_violation_row(const PolyLoop&, const QuadraticIss&, double, std::span<const double>,
                       std::span<double>);
void growth_ratio_row(const PolyLoop&, double, std::span<const double>, std::span<double>);
}  // namespace neon

}  // namespace evtrig::kernels
