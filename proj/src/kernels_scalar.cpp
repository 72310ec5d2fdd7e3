#include <cmath>

#include "evtrig/kernels.hpp"
#include "kernels_common.hpp"

namespace evtrig::kernels::scalar {

void iss_violation_row(const PolyLoop& loop, const QuadraticIss& cert, double e,
                       std::span<const double> xs, std::span<double> out) {
  detail::check_row(xs, out);
  const double two_v = 2.0 * cert.v;
  const double gamma_e = cert.gamma * (e * e);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = detail::iss_violation_point(loop, cert.v, two_v, cert.alpha, gamma_e, xs[i], e);
  }
}

void growth_ratio_row(const PolyLoop& loop, double e, std::span<const double> xs,
                      std::span<double> out) {
  detail::check_row(xs, out);
  const double abs_e = std::abs(e);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = detail::growth_ratio_point(loop, abs_e, xs[i], e);
  }
}

}  // namespace evtrig::kernels::scalar
