#include <arm_neon.h>

#include <cmath>

#include "evtrig/kernels.hpp"
#include "kernels_common.hpp"

namespace evtrig::kernels::neon {

namespace {

inline float64x2_t poly_flow(const PolyLoop& p, float64x2_t x, float64x2_t x2, float64x2_t e) {
  const float64x2_t d = vdupq_n_f64(p.d);
  const float64x2_t k = vdupq_n_f64(p.gain);
  const float64x2_t cubic = vsubq_f64(vmulq_f64(d, x2), vmulq_f64(x2, x));
  return vsubq_f64(cubic, vmulq_f64(k, vaddq_f64(x, e)));
}

}  // namespace

void iss_violation_row(const PolyLoop& loop, const QuadraticIss& cert, double e,
                       std::span<const double> xs, std::span<double> out) {
  detail::check_row(xs, out);
  const double two_v = 2.0 * cert.v;
  const double gamma_e = cert.gamma * (e * e);
  const float64x2_t ve = vdupq_n_f64(e);
  const float64x2_t v_two_v = vdupq_n_f64(two_v);
  const float64x2_t v_v = vdupq_n_f64(cert.v);
  const float64x2_t v_alpha = vdupq_n_f64(cert.alpha);
  const float64x2_t v_gamma_e = vdupq_n_f64(gamma_e);

  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(xs.data() + i);
    const float64x2_t x2 = vmulq_f64(x, x);
    const float64x2_t f = poly_flow(loop, x, x2, ve);
    const float64x2_t dv = vmulq_f64(vmulq_f64(v_two_v, x), f);
    const float64x2_t decay = vmulq_f64(v_alpha, vmulq_f64(v_v, x2));
    vst1q_f64(out.data() + i, vsubq_f64(vaddq_f64(dv, decay), v_gamma_e));
  }
  for (; i < n; ++i) {
    out[i] = detail::iss_violation_point(loop, cert.v, two_v, cert.alpha, gamma_e, xs[i], e);
  }
}

void growth_ratio_row(const PolyLoop& loop, double e, std::span<const double> xs,
                      std::span<double> out) {
  detail::check_row(xs, out);
  const double abs_e = std::abs(e);
  const float64x2_t ve = vdupq_n_f64(e);
  const float64x2_t v_abs_e = vdupq_n_f64(abs_e);
  const float64x2_t zero = vdupq_n_f64(0.0);

  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(xs.data() + i);
    const float64x2_t x2 = vmulq_f64(x, x);
    const float64x2_t f = poly_flow(loop, x, x2, ve);
    const float64x2_t den = vaddq_f64(vabsq_f64(x), v_abs_e);
    const float64x2_t ratio = vdivq_f64(vabsq_f64(f), den);
    const uint64x2_t is_zero = vceqq_f64(den, zero);
    vst1q_f64(out.data() + i, vbslq_f64(is_zero, zero, ratio));
  }
  for (; i < n; ++i) out[i] = detail::growth_ratio_point(loop, abs_e, xs[i], e);
}

}  // namespace evtrig::kernels::neon
