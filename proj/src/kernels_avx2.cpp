#include <immintrin.h>

#include <cmath>

#include "evtrig/kernels.hpp"
#include "kernels_common.hpp"

namespace evtrig::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline __m256d poly_flow(const PolyLoop& p, __m256d x, __m256d x2, __m256d e) {
  const __m256d d = _mm256_set1_pd(p.d);
  const __m256d k = _mm256_set1_pd(p.gain);
  const __m256d cubic = _mm256_sub_pd(_mm256_mul_pd(d, x2), _mm256_mul_pd(x2, x));
  return _mm256_sub_pd(cubic, _mm256_mul_pd(k, _mm256_add_pd(x, e)));
}

}  // namespace

void iss_violation_row(const PolyLoop& loop, const QuadraticIss& cert, double e,
                       std::span<const double> xs, std::span<double> out) {
  detail::check_row(xs, out);
  const double two_v = 2.0 * cert.v;
  const double gamma_e = cert.gamma * (e * e);
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d v_two_v = _mm256_set1_pd(two_v);
  const __m256d v_v = _mm256_set1_pd(cert.v);
  const __m256d v_alpha = _mm256_set1_pd(cert.alpha);
  const __m256d v_gamma_e = _mm256_set1_pd(gamma_e);

  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs.data() + i);
    const __m256d x2 = _mm256_mul_pd(x, x);
    const __m256d f = poly_flow(loop, x, x2, ve);
    const __m256d dv = _mm256_mul_pd(_mm256_mul_pd(v_two_v, x), f);
    const __m256d decay = _mm256_mul_pd(v_alpha, _mm256_mul_pd(v_v, x2));
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(_mm256_add_pd(dv, decay), v_gamma_e));
  }
  for (; i < n; ++i) {
    out[i] = detail::iss_violation_point(loop, cert.v, two_v, cert.alpha, gamma_e, xs[i], e);
  }
}

void growth_ratio_row(const PolyLoop& loop, double e, std::span<const double> xs,
                      std::span<double> out) {
  detail::check_row(xs, out);
  const double abs_e = std::abs(e);
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d v_abs_e = _mm256_set1_pd(abs_e);
  const __m256d zero = _mm256_setzero_pd();

  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs.data() + i);
    const __m256d x2 = _mm256_mul_pd(x, x);
    const __m256d f = poly_flow(loop, x, x2, ve);
    const __m256d den = _mm256_add_pd(abs_pd(x), v_abs_e);
    const __m256d ratio = _mm256_div_pd(abs_pd(f), den);
    const __m256d is_zero = _mm256_cmp_pd(den, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(ratio, zero, is_zero));
  }
  for (; i < n; ++i) out[i] = detail::growth_ratio_point(loop, abs_e, xs[i], e);
}

}  // namespace evtrig::kernels::avx2
