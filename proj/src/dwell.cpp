#include <cmath>
#include <string>

#include "evtrig/certificate.hpp"

namespace evtrig {

namespace {

constexpr double kRelTol = 1e-9;
constexpr int kMaxDepth = 50;

struct Integrand {
  const RateFunction& lambda;
  double operator()(double s) const {
    const double l = lambda(s);
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw DivergentIntegral("dwell_lower_bound: rate is not positive at s = " + std::to_string(s) +
                              " (the comparison system never reaches b)");
    }
    return 1.0 / l;
  }
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const Integrand& f, double a, double b, double fa, double fm, double fb, double whole,
                double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double diff = left + right - whole;
  if (depth >= kMaxDepth || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double dwell_lower_bound(const RateFunction& lambda, double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
    throw InvalidArgument("dwell_lower_bound: need 0 <= a < b < inf");
  }
  const Integrand f{lambda};
  // Coarse composite estimate to scale the absolute tolerance.
  constexpr int panels = 16;
  const double w = (b - a) / panels;
  double coarse = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + w * k;
    const double hi = k + 1 == panels ? b : lo + w;
    coarse += simpson(lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi));
  }
  const double tol = kRelTol * std::abs(coarse) / 10.0;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + w * k;
    const double hi = k + 1 == panels ? b : lo + w;
    const double flo = f(lo);
    const double fmid = f(0.5 * (lo + hi));
    const double fhi = f(hi);
    total += adaptive(f, lo, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi), tol / panels, 0);
  }
  return total;
}

RateFunction theorem2_lambda(const LipschitzEstimates& L, double sigma_bar, double alpha_bar, double eps) {
  if (!(L.L2 > 0.0)) throw InvalidArgument("theorem2_lambda: L2 must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("theorem2_lambda: epsilon must lie in (0, 1)");
  const double L1 = L.L1;
  const double L2 = L.L2;
  const double clock = sigma_bar * alpha_bar / (1.0 - eps);
  return [=](double s) {
    const double r = 1.0 + s / L2;
    return std::max(L1 * L2 * r * r, clock);
  };
}

RateFunction theorem3_lambda(const LipschitzEstimates& L) {
  const double L1 = L.L1;
  const double L3 = L.L3;
  return [=](double s) { return L3 + (L1 + L3) * s + L1 * s * s; };
}

DwellTimeBound wl_dwell_bound(const LipschitzEstimates& L, double sigma_bar, double alpha_bar, double eps) {
  DwellTimeBound out{0.0, 1.0, theorem2_lambda(L, sigma_bar, alpha_bar, eps), 0.0};
  out.tau = dwell_lower_bound(out.lambda, out.a, out.b);
  return out;
}

DwellTimeBound eta_dwell_bound(const LipschitzEstimates& L) {
  if (!(L.L2 > 0.0)) throw InvalidArgument("eta_dwell_bound: L2 must be positive");
  DwellTimeBound out{0.0, 1.0 / L.L2, theorem3_lambda(L), 0.0};
  out.tau = dwell_lower_bound(out.lambda, out.a, out.b);
  return out;
}

}  // namespace evtrig
