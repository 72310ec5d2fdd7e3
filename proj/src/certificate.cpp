#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "evtrig/certificate.hpp"
#include "grid.hpp"

namespace evtrig {

IssCertificate::IssCertificate(IssCertificateParts parts) : parts_(std::move(parts)) {
  if (!parts_.V) throw InvalidArgument("certificate: V is required");
  if (!(parts_.sigma > 0.0 && parts_.sigma < 1.0)) {
    throw InvalidArgument("certificate: sigma must lie in (0, 1)");
  }
  const auto a = parts_.alpha.linear_gain();
  const auto g = parts_.gamma.power_form();
  const double sigma = parts_.sigma;
  if (a && g) {
    gamma_tilde_ = ClassKFunction::power(g->first / (sigma * *a), g->second);
  } else {
    const ClassKFunction alpha = parts_.alpha;
    const ClassKFunction gamma = parts_.gamma;
    gamma_tilde_ = ClassKFunction::custom(
        "alpha^-1(gamma(s)/sigma)", [=](double s) { return alpha.inverse(gamma(s) / sigma); },
        [=](double r) { return gamma.inverse(sigma * alpha(r)); },
        [=](double s) {
          const double inner = gamma(s) / sigma;
          const double da = alpha.derivative(alpha.inverse(inner));
          return gamma.derivative(s) / (sigma * da);
        });
  }
}

IssCertificate IssCertificate::quadratic(double c, ClassKFunction alpha, ClassKFunction gamma,
                                         double sigma) {
  if (!(c > 0.0)) throw InvalidArgument("certificate: quadratic coefficient must be positive");
  IssCertificateParts p;
  p.V = [c](std::span<const double> x) {
    if (x.size() == 1) return c * (x[0] * x[0]);
    double s = 0.0;
    for (double v : x) s += v * v;
    return c * s;
  };
  p.grad_V = [c](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (2.0 * c) * x[i];
  };
  p.alpha_v_lower = ClassKFunction::power(c, 2.0);
  p.alpha_v_upper = ClassKFunction::power(c, 2.0);
  p.alpha = std::move(alpha);
  p.gamma = std::move(gamma);
  p.sigma = sigma;
  p.quadratic_coeff = c;
  return IssCertificate(std::move(p));
}

void IssCertificate::grad_V(std::span<const double> x, std::span<double> out) const {
  if (out.size() != x.size()) throw DimensionError("grad_V: output size mismatch");
  if (parts_.grad_V) {
    parts_.grad_V(x, out);
    return;
  }
  constexpr double step = 1e-6;
  std::array<double, kMaxStateDim> probe{};
  std::copy(x.begin(), x.end(), probe.begin());
  const std::span<const double> p{probe.data(), x.size()};
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = parts_.V(p);
    probe[i] = x[i] - step;
    const double down = parts_.V(p);
    probe[i] = x[i];
    out[i] = (up - down) / (2.0 * step);
  }
}

double IssCertificate::lie_derivative(std::span<const double> x, std::span<const double> v) const {
  std::array<double, kMaxStateDim> g{};
  grad_V(x, {g.data(), x.size()});
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += g[i] * v[i];
  return s;
}

double IssCertificate::W(std::span<const double> e) const { return gamma_tilde_(norm(e)); }

std::optional<kernels::QuadraticIss> IssCertificate::kernel_form() const {
  const auto a = parts_.alpha.linear_gain();
  const auto g = parts_.gamma.power_form();
  if (!parts_.quadratic_coeff || !a || !g || g->second != 2.0) return std::nullopt;
  return kernels::QuadraticIss{*parts_.quadratic_coeff, *a, g->first};
}

IssCertificate example_vi_certificate(double sigma) {
  return IssCertificate::quadratic(0.5, ClassKFunction::linear(0.84), ClassKFunction::power(2.66, 2.0),
                                   sigma);
}

std::string GridWorst::location() const {
  std::ostringstream os;
  os.precision(17);
  const char* sep = "";
  auto put = [&](std::string_view key, const std::vector<double>& v) {
    if (v.empty()) return;
    os << sep << key << '=';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    sep = ";";
  };
  put("x", x);
  put("e", e);
  if (param) os << sep << "d=" << *param;
  return os.str();
}

namespace {

double as_violation(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

void check_box(const Box& region, std::size_t nx, std::size_t ne) {
  if (region.x.size() != nx || region.e.size() != ne) {
    throw DimensionError("grid: region dimensions do not match the loop");
  }
}

}  // namespace

GridWorst verify_iss_generic(const IssCertificate& cert, const LoopFamily& loops, const Box& region,
                             Interval param_range, GridSpec grid) {
  if (grid.n_state < 1) throw InvalidArgument("verify_iss: need at least 1 point per axis");
  const auto params = detail::linspace(param_range, std::max<std::size_t>(grid.n_param, 1));
  GridWorst worst;
  worst.value = -std::numeric_limits<double>::infinity();
  for (double d : params) {
    const SampledLoop loop = loops(d);
    check_box(region, loop.nx(), loop.ne());
    std::vector<double> xdot(loop.nx()), edot(loop.ne());
    detail::for_each_grid_point(region, grid.n_state, [&](std::span<const double> x, std::span<const double> e) {
      loop.composed_flow(x, e, xdot, edot);
      const double v =
          as_violation(cert.lie_derivative(x, xdot) + cert.alpha()(cert.V(x)) - cert.gamma()(norm(e)));
      if (v > worst.value) {
        worst.value = v;
        worst.x.assign(x.begin(), x.end());
        worst.e.assign(e.begin(), e.end());
        worst.param = d;
      }
    });
  }
  return worst;
}

GridWorst verify_iss(const IssCertificate& cert, const LoopFamily& loops, const Box& region,
                     Interval param_range, GridSpec grid) {
  if (grid.n_state < 1) throw InvalidArgument("verify_iss: need at least 1 point per axis");
  const auto kform = cert.kernel_form();
  const auto params = detail::linspace(param_range, std::max<std::size_t>(grid.n_param, 1));
  if (!kform || region.x.size() != 1 || region.e.size() != 1) {
    return verify_iss_generic(cert, loops, region, param_range, grid);
  }
  std::vector<SampledLoop> family;
  family.reserve(params.size());
  for (double d : params) {
    family.push_back(loops(d));
    if (!family.back().poly_form()) return verify_iss_generic(cert, loops, region, param_range, grid);
    check_box(region, family.back().nx(), family.back().ne());
  }

  const auto xs = detail::linspace(region.x[0], grid.n_state);
  const auto es = detail::linspace(region.e[0], grid.n_state);
  std::vector<double> row(xs.size());
  GridWorst worst;
  worst.value = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto poly = *family[p].poly_form();
    for (double e : es) {
      kernels::iss_violation_row(poly, *kform, e, xs, row);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = as_violation(row[i]);
        if (v > worst.value) {
          worst.value = v;
          worst.x = {xs[i]};
          worst.e = {e};
          worst.param = params[p];
        }
      }
    }
  }
  return worst;
}

GridWorst verify_sandwich(const IssCertificate& cert, const std::vector<Interval>& x_box, std::size_t n) {
  if (n < 2) throw InvalidArgument("verify_sandwich: need at least 2 points per axis");
  const Box region{x_box, {}};
  GridWorst worst;
  worst.value = -std::numeric_limits<double>::infinity();
  detail::for_each_grid_point(region, n, [&](std::span<const double> x, std::span<const double>) {
    const double nx = norm(x);
    const double V = cert.V(x);
    const double v = as_violation(std::max(cert.alpha_v_lower()(nx) - V, V - cert.alpha_v_upper()(nx)));
    if (v > worst.value) {
      worst.value = v;
      worst.x.assign(x.begin(), x.end());
      worst.e.clear();
    }
  });
  return worst;
}

}  // namespace evtrig
