#include "evtrig/systems.hpp"

#include <array>
#include <cmath>
#include <iostream>

#include "evtrig/errors.hpp"
#include "evtrig/state.hpp"

namespace evtrig {

SampledLoop::SampledLoop(PlantModel plant, Controller controller, HoldDynamics hold,
                         ErrorChannels channels)
    : plant_(std::move(plant)),
      controller_(std::move(controller)),
      hold_(std::move(hold)),
      channels_(channels) {
  if (!plant_.f_p) throw InvalidArgument("sampled loop: plant has no vector field");
  if (!controller_.g_c) throw InvalidArgument("sampled loop: controller has no output map");
  if (controller_.n_c > 0 && !controller_.f_c) {
    throw InvalidArgument("sampled loop: dynamic controller has no state equation");
  }
  if (channels_ == ErrorChannels::measurement_only && (!static_controller() || !zero_order_hold())) {
    throw InvalidArgument(
        "sampled loop: dropping the input error is only exact for a static controller with zero-order holds");
  }
  if (channels_ == ErrorChannels::state_and_input && plant_.n_u > 0) {
    if (controller_.n_c > 0 && !controller_.dgc_dxc) {
      throw InvalidArgument("sampled loop: input error dynamics need dg_C/dx_C");
    }
    if (hold_.fhat_p && !controller_.dgc_dxhat) {
      throw InvalidArgument("sampled loop: input error dynamics need dg_C/dxhat_P");
    }
  }
  if (nx() + ne() > kMaxStateDim) throw DimensionError("sampled loop: state too large");
}

std::size_t SampledLoop::ne() const {
  return plant_.n_p + (channels_ == ErrorChannels::state_and_input ? plant_.n_u : 0);
}

void SampledLoop::composed_flow(std::span<const double> x, std::span<const double> e,
                                std::span<double> xdot, std::span<double> edot) const {
  const std::size_t np = plant_.n_p;
  const std::size_t nc = controller_.n_c;
  const std::size_t nu = plant_.n_u;
  if (x.size() != nx() || e.size() != ne() || xdot.size() != nx() || edot.size() != ne()) {
    throw DimensionError("composed_flow: dimensions do not match the loop");
  }
  const bool with_input = channels_ == ErrorChannels::state_and_input;

  std::array<double, kMaxStateDim> xhat{};
  std::array<double, kMaxStateDim> uhat{};
  std::array<double, kMaxStateDim> fhat_p{};
  std::array<double, kMaxStateDim> fhat_c{};
  std::array<double, kMaxStateDim * kMaxStateDim> jac{};

  const auto xp = x.first(np);
  const auto xc = x.subspan(np, nc);
  for (std::size_t i = 0; i < np; ++i) xhat[i] = xp[i] + e[i];
  const std::span<const double> xhat_s{xhat.data(), np};
  const std::span<double> uhat_s{uhat.data(), nu};

  controller_.g_c(xc, xhat_s, uhat_s);
  if (with_input) {
    for (std::size_t i = 0; i < nu; ++i) uhat[i] += e[np + i];
  }

  auto xdot_p = xdot.first(np);
  auto xdot_c = xdot.subspan(np, nc);
  plant_.f_p(xp, uhat_s, xdot_p);
  if (nc > 0) controller_.f_c(xc, xhat_s, xdot_c);

  const bool zoh_p = !hold_.fhat_p;
  if (!zoh_p) hold_.fhat_p(xp, xc, xhat_s, uhat_s, {fhat_p.data(), np});
  for (std::size_t i = 0; i < np; ++i) edot[i] = zoh_p ? -xdot_p[i] : fhat_p[i] - xdot_p[i];

  if (!with_input) return;
  if (hold_.fhat_c) hold_.fhat_c(xp, xc, xhat_s, uhat_s, {fhat_c.data(), nu});
  for (std::size_t i = 0; i < nu; ++i) edot[np + i] = fhat_c[i];
  if (nc > 0) {
    controller_.dgc_dxc(xc, xhat_s, {jac.data(), nu * nc});
    for (std::size_t i = 0; i < nu; ++i) {
      for (std::size_t k = 0; k < nc; ++k) edot[np + i] -= jac[i * nc + k] * xdot_c[k];
    }
  }
  if (!zoh_p) {
    controller_.dgc_dxhat(xc, xhat_s, {jac.data(), nu * np});
    for (std::size_t i = 0; i < nu; ++i) {
      for (std::size_t k = 0; k < np; ++k) edot[np + i] -= jac[i * np + k] * fhat_p[k];
    }
  }
}

std::pair<std::vector<double>, std::vector<double>> SampledLoop::composed_flow(
    std::span<const double> x, std::span<const double> e) const {
  std::pair<std::vector<double>, std::vector<double>> out{std::vector<double>(nx()),
                                                          std::vector<double>(ne())};
  composed_flow(x, e, out.first, out.second);
  return out;
}

SampledLoop example_vi_loop(double d) {
  if (!std::isfinite(d)) throw InvalidArgument("example_vi_loop: d must be finite");
  if (std::abs(d) > 1.0) {
    std::cerr << "warning: example_vi_loop: |d| = " << std::abs(d)
              << " is outside the modelled range |d| < 1\n";
  }
  constexpr double gain = 2.0;
  PlantModel plant{1, 1, [d](std::span<const double> x, std::span<const double> u, std::span<double> out) {
                     const double xv = x[0];
                     const double x2 = xv * xv;
                     out[0] = (d * x2 - x2 * xv) + u[0];
                   }};
  Controller controller;
  controller.g_c = [](std::span<const double>, std::span<const double> xhat, std::span<double> u) {
    u[0] = -gain * xhat[0];
  };
  SampledLoop loop(std::move(plant), std::move(controller), {}, ErrorChannels::measurement_only);
  loop.set_poly_form({d, gain});
  return loop;
}

}  // namespace evtrig
