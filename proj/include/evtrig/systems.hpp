#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evtrig/kernels.hpp"

namespace evtrig {

/// (a, b) -> out, all dense vectors.
using VectorField =
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;

/// Inter-sample evolution of a held quantity: (x_P, x_C, xhat_P, uhat) -> out.
using HoldField = std::function<void(std::span<const double>, std::span<const double>,
                                     std::span<const double>, std::span<const double>, std::span<double>)>;

/// xdot_P = f_P(x_P, u).
struct PlantModel {
  std::size_t n_p = 0;
  std::size_t n_u = 0;
  VectorField f_p;
};

/// xdot_C = f_C(x_C, xhat_P), u = g_C(x_C, xhat_P). Static controllers have n_c = 0.
struct Controller {
  std::size_t n_c = 0;
  VectorField f_c;
  VectorField g_c;
  /// Row-major Jacobians of g_C: n_u x n_c and n_u x n_p. Needed for the input
  /// error dynamics of dynamic controllers and non-ZOH plant holds.
  VectorField dgc_dxc;
  VectorField dgc_dxhat;
};

/// Empty fields mean zero-order hold.
struct HoldDynamics {
  HoldField fhat_p;
  HoldField fhat_c;
  bool zero_order() const { return !fhat_p && !fhat_c; }
};

enum class ErrorChannels {
  /// e = (e_xP, e_u).
  state_and_input,
  /// e = e_xP. Exact for a static controller behind zero-order holds, where e_u stays 0.
  measurement_only,
};

/// Plant, controller and holds composed into xdot = f(x, e), edot = g(x, e),
/// with x = (x_P, x_C), xhat_P = x_P + e_xP and uhat = g_C(x_C, xhat_P) + e_u.
class SampledLoop {
 public:
  SampledLoop(PlantModel plant, Controller controller, HoldDynamics hold = {},
              ErrorChannels channels = ErrorChannels::state_and_input);

  std::size_t nx() const { return plant_.n_p + controller_.n_c; }
  std::size_t ne() const;
  bool zero_order_hold() const { return hold_.zero_order(); }
  bool static_controller() const { return controller_.n_c == 0; }

  /// Writes f(x, e) into xdot and g(x, e) into edot.
  void composed_flow(std::span<const double> x, std::span<const double> e, std::span<double> xdot,
                     std::span<double> edot) const;
  std::pair<std::vector<double>, std::vector<double>> composed_flow(std::span<const double> x,
                                                                    std::span<const double> e) const;

  /// Coefficients of f = d x^2 - x^3 - k (x + e) when the loop has that scalar form.
  const std::optional<kernels::PolyLoop>& poly_form() const { return poly_; }
  void set_poly_form(kernels::PolyLoop p) { poly_ = p; }

 private:
  PlantModel plant_;
  Controller controller_;
  HoldDynamics hold_;
  ErrorChannels channels_;
  std::optional<kernels::PolyLoop> poly_;
};

/// xdot = d x^2 - x^3 + u with u = -2 x, sampled through a zero-order hold:
/// f(x, e) = d x^2 - x^3 - 2 (x + e), g = -f.
SampledLoop example_vi_loop(double d);

}  // namespace evtrig
