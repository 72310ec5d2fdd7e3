#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "evtrig/errors.hpp"

namespace evtrig {

/// Upper bound on n_x + n_e + n_eta. States live inline so the solver never allocates per step.
inline constexpr std::size_t kMaxStateDim = 16;

struct StateDims {
  std::size_t nx = 0;
  std::size_t ne = 0;
  std::size_t neta = 0;

  constexpr std::size_t total() const { return nx + ne + neta; }
  friend constexpr bool operator==(const StateDims&, const StateDims&) = default;
};

/// q = (x, e, eta): plant/controller state, sampling-induced error, auxiliary variables.
class HybridState {
 public:
  HybridState() = default;

  explicit HybridState(StateDims dims) : dims_(dims) {
    if (dims.total() > kMaxStateDim) {
      throw DimensionError("state dimension " + std::to_string(dims.total()) +
                           " exceeds capacity " + std::to_string(kMaxStateDim));
    }
  }

  HybridState(StateDims dims, std::span<const double> x, std::span<const double> e,
              std::span<const double> eta)
      : HybridState(dims) {
    if (x.size() != dims.nx || e.size() != dims.ne || eta.size() != dims.neta) {
      throw DimensionError("component sizes do not match state dimensions");
    }
    auto out = values();
    std::size_t k = 0;
    for (double v : x) out[k++] = v;
    for (double v : e) out[k++] = v;
    for (double v : eta) out[k++] = v;
  }

  /// Scalar plant with scalar error; eta may be empty.
  static HybridState scalar(double x, double e) {
    const double xs[] = {x};
    const double es[] = {e};
    return HybridState({1, 1, 0}, xs, es, {});
  }
  static HybridState scalar(double x, double e, double eta) {
    const double xs[] = {x};
    const double es[] = {e};
    const double etas[] = {eta};
    return HybridState({1, 1, 1}, xs, es, etas);
  }

  const StateDims& dims() const { return dims_; }
  std::size_t size() const { return dims_.total(); }

  std::span<double> values() { return {v_.data(), size()}; }
  std::span<const double> values() const { return {v_.data(), size()}; }

  std::span<double> x() { return {v_.data(), dims_.nx}; }
  std::span<const double> x() const { return {v_.data(), dims_.nx}; }
  std::span<double> e() { return {v_.data() + dims_.nx, dims_.ne}; }
  std::span<const double> e() const { return {v_.data() + dims_.nx, dims_.ne}; }
  std::span<double> eta() { return {v_.data() + dims_.nx + dims_.ne, dims_.neta}; }
  std::span<const double> eta() const { return {v_.data() + dims_.nx + dims_.ne, dims_.neta}; }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  bool all_finite() const;

  /// Bitwise comparison (distinguishes -0.0 from 0.0, NaN equal to itself).
  bool bit_equal(const HybridState& other) const;

 private:
  StateDims dims_{};
  std::array<double, kMaxStateDim> v_{};
};

/// Euclidean norm.
double norm(std::span<const double> v);

}  // namespace evtrig
