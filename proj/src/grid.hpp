#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "evtrig/certificate.hpp"

namespace evtrig::detail {

inline std::vector<double> linspace(Interval iv, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = iv.lo;
    return out;
  }
  const double span = iv.hi - iv.lo;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? iv.hi : iv.lo + span * (static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

/// Visits every point of the tensor grid over the box in lexicographic order
/// (last e component fastest). fn(x, e).
template <class Fn>
void for_each_grid_point(const Box& region, std::size_t n, Fn&& fn) {
  const std::size_t nx = region.x.size();
  const std::size_t dims = nx + region.e.size();
  std::vector<std::vector<double>> axes;
  axes.reserve(dims);
  for (const auto& iv : region.x) axes.push_back(linspace(iv, n));
  for (const auto& iv : region.e) axes.push_back(linspace(iv, n));

  std::array<double, kMaxStateDim> point{};
  std::vector<std::size_t> idx(dims, 0);
  while (true) {
    for (std::size_t k = 0; k < dims; ++k) point[k] = axes[k][idx[k]];
    fn(std::span<const double>(point.data(), nx), std::span<const double>(point.data() + nx, dims - nx));
    std::size_t k = dims;
    while (k > 0) {
      --k;
      if (++idx[k] < n) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (dims == 0) return;
  }
}

}  // namespace evtrig::detail
