#include <atomic>
#include <optional>

#include "evtrig/errors.hpp"
#include "evtrig/kernels.hpp"

namespace evtrig::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(EVTRIG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// -1: not pinned, otherwise static_cast<int>(Isa).
std::atomic<int> g_forced{-1};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(EVTRIG_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  static const Isa isa = [] {
    if (isa_supported(Isa::avx2)) return Isa::avx2;
    if (isa_supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
  }();
  return isa;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  return forced < 0 ? detected_isa() : static_cast<Isa>(forced);
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !isa_supported(*isa)) {
    throw InvalidArgument("kernels: " + std::string(isa_name(*isa)) + " is not available on this machine");
  }
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void iss_violation_row(const PolyLoop& loop, const QuadraticIss& cert, double e,
                       std::span<const double> xs, std::span<double> out) {
  switch (active_isa()) {
#if defined(EVTRIG_HAVE_AVX2)
    case Isa::avx2: return avx2::iss_violation_row(loop, cert, e, xs, out);
#endif
#if defined(EVTRIG_HAVE_NEON)
    case Isa::neon: return neon::iss_violation_row(loop, cert, e, xs, out);
#endif
    default: return scalar::iss_violation_row(loop, cert, e, xs, out);
  }
}

void growth_ratio_row(const PolyLoop& loop, double e, std::span<const double> xs,
                      std::span<double> out) {
  switch (active_isa()) {
#if defined(EVTRIG_HAVE_AVX2)
    case Isa::avx2: return avx2::growth_ratio_row(loop, e, xs, out);
#endif
#if defined(EVTRIG_HAVE_NEON)
    case Isa::neon: return neon::growth_ratio_row(loop, e, xs, out);
#endif
    default: return scalar::growth_ratio_row(loop, e, xs, out);
  }
}

}  // namespace evtrig::kernels
