#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "evtrig/hybrid.hpp"

namespace evtrig {

inline constexpr std::string_view kTrajectoryHeader = "t,j,phase,x,e,eta,V,R";

/// %.17g, so values round-trip through text.
std::string format_double(double v);
/// Components joined by ';' (empty for zero-length vectors).
std::string format_vector(std::span<const double> v);

/// Writes each line of `text` prefixed with "# ".
void write_comment_block(std::ostream& os, std::string_view text);

using StateObserver = std::function<double(const HybridState&)>;

/// One "flow" row per sample, plus "jump_pre"/"jump_post" rows at every jump.
void write_trajectory_csv(std::ostream& os, const HybridArc& arc, const StateObserver& V,
                          const StateObserver& R, std::string_view comment = {});

}  // namespace evtrig
