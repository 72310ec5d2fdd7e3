#pragma once

#include <ostream>
#include <span>
#include <string>

namespace evtrig {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name: {"simulate", "--config", "a.cfg", "--out", "t.csv"}.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace evtrig
