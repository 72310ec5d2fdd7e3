#include "evtrig/trajectory_csv.hpp"

#include <cstdio>

namespace evtrig {

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_vector(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

void write_comment_block(std::ostream& os, std::string_view text) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    os << "# " << line << '\n';
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

namespace {

void row(std::ostream& os, double t, std::size_t j, std::string_view phase, const HybridState& q,
         const StateObserver& V, const StateObserver& R) {
  os << format_double(t) << ',' << j << ',' << phase << ',' << format_vector(q.x()) << ','
     << format_vector(q.e()) << ',' << format_vector(q.eta()) << ',' << format_double(V(q)) << ','
     << format_double(R(q)) << '\n';
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const HybridArc& arc, const StateObserver& V,
                          const StateObserver& R, std::string_view comment) {
  if (!comment.empty()) write_comment_block(os, comment);
  os << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < arc.intervals.size(); ++k) {
    const auto& iv = arc.intervals[k];
    for (const auto& s : iv.samples) row(os, s.t, iv.j, "flow", s.q, V, R);
    if (k < arc.jumps.size()) {
      const auto& jr = arc.jumps[k];
      row(os, jr.t, jr.j, "jump_pre", jr.before, V, R);
      row(os, jr.t, jr.j + 1, "jump_post", jr.after, V, R);
    }
  }
}

}  // namespace evtrig
