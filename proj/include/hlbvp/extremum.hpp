#pragma once

#include <array>
#include <functional>

namespace hlbvp::numerics {

enum class ExtremumMode { minimize, maximize };

struct Extremum {
  std::array<double, 2> arg{0.0, 0.0};
  double value = 0.0;
};

/// Deterministic extremum search over [t1,t2] x [v1,v2]: a coarse grid scan
/// followed by rounds of local refinement (window shrinks by 4 around the
/// incumbent each round). Degenerate rectangles (segments, points) are
/// allowed. Throws on non-finite samples.
Extremum extremum_on_rect(const std::function<double(double, double)>& g,
                          std::array<double, 2> t_range, std::array<double, 2> v_range,
                          ExtremumMode mode, int coarse = 64, int refine_rounds = 8);

/// One-dimensional version on a segment; grid may be laid out in log space
/// (for suprema of quotients near 0 the log layout resolves small arguments).
Extremum extremum_on_segment(const std::function<double(double)>& g, double lo, double hi,
                             ExtremumMode mode, bool log_spaced = false, int coarse = 2048,
                             int refine_rounds = 8);

}  // namespace hlbvp::numerics
