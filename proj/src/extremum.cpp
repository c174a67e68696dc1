#include "hlbvp/extremum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hlbvp::numerics {

namespace {

double checked(double v, double x, double y) {
  if (!std::isfinite(v))
    throw std::runtime_error("extremum search: non-finite sample at (" + std::to_string(x) +
                             ", " + std::to_string(y) + ")");
  return v;
}

}  // namespace

Extremum extremum_on_rect(const std::function<double(double, double)>& g,
                          std::array<double, 2> t_range, std::array<double, 2> v_range,
                          ExtremumMode mode, int coarse, int refine_rounds) {
  if (t_range[1] < t_range[0] || v_range[1] < v_range[0])
    throw std::invalid_argument("extremum_on_rect: empty rectangle");
  const double sign = mode == ExtremumMode::maximize ? 1.0 : -1.0;

  auto scan = [&](std::array<double, 2> tr, std::array<double, 2> vr, int nt, int nv) {
    Extremum best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < nt; ++i) {
      const double t = nt == 1 ? tr[0] : tr[0] + (tr[1] - tr[0]) * i / (nt - 1);
      for (int j = 0; j < nv; ++j) {
        const double v = nv == 1 ? vr[0] : vr[0] + (vr[1] - vr[0]) * j / (nv - 1);
        const double val = sign * checked(g(t, v), t, v);
        if (val > best.value) best = Extremum{{t, v}, val};
      }
    }
    return best;
  };

  const bool t_degenerate = t_range[0] == t_range[1];
  const bool v_degenerate = v_range[0] == v_range[1];
  int nt = t_degenerate ? 1 : std::max(2, coarse);
  int nv = v_degenerate ? 1 : std::max(2, coarse);

  Extremum inc = scan(t_range, v_range, nt, nv);

  double t_span = t_range[1] - t_range[0];
  double v_span = v_range[1] - v_range[0];
  const int refine_pts = 33;
  for (int round = 0; round < refine_rounds; ++round) {
    t_span /= 4.0;
    v_span /= 4.0;
    std::array<double, 2> tr{std::max(t_range[0], inc.arg[0] - 0.5 * t_span),
                             std::min(t_range[1], inc.arg[0] + 0.5 * t_span)};
    std::array<double, 2> vr{std::max(v_range[0], inc.arg[1] - 0.5 * v_span),
                             std::min(v_range[1], inc.arg[1] + 0.5 * v_span)};
    Extremum cand = scan(tr, vr, t_degenerate ? 1 : refine_pts, v_degenerate ? 1 : refine_pts);
    if (cand.value > inc.value) inc = cand;
  }

  inc.value *= sign;
  return inc;
}

Extremum extremum_on_segment(const std::function<double(double)>& g, double lo, double hi,
                             ExtremumMode mode, bool log_spaced, int coarse,
                             int refine_rounds) {
  if (hi < lo) throw std::invalid_argument("extremum_on_segment: empty segment");
  if (log_spaced && !(lo > 0.0))
    throw std::invalid_argument("extremum_on_segment: log spacing needs lo > 0");
  const double sign = mode == ExtremumMode::maximize ? 1.0 : -1.0;

  auto scan = [&](double a, double b, int n) {
    Extremum best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double x;
      if (n == 1) {
        x = a;
      } else if (log_spaced) {
        x = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
      } else {
        x = a + (b - a) * i / (n - 1);
      }
      const double val = sign * checked(g(x), x, 0.0);
      if (val > best.value) best = Extremum{{x, 0.0}, val};
    }
    return best;
  };

  if (lo == hi) {
    Extremum e = scan(lo, hi, 1);
    e.value *= sign;
    return e;
  }

  Extremum inc = scan(lo, hi, std::max(2, coarse));
  double span = log_spaced ? std::log(hi / lo) : hi - lo;
  for (int round = 0; round < refine_rounds; ++round) {
    span /= 4.0;
    double a, b;
    if (log_spaced) {
      a = std::max(lo, inc.arg[0] * std::exp(-0.5 * span));
      b = std::min(hi, inc.arg[0] * std::exp(0.5 * span));
    } else {
      a = std::max(lo, inc.arg[0] - 0.5 * span);
      b = std::min(hi, inc.arg[0] + 0.5 * span);
    }
    Extremum cand = scan(a, b, 33);
    if (cand.value > inc.value) inc = cand;
  }
  inc.value *= sign;
  return inc;
}

}  // namespace hlbvp::numerics
