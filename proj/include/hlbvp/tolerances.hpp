#pragma once

#include <algorithm>
#include <string_view>

namespace hlbvp {

/// Every knob the pipeline uses, so a report can state exactly how a run
/// was produced. Defaults are two digits tighter than the tightest
/// certificate margin the tool is expected to resolve.
struct Tolerances {
  // adaptive quadrature
  double quad_abs = 1e-10;
  double quad_rel = 1e-10;
  // kernel table construction and kernel-derived constants
  double kernel_quad = 1e-12;
  // IVP integration (absolute and relative)
  double ivp = 1e-9;
  // certificate margins count as a pass only beyond certify_tol(rho)
  double certify_base = 1e-9;
  // compact solver
  int grid_n = 513;
  double solver_tol = 1e-10;
  double damping = 0.5;
  int max_picard = 200;
  int max_newton = 80;
  // junction acceptance
  double glue = 1e-6;
  // assumption screening
  int screen_pts = 256;
  int ff2_kmax = 40;
  double screen_tol = 1e-9;
  // half-line horizons (factors of R)
  double t_trunc_factor = 1000.0;
  double horizon_factor = 10000.0;
  // extremum search
  int extremum_coarse = 64;
  int extremum_refine = 8;

  double certify_tol(double rho) const { return certify_base * std::max(1.0, rho); }

  /// "fast", "default" or "tight".
  static Tolerances profile(std::string_view name);
};

}  // namespace hlbvp
