#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hlbvp::numerics {

/// dy/dt = rhs(t, y) written into dydt (same length as y).
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Scalar monitor; a sign change inside a step is located by bisection on
/// the dense-output interpolant.
struct EventSpec {
  std::string kind;
  std::function<double(double t, std::span<const double> y)> fn;
  bool terminal = false;
};

struct EventHit {
  std::string kind;
  double time = 0.0;
  std::vector<double> state;
};

enum class IvpStatus { completed, event_stop, step_failure };

struct Trajectory {
  std::vector<double> nodes;                     // strictly increasing
  std::vector<std::vector<double>> states;       // y at node
  std::vector<std::vector<double>> derivatives;  // y' at node
  std::vector<EventHit> events;
  IvpStatus status = IvpStatus::completed;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  /// Mean accepted step length; used by convergence-order studies.
  double mean_step() const;
};

struct IvpOptions {
  double tol = 1e-9;  // used for both absolute and relative control
  double max_step = 0.0;  // 0 = unbounded
  std::size_t max_steps = 4000000;
  /// If nonempty, output nodes are exactly these times (must lie in
  /// [t0, t_end], sorted ascending); t0 is always included.
  std::vector<double> t_eval;
};

/// Adaptive Dormand-Prince 5(4) integration from t0 to t_end (t0 < t_end).
/// Events are located to a time tolerance of 1e-10 * (t_end - t0); a
/// terminal event stops the integration at the located time.
Trajectory solve_ivp(const OdeRhs& rhs, double t0, std::span<const double> y0, double t_end,
                     const IvpOptions& options, std::span<const EventSpec> events = {});

}  // namespace hlbvp::numerics
