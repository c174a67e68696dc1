#include "hlbvp/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hlbvp::numerics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between 5th and embedded 4th order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using Vec = std::vector<double>;

struct HermiteSegment {
  double t0, t1;
  const Vec *y0, *y1, *f0, *f1;

  void state(double t, Vec& out) const {
    const double h = t1 - t0;
    const double th = (t - t0) / h;
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    const double h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th);
    const double h11 = th * th * (th - 1);
    out.resize(y0->size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = h00 * (*y0)[i] + h10 * h * (*f0)[i] + h01 * (*y1)[i] + h11 * h * (*f1)[i];
  }

  void derivative(double t, Vec& out) const {
    const double h = t1 - t0;
    const double th = (t - t0) / h;
    const double d00 = 6 * th * (th - 1) / h;
    const double d10 = (3 * th * th - 4 * th + 1);
    const double d01 = -d00;
    const double d11 = (3 * th * th - 2 * th);
    out.resize(y0->size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = d00 * (*y0)[i] + d10 * (*f0)[i] + d01 * (*y1)[i] + d11 * (*f1)[i];
  }
};

}  // namespace

double Trajectory::mean_step() const {
  if (steps_accepted == 0 || nodes.size() < 2) return 0.0;
  return (nodes.back() - nodes.front()) / static_cast<double>(steps_accepted);
}

Trajectory solve_ivp(const OdeRhs& rhs, double t0, std::span<const double> y0, double t_end,
                     const IvpOptions& options, std::span<const EventSpec> events) {
  if (!(t0 < t_end)) throw std::invalid_argument("solve_ivp: requires t0 < t_end");
  const std::size_t dim = y0.size();

  Trajectory traj;
  Vec y(y0.begin(), y0.end());
  Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  Vec ytmp(dim), ynew(dim), yerr(dim);

  auto call_rhs = [&](double t, const Vec& yy, Vec& out) {
    rhs(t, yy, out);
  };

  auto finite = [](const Vec& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };

  call_rhs(t0, y, k1);
  if (!finite(k1) || !finite(y)) {
    traj.status = IvpStatus::step_failure;
    return traj;
  }

  const double tol = options.tol;
  const double event_ttol = 1e-10 * (t_end - t0);

  // initial step size from the scale of y and y'
  double h;
  {
    double ny = 0, nf = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double sc = tol + tol * std::fabs(y[i]);
      ny = std::max(ny, std::fabs(y[i]) / sc);
      nf = std::max(nf, std::fabs(k1[i]) / sc);
    }
    h = (nf > 0) ? 0.01 * ny / nf : 1e-3 * (t_end - t0);
    h = std::clamp(h, 1e-8 * (t_end - t0), 0.1 * (t_end - t0));
    if (h <= 0 || !std::isfinite(h)) h = 1e-6 * (t_end - t0);
  }
  if (options.max_step > 0) h = std::min(h, options.max_step);

  // output bookkeeping
  const bool use_eval = !options.t_eval.empty();
  std::size_t eval_idx = 0;
  auto emit = [&](double t, const Vec& yy, const Vec& ff) {
    traj.nodes.push_back(t);
    traj.states.emplace_back(yy);
    traj.derivatives.emplace_back(ff);
  };
  emit(t0, y, k1);
  if (use_eval && eval_idx < options.t_eval.size() &&
      options.t_eval[eval_idx] <= t0 + event_ttol)
    ++eval_idx;  // t0 already emitted

  std::vector<double> gvals(events.size());
  for (std::size_t m = 0; m < events.size(); ++m) gvals[m] = events[m].fn(t0, y);

  double t = t0;
  Vec ycand, fcand;

  while (t < t_end) {
    if (traj.steps_accepted + traj.steps_rejected > options.max_steps) {
      traj.status = IvpStatus::step_failure;
      return traj;
    }
    h = std::min(h, t_end - t);
    if (options.max_step > 0) h = std::min(h, options.max_step);
    if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t), 1.0)) {
      traj.status = IvpStatus::step_failure;  // step-size underflow
      return traj;
    }

    // the six intermediate stages
    for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    call_rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    call_rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    call_rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    call_rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    call_rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    call_rhs(t + h, ynew, k7);  // FSAL

    bool ok = finite(ynew) && finite(k7);
    double err = 0.0;
    if (ok) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double sc = tol + tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(err / static_cast<double>(dim));
    }

    if (!ok || err > 1.0) {
      ++traj.steps_rejected;
      h *= ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      continue;
    }

    const double t_new = t + h;
    HermiteSegment seg{t, t_new, &y, &ynew, &k1, &k7};

    // event detection within (t, t_new]
    double stop_time = std::numeric_limits<double>::infinity();
    std::vector<EventHit> hits;
    bool terminal_hit = false;
    for (std::size_t m = 0; m < events.size(); ++m) {
      const double g_old = gvals[m];
      const double g_new = events[m].fn(t_new, ynew);
      const bool crossed = (g_old > 0 && g_new <= 0) || (g_old < 0 && g_new >= 0);
      if (!crossed) {
        gvals[m] = g_new;
        continue;
      }
      double lo = t, hi = t_new;
      double g_lo = g_old;
      while (hi - lo > event_ttol) {
        const double mid = 0.5 * (lo + hi);
        seg.state(mid, ycand);
        const double g_mid = events[m].fn(mid, ycand);
        if ((g_lo > 0 && g_mid <= 0) || (g_lo < 0 && g_mid >= 0)) {
          hi = mid;
        } else {
          lo = mid;
          g_lo = g_mid;
        }
      }
      EventHit hit;
      hit.kind = events[m].kind;
      hit.time = hi;
      seg.state(hi, ycand);
      hit.state = ycand;
      hits.push_back(std::move(hit));
      if (events[m].terminal) {
        terminal_hit = true;
        stop_time = std::min(stop_time, hi);
      }
      gvals[m] = g_new;
    }
    std::sort(hits.begin(), hits.end(),
              [](const EventHit& x, const EventHit& y_) { return x.time < y_.time; });

    const double t_emit_end = terminal_hit ? stop_time : t_new;

    // requested output nodes inside this step
    if (use_eval) {
      while (eval_idx < options.t_eval.size() && options.t_eval[eval_idx] <= t_emit_end) {
        const double te = options.t_eval[eval_idx];
        if (te > t) {
          seg.state(te, ycand);
          seg.derivative(te, fcand);
          emit(te, ycand, fcand);
        }
        ++eval_idx;
      }
    }

    for (auto& hit : hits) {
      if (hit.time <= t_emit_end) traj.events.push_back(hit);
    }

    if (terminal_hit) {
      seg.state(stop_time, ycand);
      seg.derivative(stop_time, fcand);
      if (traj.nodes.empty() || stop_time > traj.nodes.back() + 0.0) emit(stop_time, ycand, fcand);
      ++traj.steps_accepted;
      traj.status = IvpStatus::event_stop;
      return traj;
    }

    if (!use_eval) emit(t_new, ynew, k7);

    ++traj.steps_accepted;
    t = t_new;
    y = ynew;
    k1 = k7;  // FSAL
    const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }

  if (use_eval && (traj.nodes.empty() || traj.nodes.back() < t_end - event_ttol)) {
    // ensure the final requested node is present even with rounding slack
    while (eval_idx < options.t_eval.size()) {
      const double te = options.t_eval[eval_idx++];
      if (te > traj.nodes.back()) emit(te, y, k1);
    }
  }
  traj.status = IvpStatus::completed;
  return traj;
}

}  // namespace hlbvp::numerics
