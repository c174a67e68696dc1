#include "hlbvp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hlbvp::numerics {

namespace {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value, error;
  int depth;
};

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel evaluate_panel(const ScalarFn& g, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  auto sample = [&](double x) {
    const double v = g(x);
    if (!std::isfinite(v))
      throw QuadratureError(QuadratureError::Kind::non_finite_sample,
                            "non-finite integrand sample at x = " + std::to_string(x));
    return v;
  };

  const double fc = sample(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = sample(c - dx);
    const double f2 = sample(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kron * h;
  p.error = std::fabs((kron - gauss) * h);
  p.depth = depth;
  return p;
}

}  // namespace

QuadResult integrate_estimate(const ScalarFn& g, double a, double b, const Quadrature& q,
                              std::span<const double> breakpoints) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  if (a > b)
    throw std::invalid_argument("integrate: requires a <= b");

  std::vector<double> cuts{a, b};
  for (double bp : breakpoints)
    if (bp > a && bp < b) cuts.push_back(bp);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
  double total = 0.0, err = 0.0;
  std::size_t panels = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = evaluate_panel(g, cuts[i], cuts[i + 1], 0);
    total += p.value;
    err += p.error;
    heap.push(p);
    ++panels;
  }

  double stuck_error = 0.0;
  auto tolerance = [&]() { return std::max(q.abs_tol, q.rel_tol * std::fabs(total)); };

  while (err + stuck_error > tolerance() && !heap.empty()) {
    if (panels >= q.max_panels) break;
    Panel worst = heap.top();
    heap.pop();
    const double width = worst.b - worst.a;
    const double scale = std::max({std::fabs(worst.a), std::fabs(worst.b), 1.0});
    if (worst.depth >= q.max_depth || width <= 8.0 * std::numeric_limits<double>::epsilon() * scale) {
      // cannot refine further; keep its error on the books
      stuck_error += worst.error;
      err -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate_panel(g, worst.a, mid, worst.depth + 1);
    Panel right = evaluate_panel(g, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  out.value = total;
  out.error_estimate = err + stuck_error;
  out.converged = out.error_estimate <= tolerance();
  out.panels = panels;
  return out;
}

double integrate(const ScalarFn& g, double a, double b, const Quadrature& q,
                 std::span<const double> breakpoints) {
  QuadResult r = integrate_estimate(g, a, b, q, breakpoints);
  if (!r.converged)
    throw QuadratureError(QuadratureError::Kind::tolerance_not_reached,
                          "quadrature tolerance not reached on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]; error estimate " +
                              std::to_string(r.error_estimate));
  return r.value;
}

void EpsilonAccelerator::push(double s) {
  std::vector<double> cur(count_ + 1);
  cur[0] = s;
  for (std::size_t k = 1; k <= count_; ++k) {
    const double denom = cur[k - 1] - diag_[k - 1];
    const double lower = (k >= 2) ? diag_[k - 2] : 0.0;
    if (denom == 0.0) {
      cur[k] = cur[k - 1];  // converged column; propagate
    } else {
      cur[k] = lower + 1.0 / denom;
    }
  }
  prev_diag_ = diag_;
  diag_ = std::move(cur);
  ++count_;

  prev_best_ = best_;
  // best estimate = highest even-order column available
  std::size_t k = diag_.size() - 1;
  if (k % 2 == 1) --k;
  best_ = diag_[k];
}

double EpsilonAccelerator::estimate() const { return best_; }

double EpsilonAccelerator::stability() const {
  if (count_ < 4) return std::numeric_limits<double>::infinity();
  return std::fabs(best_ - prev_best_);
}

double richardson_limit(std::span<const double> s, double* error_estimate) {
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("richardson_limit: empty sequence");
  std::vector<std::vector<double>> t(n);
  for (std::size_t j = 0; j < n; ++j) {
    t[j].resize(j + 1);
    t[j][0] = s[j];
    double pow2 = 1.0;
    for (std::size_t k = 1; k <= j; ++k) {
      pow2 *= 2.0;
      t[j][k] = (pow2 * t[j][k - 1] - t[j - 1][k - 1]) / (pow2 - 1.0);
    }
  }
  if (error_estimate) {
    *error_estimate = n >= 2 ? std::fabs(t[n - 1][n - 1] - t[n - 2][n - 2])
                             : std::numeric_limits<double>::infinity();
  }
  return t[n - 1][n - 1];
}

double integrate_improper(const ScalarFn& g, double a, const Quadrature& q) {
  if (!(a > 0.0))
    throw std::invalid_argument("integrate_improper: requires a > 0");

  // Path A: map [a, inf) onto (0, 1] with t = a/tau. The Kronrod rule is
  // open, so tau = 0 is never sampled.
  {
    auto transformed = [&](double tau) {
      const double t = a / tau;
      return g(t) * a / (tau * tau);
    };
    try {
      QuadResult r = integrate_estimate(transformed, 0.0, 1.0, q);
      if (r.converged) return r.value;
    } catch (const QuadratureError& e) {
      if (e.kind() != QuadratureError::Kind::non_finite_sample) throw;
      // fall through: a blow-up near tau = 0 is analyzed by the window path
    }
  }

  // Path B: geometric windows [a 2^j, a 2^(j+1)]. Decaying window sums are
  // summed directly and accelerated with the epsilon algorithm; stagnating
  // sums indicate divergence.
  Quadrature qw = q;
  qw.max_panels = 2048;
  qw.abs_tol = std::max(q.abs_tol * 1e-2, 1e-15);

  constexpr int kMaxWindows = 48;
  double partial = 0.0;
  double quad_err = 0.0;
  EpsilonAccelerator accel;
  std::vector<double> window_abs;
  int window_failures = 0;
  int stagnant = 0;

  const double tol = std::max(q.abs_tol, q.rel_tol);

  for (int j = 0; j < kMaxWindows; ++j) {
    const double lo = a * std::ldexp(1.0, j);
    const double hi = a * std::ldexp(1.0, j + 1);
    QuadResult w = integrate_estimate(g, lo, hi, qw);
    if (!w.converged) {
      if (++window_failures >= 2)
        throw QuadratureError(QuadratureError::Kind::tolerance_not_reached,
                              "improper integral: window quadrature did not stabilize "
                              "(oscillatory integrand?)");
    } else {
      window_failures = 0;
    }
    partial += w.value;
    quad_err += w.error_estimate;
    accel.push(partial);
    window_abs.push_back(std::fabs(w.value));

    const std::size_t m = window_abs.size();
    if (m >= 2) {
      const bool shrinking = window_abs[m - 1] < 0.95 * window_abs[m - 2];
      const bool negligible = window_abs[m - 1] <= 0.25 * tol;
      stagnant = (!shrinking && !negligible) ? stagnant + 1 : 0;
      if (j >= 6 && stagnant >= 3)
        throw QuadratureError(QuadratureError::Kind::divergence,
                              "improper integral appears to diverge: window sums are not "
                              "decaying (last window " +
                                  std::to_string(window_abs[m - 1]) + ")");
    }

    // plain truncation once the geometric tail bound drops below tolerance:
    // ratio r <= 0.6 gives tail <= |W| r/(1-r) <= 1.5 |W|
    if (m >= 3 && window_abs[m - 1] <= 0.25 * tol &&
        window_abs[m - 1] <= 0.6 * window_abs[m - 2] && quad_err <= tol)
      return partial;

    if (accel.has_estimate() && accel.stability() < 0.1 * tol && j >= 4 && quad_err <= tol)
      return accel.estimate();
  }

  throw QuadratureError(QuadratureError::Kind::tolerance_not_reached,
                        "improper integral did not converge within the window budget");
}

}  // namespace hlbvp::numerics
