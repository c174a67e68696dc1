#include "hlbvp/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace hlbvp {

namespace {
constexpr std::size_t kMaxParams = 16;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(IndexTarget t) {
  return t == IndexTarget::index0 ? "index0" : "index1";
}

Tolerances Tolerances::profile(std::string_view name) {
  Tolerances t;
  if (name == "default" || name.empty()) return t;
  if (name == "fast") {
    t.quad_abs = t.quad_rel = 1e-8;
    t.kernel_quad = 1e-10;
    t.ivp = 1e-7;
    t.solver_tol = 1e-8;
    t.grid_n = 257;
    t.screen_pts = 128;
    t.extremum_refine = 6;
    return t;
  }
  if (name == "tight") {
    t.quad_abs = t.quad_rel = 1e-12;
    t.kernel_quad = 1e-13;
    t.ivp = 1e-11;
    t.solver_tol = 1e-12;
    t.grid_n = 1025;
    t.extremum_refine = 10;
    return t;
  }
  throw std::invalid_argument("unknown tolerance profile '" + std::string(name) + "'");
}

double ProblemSpec::eval1(const std::optional<expr::Expr>& e, const char* what,
                          double x) const {
  if (!e) throw std::logic_error(std::string("ProblemSpec: missing expression for ") + what);
  double env[1 + kMaxParams];
  env[0] = x;
  for (std::size_t i = 0; i < params.size(); ++i) env[1 + i] = params[i].second;
  return e->eval(std::span<const double>(env, 1 + params.size()));
}

double ProblemSpec::eval2(const std::optional<expr::Expr>& e, const char* what, double x,
                          double y) const {
  if (!e) throw std::logic_error(std::string("ProblemSpec: missing expression for ") + what);
  double env[2 + kMaxParams];
  env[0] = x;
  env[1] = y;
  for (std::size_t i = 0; i < params.size(); ++i) env[2 + i] = params[i].second;
  return e->eval(std::span<const double>(env, 2 + params.size()));
}

double ProblemSpec::p_at(double t) const { return eval1(p, "p", t); }
double ProblemSpec::f_at(double t, double u) const { return eval2(f, "f", t, u); }
double ProblemSpec::b1_at(double t) const { return eval1(b1, "b1", t); }
double ProblemSpec::b2_at(double t) const { return eval1(b2, "b2", t); }
double ProblemSpec::F1_at(double v) const { return eval1(F1, "F1", v); }
double ProblemSpec::F2_at(double v) const { return eval1(F2, "F2", v); }

double ProblemSpec::weight_at(double t) const {
  if (!functional.weight) return 0.0;
  return eval1(functional.weight, "functional.weight", t);
}

double ProblemSpec::outer_at(double v) const {
  if (!functional.outer) return v;
  return eval1(functional.outer, "functional.outer", v);
}

double ProblemSpec::manual_lower_at(double rho) const {
  return eval1(functional.manual_lower, "functional.manual_lower", rho);
}

double ProblemSpec::manual_upper_at(double rho) const {
  return eval1(functional.manual_upper, "functional.manual_upper", rho);
}

numerics::ScalarFn ProblemSpec::p_fn() const {
  return [spec = *this](double t) { return spec.p_at(t); };
}

numerics::ScalarFn ProblemSpec::b1_fn() const {
  return [spec = *this](double t) { return spec.b1_at(t); };
}

numerics::ScalarFn ProblemSpec::b2_fn() const {
  return [spec = *this](double t) { return spec.b2_at(t); };
}

std::vector<double> ProblemSpec::p_breakpoints() const {
  return p ? p->breakpoints() : std::vector<double>{};
}

std::vector<double> ProblemSpec::b1_breakpoints() const {
  return b1 ? b1->breakpoints() : std::vector<double>{};
}

std::optional<double> ProblemSpec::param(std::string_view name) const {
  for (const auto& [key, value] : params)
    if (key == name) return value;
  return std::nullopt;
}

double ProblemSpec::resolved_n() const {
  if (n_exponent) return *n_exponent;
  if (auto n = param("n")) return *n;
  throw std::logic_error(
      "no comparison exponent: set halfline.n or provide params.n in the config");
}

// ---------------------------------------------------------------------------

bool AssumptionReport::ok() const {
  for (const auto& c : checks)
    if (c.verdict == Verdict::fail) return false;
  return true;
}

Verdict AssumptionReport::overall() const {
  Verdict out = Verdict::pass;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return Verdict::fail;
    if (c.verdict == Verdict::inconclusive) out = Verdict::inconclusive;
  }
  return out;
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ScreenParams ScreenParams::from(const ProblemSpec& spec) {
  ScreenParams s;
  s.points = spec.tol.screen_pts;
  s.ff2_kmax = spec.tol.ff2_kmax;
  s.tolerance = spec.tol.screen_tol;
  s.T_screen = std::max(10.0 * spec.R, 100.0);
  s.u_screen = spec.ladder_values.empty()
                   ? 10.0
                   : 2.0 * spec.ladder_values.back();
  return s;
}

namespace {

struct Screener {
  const ProblemSpec& spec;
  const ScreenParams& sp;
  AssumptionReport report;

  void add(AssumptionCheck c) { report.checks.push_back(std::move(c)); }

  static double grid_point(double lo, double hi, int i, int n) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }

  void structure() {
    AssumptionCheck c{.name = "structure"};
    auto fail = [&](const std::string& why) {
      c.verdict = Verdict::fail;
      c.detail = c.detail.empty() ? why : c.detail + "; " + why;
    };
    if (!(spec.alpha > 0)) fail("alpha must be > 0");
    if (!(spec.beta >= 0)) fail("beta must be >= 0");
    if (!(spec.R > 0)) fail("R must be > 0");
    if (!(0 <= spec.a && spec.a < spec.b && spec.b <= spec.R))
      fail("cone interval must satisfy 0 <= a < b <= R");
    if (spec.beta == 0 && !(spec.a > 0)) fail("a must be > 0 when beta = 0");
    if (c.verdict == Verdict::pass) c.detail = "parameter constraints hold";
    add(std::move(c));
  }

  // scans g over a grid; returns the minimum with its location
  template <typename G>
  bool grid_min(G&& g, double lo, double hi, int n, double& best, double& arg,
                std::string& err) {
    best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double x = grid_point(lo, hi, i, n);
      double v;
      try {
        v = g(x);
      } catch (const std::exception& e) {
        err = std::string(e.what()) + " at " + std::to_string(x);
        return false;
      }
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    return true;
  }

  void positivity_of_p() {
    AssumptionCheck c{.name = "p_positive"};
    double best, arg;
    std::string err;
    if (!grid_min([&](double t) { return spec.p_at(t); }, 0.0, sp.T_screen, sp.points, best,
                  arg, err)) {
      c.verdict = Verdict::fail;
      c.detail = "p not evaluable: " + err;
    } else if (best <= 0) {
      c.verdict = Verdict::fail;
      c.detail = "p(t) <= 0";
      c.witness = {arg, 0.0};
      c.magnitude = best;
    } else {
      c.detail = "min p on grid = " + std::to_string(best);
      c.magnitude = best;
    }
    add(std::move(c));
  }

  void sign_of_f() {
    AssumptionCheck c{.name = "f_nonnegative_on_compact"};
    double worst = std::numeric_limits<double>::infinity();
    std::array<double, 2> at{0, 0};
    std::string err;
    bool ok = true;
    for (int i = 0; i < sp.points && ok; ++i) {
      const double t = grid_point(0.0, spec.R, i, sp.points);
      for (int j = 0; j < sp.points; ++j) {
        const double u = grid_point(0.0, sp.u_screen, j, sp.points);
        double v;
        try {
          v = spec.f_at(t, u);
        } catch (const std::exception& e) {
          err = e.what();
          ok = false;
          break;
        }
        if (v < worst) {
          worst = v;
          at = {t, u};
        }
      }
    }
    if (!ok) {
      c.verdict = Verdict::fail;
      c.detail = "f not evaluable: " + err;
    } else if (worst < -sp.tolerance) {
      c.verdict = Verdict::fail;
      c.detail = "f(t,u) < 0 on [0,R]";
      c.witness = at;
      c.magnitude = worst;
    } else {
      c.detail = "min f on compact grid = " + std::to_string(worst);
      c.magnitude = worst;
    }
    add(std::move(c));

    AssumptionCheck z{.name = "f_vanishes_at_zero"};
    double worst_abs = 0.0;
    double arg = 0.0;
    for (int i = 0; i < sp.points; ++i) {
      const double t = grid_point(0.0, sp.T_screen, i, sp.points);
      double v;
      try {
        v = std::fabs(spec.f_at(t, 0.0));
      } catch (const std::exception& e) {
        z.verdict = Verdict::fail;
        z.detail = std::string("f(.,0) not evaluable: ") + e.what();
        add(std::move(z));
        return;
      }
      if (v > worst_abs) {
        worst_abs = v;
        arg = t;
      }
    }
    if (worst_abs > sp.tolerance) {
      z.verdict = Verdict::fail;
      z.detail = "f(t,0) != 0";
      z.witness = {arg, 0.0};
      z.magnitude = worst_abs;
    } else {
      z.detail = "max |f(t,0)| = " + std::to_string(worst_abs);
      z.magnitude = worst_abs;
    }
    add(std::move(z));
  }

  void sign_of_b2() {
    AssumptionCheck c{.name = "b2_nonnegative"};
    double best, arg;
    std::string err;
    if (!grid_min([&](double t) { return spec.b2_at(t); }, spec.R, sp.T_screen, sp.points,
                  best, arg, err)) {
      c.verdict = Verdict::fail;
      c.detail = "b2 not evaluable: " + err;
    } else if (best < -sp.tolerance) {
      c.verdict = Verdict::fail;
      c.detail = "b2(t) < 0";
      c.witness = {arg, 0.0};
      c.magnitude = best;
    } else {
      c.detail = "min b2 on grid = " + std::to_string(best);
      c.magnitude = best;
    }
    add(std::move(c));
  }

  void monotone_F(int which) {
    const std::string name = which == 1 ? "F1" : "F2";
    auto F = [&](double v) { return which == 1 ? spec.F1_at(v) : spec.F2_at(v); };

    AssumptionCheck c{.name = name + "_shape"};
    try {
      const double f0 = F(0.0);
      if (std::fabs(f0) > sp.tolerance) {
        c.verdict = Verdict::fail;
        c.detail = name + "(0) != 0 (value " + std::to_string(f0) + ")";
        add(std::move(c));
        return;
      }
      double prev = f0;
      for (int i = 1; i < sp.points; ++i) {
        const double v = grid_point(0.0, sp.u_screen, i, sp.points);
        const double fv = F(v);
        if (fv < prev - sp.tolerance) {
          c.verdict = Verdict::fail;
          c.detail = name + " decreases";
          c.witness = {v, 0.0};
          c.magnitude = prev - fv;
          add(std::move(c));
          return;
        }
        if (fv <= 0.0) {
          c.verdict = Verdict::fail;
          c.detail = name + "(v) <= 0 for v > 0";
          c.witness = {v, 0.0};
          c.magnitude = fv;
          add(std::move(c));
          return;
        }
        prev = std::max(prev, fv);
      }
      c.detail = name + " nondecreasing, " + name + "(0) = 0, positive for v > 0";
    } catch (const std::exception& e) {
      c.verdict = Verdict::fail;
      c.detail = name + " not evaluable: " + std::string(e.what());
    }
    add(std::move(c));
  }

  void sandwich() {
    AssumptionCheck lo{.name = "sandwich_lower"};
    AssumptionCheck hi{.name = "sandwich_upper"};
    double worst_lo = std::numeric_limits<double>::infinity();
    double worst_hi = std::numeric_limits<double>::infinity();
    std::array<double, 2> at_lo{0, 0}, at_hi{0, 0};
    try {
      for (int i = 0; i < sp.points; ++i) {
        const double t = grid_point(spec.R, sp.T_screen, i, sp.points);
        const double b1v = spec.b1_at(t);
        const double b2v = spec.b2_at(t);
        for (int j = 0; j < sp.points; ++j) {
          const double u = grid_point(0.0, sp.u_screen, j, sp.points);
          const double fv = spec.f_at(t, u);
          const double lo_gap = fv - b1v * spec.F1_at(u);
          const double hi_gap = b2v * spec.F2_at(u) - fv;
          if (lo_gap < worst_lo) {
            worst_lo = lo_gap;
            at_lo = {t, u};
          }
          if (hi_gap < worst_hi) {
            worst_hi = hi_gap;
            at_hi = {t, u};
          }
        }
      }
    } catch (const std::exception& e) {
      lo.verdict = hi.verdict = Verdict::fail;
      lo.detail = hi.detail = std::string("sandwich not evaluable: ") + e.what();
      add(std::move(lo));
      add(std::move(hi));
      return;
    }
    const double scale_tol = sp.tolerance * std::max(1.0, std::fabs(worst_lo));
    if (worst_lo < -scale_tol) {
      lo.verdict = Verdict::fail;
      lo.detail = "b1(t) F1(u) > f(t,u)";
      lo.witness = at_lo;
      lo.magnitude = worst_lo;
    } else {
      lo.detail = "min (f - b1 F1) = " + std::to_string(worst_lo);
      lo.magnitude = worst_lo;
    }
    if (worst_hi < -sp.tolerance * std::max(1.0, std::fabs(worst_hi))) {
      hi.verdict = Verdict::fail;
      hi.detail = "f(t,u) > b2(t) F2(u)";
      hi.witness = at_hi;
      hi.magnitude = worst_hi;
    } else {
      hi.detail = "min (b2 F2 - f) = " + std::to_string(worst_hi);
      hi.magnitude = worst_hi;
    }
    add(std::move(lo));
    add(std::move(hi));
  }

  void limsup(int which) {
    const std::string name = which == 1 ? "F1" : "F2";
    auto F = [&](double v) { return which == 1 ? spec.F1_at(v) : spec.F2_at(v); };
    AssumptionCheck c{.name = name + "_limsup_at_zero"};
    // quotient F(v)/v along v = 2^-k; bounded <=> finite limsup
    std::vector<double> q;
    try {
      for (int k = 0; k <= sp.ff2_kmax; ++k) {
        const double v = std::ldexp(1.0, -k);
        q.push_back(F(v) / v);
      }
    } catch (const std::exception& e) {
      c.verdict = Verdict::inconclusive;
      c.detail = name + "/v not evaluable near 0: " + std::string(e.what());
      add(std::move(c));
      return;
    }
    double head_max = 0.0;
    for (int k = 0; k <= sp.ff2_kmax - 10; ++k) head_max = std::max(head_max, q[k]);
    const double tail = q.back();
    if (tail <= head_max * (1.0 + 1e-9) + sp.tolerance) {
      c.detail = "quotient bounded along the dyadic grid (last = " + std::to_string(tail) + ")";
      c.magnitude = tail;
    } else if (tail >= 2.0 * std::max(head_max, sp.tolerance)) {
      c.verdict = Verdict::fail;
      c.detail = name + "(v)/v grows without sign of a bound as v -> 0";
      c.witness = {std::ldexp(1.0, -sp.ff2_kmax), 0.0};
      c.magnitude = tail;
    } else {
      c.verdict = Verdict::inconclusive;
      c.detail = name + "(v)/v still growing at the smallest screened v";
      c.magnitude = tail;
    }
    add(std::move(c));
  }

  void functional_shape() {
    const auto& fs = spec.functional;
    AssumptionCheck c{.name = "functional_sign"};
    for (const auto& pt : fs.point_terms) {
      if (pt.coefficient < 0) {
        c.verdict = Verdict::fail;
        c.detail = "point term coefficient < 0";
        c.magnitude = pt.coefficient;
      }
      if (pt.node < 0 || pt.node > spec.R) {
        c.verdict = Verdict::fail;
        c.detail = "point term node outside [0, R]";
        c.witness = {pt.node, 0.0};
      }
    }
    if (fs.weight) {
      double best, arg;
      std::string err;
      if (!grid_min([&](double t) { return spec.weight_at(t); }, 0.0, spec.R, sp.points, best,
                    arg, err)) {
        c.verdict = Verdict::fail;
        c.detail = "weight not evaluable: " + err;
      } else if (best < -sp.tolerance) {
        c.verdict = Verdict::fail;
        c.detail = "weight(t) < 0";
        c.witness = {arg, 0.0};
        c.magnitude = best;
      }
    }
    if (c.verdict == Verdict::pass) c.detail = "coefficients, nodes and weight sign ok";
    add(std::move(c));

    AssumptionCheck o{.name = "functional_outer_monotone"};
    try {
      const double at0 = spec.outer_at(0.0);
      if (std::fabs(at0) > sp.tolerance) {
        o.verdict = Verdict::fail;
        o.detail = "outer(0) != 0 (value " + std::to_string(at0) + ")";
        add(std::move(o));
        return;
      }
      double prev = at0;
      for (int i = 1; i < sp.points; ++i) {
        const double v = grid_point(0.0, std::max(sp.u_screen, 1.0), i, sp.points);
        const double val = spec.outer_at(v);
        if (val < prev - sp.tolerance) {
          o.verdict = Verdict::fail;
          o.detail = "outer decreases";
          o.witness = {v, 0.0};
          o.magnitude = prev - val;
          add(std::move(o));
          return;
        }
        prev = std::max(prev, val);
      }
      o.detail = "outer(0) = 0, outer nondecreasing on the screen grid";
    } catch (const std::exception& e) {
      o.verdict = Verdict::fail;
      o.detail = std::string("outer not evaluable: ") + e.what();
    }
    add(std::move(o));
  }
};

}  // namespace

AssumptionReport validate(const ProblemSpec& spec, const ScreenParams& sp) {
  ScreenParams s = sp;
  if (s.T_screen <= 0) s.T_screen = std::max(10.0 * spec.R, 100.0);
  if (s.u_screen <= 0)
    s.u_screen = spec.ladder_values.empty() ? 10.0 : 2.0 * spec.ladder_values.back();

  Screener sc{spec, s, {}};
  sc.structure();
  sc.positivity_of_p();
  sc.sign_of_f();
  sc.sign_of_b2();
  sc.monotone_F(1);
  sc.monotone_F(2);
  sc.sandwich();
  sc.limsup(1);
  sc.limsup(2);
  sc.functional_shape();
  sc.report.grid_description =
      std::to_string(s.points) + " points per axis, T_screen = " + std::to_string(s.T_screen) +
      ", u_screen = " + std::to_string(s.u_screen) +
      ", dyadic limsup ladder k = 0.." + std::to_string(s.ff2_kmax);
  return sc.report;
}

AssumptionReport validate(const ProblemSpec& spec) {
  return validate(spec, ScreenParams::from(spec));
}

}  // namespace hlbvp
