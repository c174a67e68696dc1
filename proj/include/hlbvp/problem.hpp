#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlbvp/expr.hpp"
#include "hlbvp/quadrature.hpp"
#include "hlbvp/tolerances.hpp"

namespace hlbvp {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

enum class IndexTarget { index0, index1 };
const char* to_string(IndexTarget t);

/// Functional boundary term H[u] = outer( sum c_i u(t_i) + int_0^R w(t) u(t) dt ).
/// Nonnegative coefficients, nonnegative weight and a nondecreasing outer map
/// keep H cone-monotone, which is what the automatic bound mode relies on.
struct FunctionalSpec {
  struct PointTerm {
    double coefficient = 0.0;
    double node = 0.0;
  };
  enum class BoundMode { automatic, manual };

  std::vector<PointTerm> point_terms;
  std::optional<expr::Expr> weight;  // weight(t) on [0,R]
  std::optional<expr::Expr> outer;   // outer(v); identity when absent
  BoundMode bound_mode = BoundMode::automatic;
  std::optional<expr::Expr> manual_lower;  // lower(rho)
  std::optional<expr::Expr> manual_upper;  // upper(rho)

  bool empty() const { return point_terms.empty() && !weight.has_value(); }
};

/// Full problem description: (p u')' + f(t,u) = 0 with
/// alpha u(0) - beta u'(0) = B[u] and u'(R) = 0 on the compact block,
/// the sandwich data b1 F1 <= f <= b2 F2 for the half-line block, and the
/// certificate ladder.
struct ProblemSpec {
  std::optional<expr::Expr> p;   // p(t) > 0
  std::optional<expr::Expr> f;   // f(t, u)
  double alpha = 1.0;
  double beta = 0.0;
  double R = 1.0;
  double a = 0.0;  // cone interval [a, b] in [0, R]
  double b = 1.0;

  std::optional<expr::Expr> b1, b2;  // of t
  std::optional<expr::Expr> F1, F2;  // of v
  FunctionalSpec functional;

  std::vector<double> ladder_values;
  std::vector<IndexTarget> ladder_targets;

  std::optional<double> d_override;   // default: k_factor * annulus top
  std::optional<double> n_exponent;   // comparison exponent; falls back to params["n"]
  double k_factor = 2.0;
  double T_trunc = 0.0;   // 0 = auto (t_trunc_factor * R)
  double horizon = 0.0;   // 0 = auto (horizon_factor * R)
  std::optional<double> M1_override, M2_override;  // manual F_j(v)/v suprema

  /// Named constants, bound into every expression after its principal
  /// variable(s), in this order.
  std::vector<std::pair<std::string, double>> params;

  Tolerances tol;

  // ---- bound evaluation (parameters spliced into the environment) ----
  double p_at(double t) const;
  double f_at(double t, double u) const;
  double b1_at(double t) const;
  double b2_at(double t) const;
  double F1_at(double v) const;
  double F2_at(double v) const;
  double weight_at(double t) const;       // 0 when no weight
  double outer_at(double v) const;        // identity when no outer
  double manual_lower_at(double rho) const;
  double manual_upper_at(double rho) const;

  numerics::ScalarFn p_fn() const;
  numerics::ScalarFn b1_fn() const;
  numerics::ScalarFn b2_fn() const;

  /// Piecewise cut points (in t) of p; used to align quadrature panels.
  std::vector<double> p_breakpoints() const;
  std::vector<double> b1_breakpoints() const;

  double resolved_n() const;        // n_exponent, else params["n"]; throws if absent
  std::optional<double> param(std::string_view name) const;
  double resolved_T_trunc() const { return T_trunc > 0 ? T_trunc : tol.t_trunc_factor * R; }
  double resolved_horizon() const { return horizon > 0 ? horizon : tol.horizon_factor * R; }

 private:
  double eval1(const std::optional<expr::Expr>& e, const char* what, double x) const;
  double eval2(const std::optional<expr::Expr>& e, const char* what, double x, double y) const;
};

/// One screened assumption: verdict plus the worst violation found.
struct AssumptionCheck {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::string detail;
  std::array<double, 2> witness{0.0, 0.0};
  double magnitude = 0.0;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::string grid_description;

  bool ok() const;  // no failed check
  Verdict overall() const;
  const AssumptionCheck* find(std::string_view name) const;
};

struct ScreenParams {
  int points = 256;        // grid points per axis
  double T_screen = 0.0;   // 0 = auto: max(10 R, 100)
  double u_screen = 0.0;   // 0 = auto: 2 * max ladder value (10 when no ladder)
  int ff2_kmax = 40;
  double tolerance = 1e-9;

  static ScreenParams from(const ProblemSpec& spec);
};

/// Numerically screens the standing assumptions (positivity of p, sign of f,
/// monotone F_j, the sandwich, the limsup condition, functional sign
/// structure). Failures are verdicts with witnesses, never exceptions.
AssumptionReport validate(const ProblemSpec& spec, const ScreenParams& screen);
AssumptionReport validate(const ProblemSpec& spec);

}  // namespace hlbvp
