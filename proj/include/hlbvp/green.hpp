#pragma once

#include "hlbvp/cumulative.hpp"
#include "hlbvp/problem.hpp"

namespace hlbvp {

/// Green's kernel of the linear compact block
///   -(p u')' = g,  alpha u(0) - beta u'(0) = 0,  u'(R) = 0,
/// namely k(t,s) = Phi(min(s,t)) with Phi(s) = beta/(alpha p(0)) + Pi(s),
/// Pi(t) = integral of 1/p over [0, t]. Carries the derived constants
///   1/m = sup_t int_0^R k(t,s) ds,   1/M = inf_{t in [a,b]} int_a^b k(t,s) ds,
///   cone_c = min_{[a,b]} c(t),       c(t) = Phi(t)/Phi(R).
/// Immutable after build; evaluations are pure.
class GreenKernel {
 public:
  static GreenKernel build(const ProblemSpec& spec);

  double k(double t, double s) const;
  double phi(double s) const;
  double c(double t) const;
  /// dk/dt: 0 for s < t, 1/(alpha p(t)) for s > t (the s > t branch is the
  /// documented one-sided value at s = t).
  double k_t(double t, double s) const;
  double pi(double t) const;  // cumulative 1/p on [0, R]

  double inv_m() const noexcept { return inv_m_; }
  double inv_M() const noexcept { return inv_M_; }
  double cone_c() const noexcept { return cone_c_; }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double R() const noexcept { return R_; }
  double cone_a() const noexcept { return a_; }
  double cone_b() const noexcept { return b_; }
  double p0() const noexcept { return p0_; }

 private:
  GreenKernel() = default;
  void check_domain(double x, const char* what) const;

  numerics::CumulativeIntegral pi_table_;
  double alpha_ = 1, beta_ = 0, R_ = 1, a_ = 0, b_ = 1;
  double p0_ = 1;
  double phi0_ = 0;    // beta / (alpha p(0))
  double inv_m_ = 0, inv_M_ = 0, cone_c_ = 0;
};

}  // namespace hlbvp
