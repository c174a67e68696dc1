#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlbvp::numerics {

struct Quadrature {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 48;
  std::size_t max_panels = 100000;
};

class QuadratureError : public std::runtime_error {
 public:
  enum class Kind { tolerance_not_reached, non_finite_sample, divergence };

  QuadratureError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  std::size_t panels = 0;
};

using ScalarFn = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod 7/15 on [a,b]. Initial panels are split
/// at the given breakpoints. Does not throw on unmet tolerance; throws on
/// non-finite samples.
QuadResult integrate_estimate(const ScalarFn& g, double a, double b, const Quadrature& q,
                              std::span<const double> breakpoints = {});

/// As integrate_estimate, but throws when the tolerance cannot be met.
double integrate(const ScalarFn& g, double a, double b, const Quadrature& q,
                 std::span<const double> breakpoints = {});

/// Integral of g over [a, +inf), a > 0. Tries the substitution t = a/tau
/// first; falls back to summing geometric windows accelerated by the Wynn
/// epsilon algorithm. Throws `divergence` when the window sums do not decay,
/// `tolerance_not_reached` when neither route stabilizes (e.g. persistent
/// oscillation, which callers may handle with structure-aware summation).
double integrate_improper(const ScalarFn& g, double a, const Quadrature& q);

/// Limit extrapolation for sequences sampled at geometrically growing index
/// (s[j] = S + sum_k c_k * (m0 * 2^j)^-k). Standard Richardson table.
double richardson_limit(std::span<const double> s, double* error_estimate = nullptr);

/// Wynn epsilon acceleration of a partial-sum sequence.
class EpsilonAccelerator {
 public:
  void push(double partial_sum);
  bool has_estimate() const noexcept { return count_ >= 3; }
  double estimate() const;
  /// Change of the accelerated value over the last push; infinite until
  /// enough terms arrived.
  double stability() const;

 private:
  std::vector<double> diag_;       // last anti-diagonal of the epsilon table
  std::vector<double> prev_diag_;
  double best_ = 0.0, prev_best_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace hlbvp::numerics
