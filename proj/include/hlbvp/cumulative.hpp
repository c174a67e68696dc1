#pragma once

#include <functional>
#include <vector>

#include "hlbvp/quadrature.hpp"

namespace hlbvp::numerics {

/// Tabulated antiderivative F(x) = integral of fn over [nodes.front(), x],
/// with panel-exact quadrature between nodes and C1 Hermite interpolation
/// using one-sided slope samples (so piecewise-defined integrands keep full
/// accuracy when their breakpoints are table nodes).
class CumulativeIntegral {
 public:
  static CumulativeIntegral build(const ScalarFn& fn, std::vector<double> nodes,
                                  const Quadrature& q);

  double operator()(double x) const;  // F(x); throws outside the node range
  double derivative(double x) const;
  double total() const { return values_.back(); }
  double domain_lo() const { return nodes_.front(); }
  double domain_hi() const { return nodes_.back(); }

  /// Uniform nodes [lo, hi] with the given extra cut points inserted.
  static std::vector<double> make_nodes(double lo, double hi, std::size_t count,
                                        std::span<const double> cuts = {});

 private:
  std::vector<double> nodes_, values_;
  std::vector<double> slope_lo_, slope_hi_;  // per-panel one-sided slopes
};

}  // namespace hlbvp::numerics
