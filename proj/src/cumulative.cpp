#include "hlbvp/cumulative.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hlbvp::numerics {

std::vector<double> CumulativeIntegral::make_nodes(double lo, double hi, std::size_t count,
                                                   std::span<const double> cuts) {
  if (count < 2) throw std::invalid_argument("make_nodes: need at least two nodes");
  std::vector<double> nodes;
  nodes.reserve(count + cuts.size());
  for (std::size_t i = 0; i < count; ++i)
    nodes.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  for (double c : cuts)
    if (c > lo && c < hi) nodes.push_back(c);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double x, double y) {
                            return std::fabs(x - y) <= 1e-14 * std::max(1.0, std::fabs(hi));
                          }),
              nodes.end());
  nodes.front() = lo;
  nodes.back() = hi;
  return nodes;
}

CumulativeIntegral CumulativeIntegral::build(const ScalarFn& fn, std::vector<double> nodes,
                                             const Quadrature& q) {
  if (nodes.size() < 2) throw std::invalid_argument("CumulativeIntegral: need >= 2 nodes");
  if (!std::is_sorted(nodes.begin(), nodes.end()))
    throw std::invalid_argument("CumulativeIntegral: nodes must be sorted");

  CumulativeIntegral table;
  const std::size_t n = nodes.size();
  table.nodes_ = std::move(nodes);
  table.values_.resize(n);
  table.slope_lo_.resize(n - 1);
  table.slope_hi_.resize(n - 1);

  table.values_[0] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = table.nodes_[i];
    const double b = table.nodes_[i + 1];
    const double inc = integrate(fn, a, b, q);
    table.values_[i + 1] = table.values_[i] + inc;
    // slopes sampled just inside the panel, so a piecewise integrand with a
    // breakpoint at a node contributes the correct one-sided derivative
    table.slope_lo_[i] = fn(std::nextafter(a, b));
    table.slope_hi_[i] = fn(std::nextafter(b, a));
  }
  return table;
}

double CumulativeIntegral::operator()(double x) const {
  const double lo = nodes_.front();
  const double hi = nodes_.back();
  const double slack = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (x < lo - slack || x > hi + slack)
    throw std::out_of_range("CumulativeIntegral: argument " + std::to_string(x) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  x = std::clamp(x, lo, hi);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  i = std::min(i, nodes_.size() - 2);

  const double h = nodes_[i + 1] - nodes_[i];
  const double th = (x - nodes_[i]) / h;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  return h00 * values_[i] + h10 * h * slope_lo_[i] + h01 * values_[i + 1] +
         h11 * h * slope_hi_[i];
}

double CumulativeIntegral::derivative(double x) const {
  const double lo = nodes_.front();
  const double hi = nodes_.back();
  const double slack = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (x < lo - slack || x > hi + slack)
    throw std::out_of_range("CumulativeIntegral: argument outside the table");
  x = std::clamp(x, lo, hi);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  i = std::min(i, nodes_.size() - 2);

  const double h = nodes_[i + 1] - nodes_[i];
  const double th = (x - nodes_[i]) / h;
  const double d00 = 6 * th * (th - 1) / h;
  const double d10 = 3 * th * th - 4 * th + 1;
  const double d01 = -d00;
  const double d11 = 3 * th * th - 2 * th;
  return d00 * values_[i] + d10 * slope_lo_[i] + d01 * values_[i + 1] + d11 * slope_hi_[i];
}

}  // namespace hlbvp::numerics
