#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hlbvp::expr {

/// Syntax or name-resolution failure, with a 0-based character position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return pos_; }

 private:
  std::size_t pos_;
};

/// Domain failure during evaluation (log/sqrt of a negative, division by
/// zero, non-finite result). The message names the offending sub-expression.
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& message);
};

/// Immutable arithmetic expression over a fixed, ordered set of variables.
///
/// Grammar (loosest to tightest): `+ -`, `* /`, unary `-`, `^` (right
/// associative). Functions: sin, cos, exp, log, sqrt, abs, min, max, pow,
/// pospart, negpart, piecewise. Constant: pi.
///
/// piecewise(c, left, right) evaluates `left` when the principal variable
/// (the first declared one) is <= c, else `right`. The boundary c must be
/// a constant expression.
///
/// Expressions are safe to share and evaluate concurrently after parse.
class Expr {
 public:
  /// Parses `source` over the declared variables (declaration order fixes
  /// evaluation slots; the first variable is the principal one).
  static Expr parse(std::string_view source, std::vector<std::string> variables);

  /// Evaluates with one value per declared variable, in declaration order.
  /// Throws EvalError on any domain failure; never returns a non-finite.
  double eval(std::span<const double> values) const;

  /// Re-parseable rendering with minimal parentheses.
  std::string to_string() const;

  const std::vector<std::string>& variables() const noexcept { return vars_; }

  /// True if the expression mentions the named variable.
  bool references(std::string_view name) const;

  /// Boundary constants of piecewise nodes (all compare the principal
  /// variable); useful as quadrature panel split points.
  std::vector<double> breakpoints() const;

  bool structurally_equal(const Expr& other) const;

  struct Node;  // opaque

 private:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> vars);

  std::shared_ptr<const Node> root_;
  std::vector<std::string> vars_;
};

}  // namespace hlbvp::expr
