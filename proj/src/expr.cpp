#include "hlbvp/expr.hpp"

#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace hlbvp::expr {

namespace {

enum class Func1 { fsin, fcos, fexp, flog, fsqrt, fabs, fpospart, fnegpart };
enum class Func2 { fmin, fmax, fpow };

const char* func1_name(Func1 f) {
  switch (f) {
    case Func1::fsin: return "sin";
    case Func1::fcos: return "cos";
    case Func1::fexp: return "exp";
    case Func1::flog: return "log";
    case Func1::fsqrt: return "sqrt";
    case Func1::fabs: return "abs";
    case Func1::fpospart: return "pospart";
    case Func1::fnegpart: return "negpart";
  }
  return "?";
}

const char* func2_name(Func2 f) {
  switch (f) {
    case Func2::fmin: return "min";
    case Func2::fmax: return "max";
    case Func2::fpow: return "pow";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

struct Expr::Node {
  enum class Kind { number, variable, neg, add, sub, mul, div, pow_op, call1, call2, piecewise };

  Kind kind;
  double value = 0.0;  // number literal or piecewise boundary
  int slot = -1;       // variable slot
  Func1 f1{};
  Func2 f2{};
  std::shared_ptr<const Node> a, b;

  using Ptr = std::shared_ptr<const Node>;

  static Ptr number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->value = v;
    return n;
  }
  static Ptr variable(int slot) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->slot = slot;
    return n;
  }
  static Ptr unary(Kind k, Ptr a) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
  }
  static Ptr binary(Kind k, Ptr a, Ptr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static Ptr call(Func1 f, Ptr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::call1;
    n->f1 = f;
    n->a = std::move(a);
    return n;
  }
  static Ptr call(Func2 f, Ptr a, Ptr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::call2;
    n->f2 = f;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static Ptr piecewise_node(double boundary, Ptr left, Ptr right) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::piecewise;
    n->value = boundary;
    n->a = std::move(left);
    n->b = std::move(right);
    return n;
  }
};

namespace {

using Node = Expr::Node;
using Kind = Expr::Node::Kind;

// ---------------------------------------------------------------------------
// Printing

// Precedence levels: add/sub 1, mul/div 2, unary minus 3, pow 4, atom 5.
int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow_op: return 4;
    default: return 5;
  }
}

void print_with_names(const Node& n, const std::vector<std::string>& vars, std::string& out);

void print_child_named(const Node& child, int parent_prec, bool tie,
                       const std::vector<std::string>& vars, std::string& out) {
  const bool paren =
      precedence(child) < parent_prec || (precedence(child) == parent_prec && tie);
  if (paren) out += '(';
  print_with_names(child, vars, out);
  if (paren) out += ')';
}

void print_with_names(const Node& n, const std::vector<std::string>& vars, std::string& out) {
  switch (n.kind) {
    case Kind::number: out += format_number(n.value); return;
    case Kind::variable: out += vars[static_cast<std::size_t>(n.slot)]; return;
    case Kind::neg:
      out += '-';
      print_child_named(*n.a, 3, false, vars, out);
      return;
    case Kind::add:
      print_child_named(*n.a, 1, false, vars, out);
      out += " + ";
      print_child_named(*n.b, 1, true, vars, out);
      return;
    case Kind::sub:
      print_child_named(*n.a, 1, false, vars, out);
      out += " - ";
      print_child_named(*n.b, 1, true, vars, out);
      return;
    case Kind::mul:
      print_child_named(*n.a, 2, false, vars, out);
      out += "*";
      print_child_named(*n.b, 2, true, vars, out);
      return;
    case Kind::div:
      print_child_named(*n.a, 2, false, vars, out);
      out += "/";
      print_child_named(*n.b, 2, true, vars, out);
      return;
    case Kind::pow_op:
      print_child_named(*n.a, 4, true, vars, out);
      out += "^";
      print_child_named(*n.b, 3, false, vars, out);
      return;
    case Kind::call1:
      out += func1_name(n.f1);
      out += '(';
      print_with_names(*n.a, vars, out);
      out += ')';
      return;
    case Kind::call2:
      out += func2_name(n.f2);
      out += '(';
      print_with_names(*n.a, vars, out);
      out += ", ";
      print_with_names(*n.b, vars, out);
      out += ')';
      return;
    case Kind::piecewise:
      out += "piecewise(";
      out += format_number(n.value);
      out += ", ";
      print_with_names(*n.a, vars, out);
      out += ", ";
      print_with_names(*n.b, vars, out);
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(const char* what, const Node& n,
                               const std::vector<std::string>& vars) {
  std::string sub;
  print_with_names(n, vars, sub);
  throw EvalError(std::string(what) + " in '" + sub + "'");
}

double checked_pow(double base, double expo, const Node& n,
                   const std::vector<std::string>& vars) {
  if (base == 0.0 && expo < 0.0) domain_error("zero raised to a negative power", n, vars);
  if (base < 0.0 && expo != std::floor(expo))
    domain_error("negative base with non-integer exponent", n, vars);
  return std::pow(base, expo);
}

double eval_node(const Node& n, std::span<const double> env,
                 const std::vector<std::string>& vars) {
  double r = 0.0;
  switch (n.kind) {
    case Kind::number: r = n.value; break;
    case Kind::variable: r = env[static_cast<std::size_t>(n.slot)]; break;
    case Kind::neg: r = -eval_node(*n.a, env, vars); break;
    case Kind::add: r = eval_node(*n.a, env, vars) + eval_node(*n.b, env, vars); break;
    case Kind::sub: r = eval_node(*n.a, env, vars) - eval_node(*n.b, env, vars); break;
    case Kind::mul: r = eval_node(*n.a, env, vars) * eval_node(*n.b, env, vars); break;
    case Kind::div: {
      const double num = eval_node(*n.a, env, vars);
      const double den = eval_node(*n.b, env, vars);
      if (den == 0.0) domain_error("division by zero", n, vars);
      r = num / den;
      break;
    }
    case Kind::pow_op:
      r = checked_pow(eval_node(*n.a, env, vars), eval_node(*n.b, env, vars), n, vars);
      break;
    case Kind::call1: {
      const double x = eval_node(*n.a, env, vars);
      switch (n.f1) {
        case Func1::fsin: r = std::sin(x); break;
        case Func1::fcos: r = std::cos(x); break;
        case Func1::fexp: r = std::exp(x); break;
        case Func1::flog:
          if (x <= 0.0) domain_error("log of a non-positive value", n, vars);
          r = std::log(x);
          break;
        case Func1::fsqrt:
          if (x < 0.0) domain_error("sqrt of a negative value", n, vars);
          r = std::sqrt(x);
          break;
        case Func1::fabs: r = std::fabs(x); break;
        case Func1::fpospart: r = x > 0.0 ? x : 0.0; break;
        case Func1::fnegpart: r = x < 0.0 ? -x : 0.0; break;
      }
      break;
    }
    case Kind::call2: {
      const double x = eval_node(*n.a, env, vars);
      const double y = eval_node(*n.b, env, vars);
      switch (n.f2) {
        case Func2::fmin: r = std::min(x, y); break;
        case Func2::fmax: r = std::max(x, y); break;
        case Func2::fpow: r = checked_pow(x, y, n, vars); break;
      }
      break;
    }
    case Kind::piecewise:
      r = env[0] <= n.value ? eval_node(*n.a, env, vars) : eval_node(*n.b, env, vars);
      break;
  }
  if (!std::isfinite(r)) domain_error("non-finite value", n, vars);
  return r;
}

// ---------------------------------------------------------------------------
// Parsing (recursive descent)

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  const std::vector<std::string>& vars;

  Parser(std::string_view s, const std::vector<std::string>& v) : src(s), vars(v) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c))
      throw ParseError(std::string("expected '") + c + "' (" + what + ")", pos);
  }

  Node::Ptr parse_expression() {
    Node::Ptr lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        lhs = Node::binary(Kind::add, lhs, parse_term());
      } else if (consume('-')) {
        lhs = Node::binary(Kind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Node::Ptr parse_term() {
    Node::Ptr lhs = parse_factor();
    for (;;) {
      if (consume('*')) {
        lhs = Node::binary(Kind::mul, lhs, parse_factor());
      } else if (consume('/')) {
        lhs = Node::binary(Kind::div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Node::Ptr parse_factor() {
    if (consume('-')) return Node::unary(Kind::neg, parse_factor());
    return parse_power();
  }

  Node::Ptr parse_power() {
    Node::Ptr base = parse_atom();
    if (consume('^')) {
      // exponent parses a factor, giving right associativity and `t^-2`
      return Node::binary(Kind::pow_op, base, parse_factor());
    }
    return base;
  }

  Node::Ptr parse_atom() {
    skip_ws();
    if (pos >= src.size()) throw ParseError("unexpected end of input, expected operand", pos);
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '(') {
      ++pos;
      Node::Ptr inner = parse_expression();
      expect(')', "closing parenthesis");
      return inner;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Node::Ptr parse_number() {
    const std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' belongs to a following identifier, not this literal
      }
    }
    const std::string text(src.substr(start, pos - start));
    if (text == "." ) throw ParseError("malformed number", start);
    try {
      return Node::number(std::stod(text));
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + text + "'", start);
    }
  }

  Node::Ptr parse_ident() {
    const std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    const std::string name(src.substr(start, pos - start));

    skip_ws();
    const bool is_call = pos < src.size() && src[pos] == '(';
    if (is_call) return parse_call(name, start);

    if (name == "pi") return Node::number(std::numbers::pi);
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == name) return Node::variable(static_cast<int>(i));
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  Node::Ptr parse_call(const std::string& name, std::size_t name_pos) {
    expect('(', "argument list");
    std::vector<Node::Ptr> args;
    if (peek() != ')') {
      args.push_back(parse_expression());
      while (consume(',')) args.push_back(parse_expression());
    }
    expect(')', "argument list");

    auto arity = [&](std::size_t want) {
      if (args.size() != want)
        throw ParseError("function '" + name + "' takes " + std::to_string(want) +
                             " argument(s), got " + std::to_string(args.size()),
                         name_pos);
    };

    if (name == "sin") { arity(1); return Node::call(Func1::fsin, args[0]); }
    if (name == "cos") { arity(1); return Node::call(Func1::fcos, args[0]); }
    if (name == "exp") { arity(1); return Node::call(Func1::fexp, args[0]); }
    if (name == "log") { arity(1); return Node::call(Func1::flog, args[0]); }
    if (name == "sqrt") { arity(1); return Node::call(Func1::fsqrt, args[0]); }
    if (name == "abs") { arity(1); return Node::call(Func1::fabs, args[0]); }
    if (name == "pospart") { arity(1); return Node::call(Func1::fpospart, args[0]); }
    if (name == "negpart") { arity(1); return Node::call(Func1::fnegpart, args[0]); }
    if (name == "min") { arity(2); return Node::call(Func2::fmin, args[0], args[1]); }
    if (name == "max") { arity(2); return Node::call(Func2::fmax, args[0], args[1]); }
    if (name == "pow") { arity(2); return Node::call(Func2::fpow, args[0], args[1]); }
    if (name == "piecewise") {
      arity(3);
      if (vars.empty())
        throw ParseError("piecewise requires at least one declared variable", name_pos);
      if (contains_variable(*args[0]))
        throw ParseError("piecewise boundary must be a constant expression", name_pos);
      const double boundary = eval_node(*args[0], {}, vars);
      return Node::piecewise_node(boundary, args[1], args[2]);
    }
    throw ParseError("unknown identifier '" + name + "'", name_pos);
  }

  static bool contains_variable(const Node& n) {
    if (n.kind == Kind::variable) return true;
    if (n.a && contains_variable(*n.a)) return true;
    if (n.b && contains_variable(*n.b)) return true;
    return false;
  }
};

bool nodes_equal(const Node& x, const Node& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::number: return x.value == y.value;
    case Kind::variable: return x.slot == y.slot;
    case Kind::call1:
      if (x.f1 != y.f1) return false;
      break;
    case Kind::call2:
      if (x.f2 != y.f2) return false;
      break;
    case Kind::piecewise:
      if (x.value != y.value) return false;
      break;
    default: break;
  }
  if (static_cast<bool>(x.a) != static_cast<bool>(y.a)) return false;
  if (static_cast<bool>(x.b) != static_cast<bool>(y.b)) return false;
  if (x.a && !nodes_equal(*x.a, *y.a)) return false;
  if (x.b && !nodes_equal(*x.b, *y.b)) return false;
  return true;
}

void collect_breakpoints(const Node& n, std::vector<double>& out) {
  if (n.kind == Kind::piecewise) out.push_back(n.value);
  if (n.a) collect_breakpoints(*n.a, out);
  if (n.b) collect_breakpoints(*n.b, out);
}

bool uses_slot(const Node& n, int slot) {
  if (n.kind == Kind::variable && n.slot == slot) return true;
  if (n.a && uses_slot(*n.a, slot)) return true;
  if (n.b && uses_slot(*n.b, slot)) return true;
  return false;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      pos_(position) {}

EvalError::EvalError(const std::string& message) : std::runtime_error(message) {}

Expr::Expr(std::shared_ptr<const Node> root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

Expr Expr::parse(std::string_view source, std::vector<std::string> variables) {
  if (source.empty()) throw ParseError("empty expression", 0);
  Parser p(source, variables);
  Node::Ptr root = p.parse_expression();
  if (!p.at_end())
    throw ParseError(std::string("unexpected trailing input '") +
                         std::string(p.src.substr(p.pos)) + "'",
                     p.pos);
  return Expr(std::move(root), std::move(variables));
}

double Expr::eval(std::span<const double> values) const {
  if (values.size() < vars_.size())
    throw EvalError("unbound variable: expected " + std::to_string(vars_.size()) +
                    " values, got " + std::to_string(values.size()));
  return eval_node(*root_, values, vars_);
}

std::string Expr::to_string() const {
  std::string out;
  print_with_names(*root_, vars_, out);
  return out;
}

bool Expr::references(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return uses_slot(*root_, static_cast<int>(i));
  return false;
}

std::vector<double> Expr::breakpoints() const {
  std::vector<double> out;
  collect_breakpoints(*root_, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  return vars_ == other.vars_ && nodes_equal(*root_, *other.root_);
}

}  // namespace hlbvp::expr
