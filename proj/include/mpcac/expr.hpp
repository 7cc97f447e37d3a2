#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mpcac {

/// Immutable scalar expression tree over variables x1..xn.
///
/// Nodes are shared, so copying an Expr is cheap and trees may be read from
/// several threads at once. Variable indices are stored 0-based; the textual
/// form uses 1-based names (`x1` is index 0).
class Expr {
 public:
  enum class Kind {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
  };

  /// The constant 0.
  Expr();

  // Raw constructors: build exactly the requested node.
  static Expr constant(double value);
  static Expr variable(int index);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);
  static Expr unary(Kind kind, Expr child);

  Kind kind() const;
  double value() const;  // Constant only
  int index() const;     // Variable only
  int exponent() const;  // Pow only
  const Expr& child(std::size_t i) const;
  std::size_t arity() const;

  bool is_constant(double v) const;

  /// Structural equality; constants compare by exact value.
  friend bool operator==(const Expr& a, const Expr& b);

  /// Largest variable index + 1, or 0 for a variable-free tree.
  int min_dimension() const;

  double eval(std::span<const double> x) const;
  double eval(const Eigen::VectorXd& x) const;

  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parse `text` as an expression over x1..xn.
///
/// Grammar (whitespace-insensitive, left-associative binaries):
///   expr   := term (("+" | "-") term)*
///   term   := unary (("*" | "/") unary)*
///   unary  := "-" unary | power
///   power  := primary ("^" uint)?
///   primary:= number | ident | "(" expr ")" | func "(" expr ")"
/// with func in {sin, cos, exp, log, sqrt} and ident matching x[1-9][0-9]*.
/// Throws ParseError.
Expr parse_expr(std::string_view text, int n);

/// Folding constructors used by differentiation. Negative constants are
/// represented as Neg(constant) so printed trees re-parse to the same shape.
namespace fold {
Expr constant(double v);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& a, int k);
Expr neg(const Expr& a);
Expr unary(Expr::Kind kind, const Expr& a);
}  // namespace fold

/// Symbolic partial derivative with respect to variable `index` (0-based).
Expr derivative(const Expr& e, int index);

/// Symbolic gradient, one component per variable in 0..n-1.
std::vector<Expr> grad(const Expr& e, int n);

/// An expression bundled with its symbolic gradient.
struct SmoothFunction {
  Expr value;
  std::vector<Expr> gradient;

  SmoothFunction() = default;
  SmoothFunction(Expr e, int n);

  double operator()(const Eigen::VectorXd& x) const { return value.eval(x); }
  Eigen::VectorXd grad_at(const Eigen::VectorXd& x) const;
};

}  // namespace mpcac
