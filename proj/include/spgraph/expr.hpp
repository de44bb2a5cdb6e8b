#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace spgraph {

enum class Var { X, T };

/// Immutable scalar expression in the arclength variable x and time t.
///
/// Grammar (whitespace ignored):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative, integer exponent
///     primary := number | 'pi' | 'e' | 'x' | 't' | func '(' expr ')' | '(' expr ')'
///     func    := sin | cos | exp | sqrt | cosh | sinh
///
/// Copies share the underlying tree, so passing by value is cheap.
class Expr {
public:
  enum class Op { Const, VarX, VarT, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Cosh, Sinh };

  Expr(); // the constant 0

  static Expr constant(double v);
  static Expr variable(Var v);

  Op op() const;
  double value() const; // Const only
  int exponent() const; // Pow only
  const Expr &lhs() const;
  const Expr &rhs() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_zero() const { return is_constant() && value() == 0.0; }

  double operator()(double x, double t) const;

  struct Node;

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_node(Op, Expr, Expr, double, int);
};

// Constructors with constant folding and 0/1 identities.
Expr operator+(const Expr &a, const Expr &b);
Expr operator-(const Expr &a, const Expr &b);
Expr operator*(const Expr &a, const Expr &b);
Expr operator/(const Expr &a, const Expr &b);
Expr operator-(const Expr &a);
Expr pow(const Expr &base, int n);
Expr apply(Expr::Op fn, const Expr &arg);

Expr parse(std::string_view src);

/// Throws EvalError on sqrt of a negative argument or division by zero.
double eval(const Expr &e, double x, double t);

/// Maximum derivative order accepted by diff().
inline constexpr int kMaxDiffOrder = 12;

Expr diff(const Expr &e, Var var, int order = 1);

/// Fully parenthesized text that parse() maps back to an equivalent tree.
std::string to_string(const Expr &e);

} // namespace spgraph
