#include "spgraph/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "spgraph/error.hpp"

namespace spgraph {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  int exponent = 0;
  Expr lhs;
  Expr rhs;
};

namespace {

const Expr &zero_expr() {
  static const Expr z;
  return z;
}

bool is_unary_fn(Expr::Op op) {
  switch (op) {
  case Expr::Op::Sin:
  case Expr::Op::Cos:
  case Expr::Op::Exp:
  case Expr::Op::Sqrt:
  case Expr::Op::Cosh:
  case Expr::Op::Sinh:
    return true;
  default:
    return false;
  }
}

const char *fn_name(Expr::Op op) {
  switch (op) {
  case Expr::Op::Sin:
    return "sin";
  case Expr::Op::Cos:
    return "cos";
  case Expr::Op::Exp:
    return "exp";
  case Expr::Op::Sqrt:
    return "sqrt";
  case Expr::Op::Cosh:
    return "cosh";
  case Expr::Op::Sinh:
    return "sinh";
  default:
    return "?";
  }
}

double checked_div(double a, double b) {
  if (b == 0.0)
    throw EvalError("division by zero");
  return a / b;
}

double int_pow(double base, int n) {
  if (n < 0)
    return checked_div(1.0, int_pow(base, -n));
  double result = 1.0;
  double b = base;
  unsigned k = static_cast<unsigned>(n);
  while (k) {
    if (k & 1u)
      result *= b;
    b *= b;
    k >>= 1u;
  }
  return result;
}

double apply_fn(Expr::Op op, double v) {
  switch (op) {
  case Expr::Op::Sin:
    return std::sin(v);
  case Expr::Op::Cos:
    return std::cos(v);
  case Expr::Op::Exp:
    return std::exp(v);
  case Expr::Op::Sqrt:
    if (v < 0.0)
      throw EvalError("sqrt of negative argument");
    return std::sqrt(v);
  case Expr::Op::Cosh:
    return std::cosh(v);
  case Expr::Op::Sinh:
    return std::sinh(v);
  default:
    throw std::logic_error("not a function node");
  }
}

} // namespace

Expr make_node(Expr::Op op, Expr lhs, Expr rhs, double value, int exponent) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->exponent = exponent;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Expr() : node_(nullptr) {}

Expr Expr::constant(double v) {
  if (v == 0.0 && !std::signbit(v))
    return Expr();
  return make_node(Op::Const, {}, {}, v, 0);
}

Expr Expr::variable(Var v) { return make_node(v == Var::X ? Op::VarX : Op::VarT, {}, {}, 0.0, 0); }

Expr::Op Expr::op() const { return node_ ? node_->op : Op::Const; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
int Expr::exponent() const { return node_ ? node_->exponent : 0; }
const Expr &Expr::lhs() const { return node_ ? node_->lhs : zero_expr(); }
const Expr &Expr::rhs() const { return node_ ? node_->rhs : zero_expr(); }

double Expr::operator()(double x, double t) const { return eval(*this, x, t); }

Expr operator+(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() + b.value());
  if (a.is_zero())
    return b;
  if (b.is_zero())
    return a;
  return make_node(Expr::Op::Add, a, b, 0.0, 0);
}

Expr operator-(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() - b.value());
  if (b.is_zero())
    return a;
  if (a.is_zero())
    return -b;
  return make_node(Expr::Op::Sub, a, b, 0.0, 0);
}

Expr operator*(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() * b.value());
  if (a.is_zero() || b.is_zero())
    return Expr();
  if (a.is_constant() && a.value() == 1.0)
    return b;
  if (b.is_constant() && b.value() == 1.0)
    return a;
  return make_node(Expr::Op::Mul, a, b, 0.0, 0);
}

Expr operator/(const Expr &a, const Expr &b) {
  if (b.is_zero())
    throw EvalError("division by zero");
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.value() / b.value());
  if (a.is_zero())
    return Expr();
  if (b.is_constant() && b.value() == 1.0)
    return a;
  return make_node(Expr::Op::Div, a, b, 0.0, 0);
}

Expr operator-(const Expr &a) {
  if (a.is_constant())
    return Expr::constant(-a.value());
  if (a.op() == Expr::Op::Neg)
    return a.lhs();
  return make_node(Expr::Op::Neg, a, {}, 0.0, 0);
}

Expr pow(const Expr &base, int n) {
  if (n == 0)
    return Expr::constant(1.0);
  if (n == 1)
    return base;
  if (base.is_constant())
    return Expr::constant(int_pow(base.value(), n));
  return make_node(Expr::Op::Pow, base, {}, 0.0, n);
}

Expr apply(Expr::Op fn, const Expr &arg) {
  if (!is_unary_fn(fn))
    throw std::invalid_argument("apply: not a function op");
  if (arg.is_constant()) {
    // Fold only where the result is defined; otherwise keep the node so the
    // domain error surfaces at evaluation time.
    if (!(fn == Expr::Op::Sqrt && arg.value() < 0.0))
      return Expr::constant(apply_fn(fn, arg.value()));
  }
  return make_node(fn, arg, {}, 0.0, 0);
}

double eval(const Expr &e, double x, double t) {
  using Op = Expr::Op;
  switch (e.op()) {
  case Op::Const:
    return e.value();
  case Op::VarX:
    return x;
  case Op::VarT:
    return t;
  case Op::Add:
    return eval(e.lhs(), x, t) + eval(e.rhs(), x, t);
  case Op::Sub:
    return eval(e.lhs(), x, t) - eval(e.rhs(), x, t);
  case Op::Mul:
    return eval(e.lhs(), x, t) * eval(e.rhs(), x, t);
  case Op::Div:
    return checked_div(eval(e.lhs(), x, t), eval(e.rhs(), x, t));
  case Op::Pow:
    return int_pow(eval(e.lhs(), x, t), e.exponent());
  case Op::Neg:
    return -eval(e.lhs(), x, t);
  default:
    return apply_fn(e.op(), eval(e.lhs(), x, t));
  }
}

namespace {

Expr diff_once(const Expr &e, Var var) {
  using Op = Expr::Op;
  switch (e.op()) {
  case Op::Const:
    return Expr();
  case Op::VarX:
    return Expr::constant(var == Var::X ? 1.0 : 0.0);
  case Op::VarT:
    return Expr::constant(var == Var::T ? 1.0 : 0.0);
  case Op::Add:
    return diff_once(e.lhs(), var) + diff_once(e.rhs(), var);
  case Op::Sub:
    return diff_once(e.lhs(), var) - diff_once(e.rhs(), var);
  case Op::Mul:
    return diff_once(e.lhs(), var) * e.rhs() + e.lhs() * diff_once(e.rhs(), var);
  case Op::Div: {
    const Expr du = diff_once(e.lhs(), var);
    const Expr dv = diff_once(e.rhs(), var);
    if (dv.is_zero())
      return du / e.rhs();
    return (du * e.rhs() - e.lhs() * dv) / pow(e.rhs(), 2);
  }
  case Op::Pow: {
    const int n = e.exponent();
    return Expr::constant(n) * pow(e.lhs(), n - 1) * diff_once(e.lhs(), var);
  }
  case Op::Neg:
    return -diff_once(e.lhs(), var);
  case Op::Sin:
    return apply(Op::Cos, e.lhs()) * diff_once(e.lhs(), var);
  case Op::Cos:
    return -(apply(Op::Sin, e.lhs()) * diff_once(e.lhs(), var));
  case Op::Exp:
    return e * diff_once(e.lhs(), var);
  case Op::Sqrt: {
    const Expr du = diff_once(e.lhs(), var);
    if (du.is_zero())
      return Expr();
    return du / (Expr::constant(2.0) * e);
  }
  case Op::Cosh:
    return apply(Op::Sinh, e.lhs()) * diff_once(e.lhs(), var);
  case Op::Sinh:
    return apply(Op::Cosh, e.lhs()) * diff_once(e.lhs(), var);
  }
  throw std::logic_error("diff: unknown node");
}

} // namespace

Expr diff(const Expr &e, Var var, int order) {
  if (order < 0 || order > kMaxDiffOrder)
    throw std::out_of_range("diff: order " + std::to_string(order) + " outside [0, " +
                            std::to_string(kMaxDiffOrder) + "]");
  Expr out = e;
  for (int k = 0; k < order; ++k)
    out = diff_once(out, var);
  return out;
}

std::string to_string(const Expr &e) {
  using Op = Expr::Op;
  switch (e.op()) {
  case Op::Const: {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", e.value());
    return e.value() < 0.0 ? "(" + std::string(buf) + ")" : std::string(buf);
  }
  case Op::VarX:
    return "x";
  case Op::VarT:
    return "t";
  case Op::Add:
    return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
  case Op::Sub:
    return "(" + to_string(e.lhs()) + " - " + to_string(e.rhs()) + ")";
  case Op::Mul:
    return "(" + to_string(e.lhs()) + " * " + to_string(e.rhs()) + ")";
  case Op::Div:
    return "(" + to_string(e.lhs()) + " / " + to_string(e.rhs()) + ")";
  case Op::Pow:
    return "(" + to_string(e.lhs()) + ")^(" + std::to_string(e.exponent()) + ")";
  case Op::Neg:
    return "(-" + to_string(e.lhs()) + ")";
  default:
    return std::string(fn_name(e.op())) + "(" + to_string(e.lhs()) + ")";
  }
}

// ---------------------------------------------------------------------------
// Recursive descent parser

namespace {

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError("empty expression", pos_);
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + parse_term();
      else if (accept('-'))
        lhs = lhs - parse_term();
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr rhs = parse_unary();
        if (rhs.is_zero())
          throw ParseError("division by constant zero", at);
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-'))
      return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      Expr ex = parse_unary();
      if (!ex.is_constant() || ex.value() != std::round(ex.value()) || std::abs(ex.value()) > 1e6)
        throw ParseError("exponent must be an integer constant", at);
      return pow(base, static_cast<int>(ex.value()));
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')'))
        throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    // Exponent part only when digits follow; otherwise the 'e' is left unconsumed.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
        ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
      throw ParseError("malformed number", start);
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);
    if (id == "x")
      return Expr::variable(Var::X);
    if (id == "t")
      return Expr::variable(Var::T);
    if (id == "pi")
      return Expr::constant(std::numbers::pi);
    if (id == "e")
      return Expr::constant(std::numbers::e);

    static constexpr std::pair<std::string_view, Expr::Op> fns[] = {
        {"sin", Expr::Op::Sin},   {"cos", Expr::Op::Cos},   {"exp", Expr::Op::Exp},
        {"sqrt", Expr::Op::Sqrt}, {"cosh", Expr::Op::Cosh}, {"sinh", Expr::Op::Sinh}};
    for (const auto &[name, op] : fns) {
      if (id == name) {
        if (!accept('('))
          throw ParseError("expected '(' after " + std::string(name), pos_);
        Expr arg = parse_expr();
        if (!accept(')'))
          throw ParseError("expected ')'", pos_);
        return apply(op, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }
};

} // namespace

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

} // namespace spgraph
