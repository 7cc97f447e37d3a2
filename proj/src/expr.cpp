#include "mpcac/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "mpcac/errors.hpp"

namespace mpcac {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  int ival = 0;  // variable index or exponent
  std::array<Expr, 2> children{Expr(std::shared_ptr<const Node>()), Expr(std::shared_ptr<const Node>())};
  std::size_t arity = 0;
};

namespace {

bool is_function(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Sin:
    case Expr::Kind::Cos:
    case Expr::Kind::Exp:
    case Expr::Kind::Log:
    case Expr::Kind::Sqrt:
      return true;
    default:
      return false;
  }
}

bool is_binary(Expr::Kind k) {
  return k == Expr::Kind::Add || k == Expr::Kind::Sub ||
         k == Expr::Kind::Mul || k == Expr::Kind::Div;
}

const char* function_name(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Sin: return "sin";
    case Expr::Kind::Cos: return "cos";
    case Expr::Kind::Exp: return "exp";
    case Expr::Kind::Log: return "log";
    case Expr::Kind::Sqrt: return "sqrt";
    default: return "?";
  }
}

double ipow(double base, int k) {
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Constant;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::variable(int index) {
  if (index < 0) throw InvalidArgument("variable index must be nonnegative");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Variable;
  node->ival = index;
  return Expr(std::move(node));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw InvalidArgument("not a binary operator");
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = {std::move(lhs), std::move(rhs)};
  node->arity = 2;
  return Expr(std::move(node));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0) throw InvalidArgument("integer exponent must be nonnegative");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Pow;
  node->ival = exponent;
  node->children[0] = std::move(base);
  node->arity = 1;
  return Expr(std::move(node));
}

Expr Expr::unary(Kind kind, Expr child) {
  if (kind != Kind::Neg && !is_function(kind)) {
    throw InvalidArgument("not a unary operator");
  }
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children[0] = std::move(child);
  node->arity = 1;
  return Expr(std::move(node));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::index() const { return node_->ival; }
int Expr::exponent() const { return node_->ival; }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }
std::size_t Expr::arity() const { return node_->arity; }

bool Expr::is_constant(double v) const {
  return node_->kind == Kind::Constant && node_->value == v;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = *a.node_;
  const auto& nb = *b.node_;
  if (na.kind != nb.kind || na.arity != nb.arity) return false;
  switch (na.kind) {
    case Expr::Kind::Constant:
      return na.value == nb.value;
    case Expr::Kind::Variable:
    case Expr::Kind::Pow:
      if (na.ival != nb.ival) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < na.arity; ++i) {
    if (!(na.children[i] == nb.children[i])) return false;
  }
  return true;
}

int Expr::min_dimension() const {
  if (node_->kind == Kind::Variable) return node_->ival + 1;
  int d = 0;
  for (std::size_t i = 0; i < node_->arity; ++i) {
    d = std::max(d, node_->children[i].min_dimension());
  }
  return d;
}

double Expr::eval(const Eigen::VectorXd& x) const {
  return eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

double Expr::eval(std::span<const double> x) const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Constant:
      return nd.value;
    case Kind::Variable:
      if (static_cast<std::size_t>(nd.ival) >= x.size()) {
        throw InvalidArgument("point has fewer components than x" +
                              std::to_string(nd.ival + 1) + " requires");
      }
      return x[static_cast<std::size_t>(nd.ival)];
    case Kind::Add:
      return nd.children[0].eval(x) + nd.children[1].eval(x);
    case Kind::Sub:
      return nd.children[0].eval(x) - nd.children[1].eval(x);
    case Kind::Mul:
      return nd.children[0].eval(x) * nd.children[1].eval(x);
    case Kind::Div: {
      const double num = nd.children[0].eval(x);
      const double den = nd.children[1].eval(x);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Pow:
      return ipow(nd.children[0].eval(x), nd.ival);
    case Kind::Neg:
      return -nd.children[0].eval(x);
    case Kind::Sin:
      return std::sin(nd.children[0].eval(x));
    case Kind::Cos:
      return std::cos(nd.children[0].eval(x));
    case Kind::Exp:
      return std::exp(nd.children[0].eval(x));
    case Kind::Log: {
      const double v = nd.children[0].eval(x);
      if (!(v > 0.0)) throw DomainError("log of a nonpositive value");
      return std::log(v);
    }
    case Kind::Sqrt: {
      const double v = nd.children[0].eval(x);
      if (!(v >= 0.0)) throw DomainError("sqrt of a negative value");
      return std::sqrt(v);
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength of a node when printed; larger binds tighter.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return std::signbit(e.value()) ? 3 : 5;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_number(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format constant");
  out.append(buf, end);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      print_number(out, e.value());
      return;
    case Expr::Kind::Variable:
      out += 'x';
      out += std::to_string(e.index() + 1);
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const int p = precedence(e);
      print_wrapped(e.child(0), precedence(e.child(0)) < p, out);
      switch (e.kind()) {
        case Expr::Kind::Add: out += " + "; break;
        case Expr::Kind::Sub: out += " - "; break;
        case Expr::Kind::Mul: out += " * "; break;
        default: out += " / "; break;
      }
      print_wrapped(e.child(1), precedence(e.child(1)) <= p, out);
      return;
    }
    case Expr::Kind::Pow:
      print_wrapped(e.child(0), precedence(e.child(0)) < 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Expr::Kind::Neg:
      out += '-';
      print_wrapped(e.child(0), precedence(e.child(0)) < 3, out);
      return;
    default:
      out += function_name(e.kind());
      out += '(';
      print(e.child(0), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, what);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Expr::Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Expr::Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Expr::Kind::Neg, unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      if (start == pos_) {
        pos_ = start;
        fail("expected a nonnegative integer exponent");
      }
      int k = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
      if (ec != std::errc() || ptr != text_.data() + pos_) {
        pos_ = start;
        fail("exponent out of range");
      }
      return Expr::power(base, k);
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail("unexpected character");
  }

  Expr number() {
    const std::size_t start = pos_;
    std::size_t mantissa_digits = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_, ++mantissa_digits;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_, ++mantissa_digits;
    }
    if (mantissa_digits == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && is_digit(text_[q])) {
        while (q < text_.size() && is_digit(text_[q])) ++q;
        pos_ = q;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Expr::Kind> functions[] = {
        {"sin", Expr::Kind::Sin}, {"cos", Expr::Kind::Cos},
        {"exp", Expr::Kind::Exp}, {"log", Expr::Kind::Log},
        {"sqrt", Expr::Kind::Sqrt}};
    for (const auto& [fname, kind] : functions) {
      if (name == fname) {
        expect('(');
        Expr arg = expr();
        expect(')');
        return Expr::unary(kind, arg);
      }
    }

    const bool var_shape = name.size() >= 2 && name[0] == 'x' && name[1] >= '1' &&
                           name[1] <= '9' &&
                           std::all_of(name.begin() + 1, name.end(), is_digit);
    if (!var_shape) {
      throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                       "unknown identifier '" + std::string(name) + "'");
    }
    long long idx = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
    if (ec != std::errc() || idx > n_) {
      throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                       "variable '" + std::string(name) + "' exceeds dimension " +
                           std::to_string(n_));
    }
    return Expr::variable(static_cast<int>(idx - 1));
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, int n) {
  if (n < 0) throw InvalidArgument("dimension must be nonnegative");
  return Parser(text, n).parse();
}

// ---------------------------------------------------------------------------
// Folding constructors

namespace fold {
namespace {

bool as_constant(const Expr& e, double& v) {
  if (e.kind() == Expr::Kind::Constant) {
    v = e.value();
    return true;
  }
  if (e.kind() == Expr::Kind::Neg && e.child(0).kind() == Expr::Kind::Constant) {
    v = -e.child(0).value();
    return true;
  }
  return false;
}

bool is(const Expr& e, double target) {
  double v;
  return as_constant(e, v) && v == target;
}

}  // namespace

Expr constant(double v) {
  if (v == 0.0) return Expr::constant(0.0);
  if (v < 0.0) return Expr::unary(Expr::Kind::Neg, Expr::constant(-v));
  return Expr::constant(v);
}

Expr neg(const Expr& a) {
  double v;
  if (as_constant(a, v)) return constant(-v);
  if (a.kind() == Expr::Kind::Neg) return a.child(0);
  return Expr::unary(Expr::Kind::Neg, a);
}

Expr add(const Expr& a, const Expr& b) {
  double va = 0.0, vb = 0.0;
  const bool ca = as_constant(a, va), cb = as_constant(b, vb);
  if (ca && cb && std::isfinite(va + vb)) return constant(va + vb);
  if (ca && va == 0.0) return b;
  if (cb && vb == 0.0) return a;
  return Expr::binary(Expr::Kind::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  double va = 0.0, vb = 0.0;
  const bool ca = as_constant(a, va), cb = as_constant(b, vb);
  if (ca && cb && std::isfinite(va - vb)) return constant(va - vb);
  if (cb && vb == 0.0) return a;
  if (ca && va == 0.0) return neg(b);
  return Expr::binary(Expr::Kind::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  double va = 0.0, vb = 0.0;
  const bool ca = as_constant(a, va), cb = as_constant(b, vb);
  if ((ca && va == 0.0) || (cb && vb == 0.0)) return constant(0.0);
  if (ca && cb && std::isfinite(va * vb)) return constant(va * vb);
  if (ca && va == 1.0) return b;
  if (cb && vb == 1.0) return a;
  if (ca && va == -1.0) return neg(b);
  if (cb && vb == -1.0) return neg(a);
  return Expr::binary(Expr::Kind::Mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  double va = 0.0, vb = 0.0;
  const bool ca = as_constant(a, va), cb = as_constant(b, vb);
  if (cb && vb != 0.0) {
    if (ca && std::isfinite(va / vb)) return constant(va / vb);
    if (vb == 1.0) return a;
  }
  if (ca && va == 0.0 && !(cb && vb == 0.0)) return constant(0.0);
  return Expr::binary(Expr::Kind::Div, a, b);
}

Expr pow(const Expr& a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  double v;
  if (as_constant(a, v) && std::isfinite(ipow(v, k))) return constant(ipow(v, k));
  return Expr::power(a, k);
}

Expr unary(Expr::Kind kind, const Expr& a) {
  if (kind == Expr::Kind::Neg) return neg(a);
  return Expr::unary(kind, a);
}

}  // namespace fold

// ---------------------------------------------------------------------------
// Differentiation

Expr derivative(const Expr& e, int index) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return fold::constant(0.0);
    case K::Variable:
      return fold::constant(e.index() == index ? 1.0 : 0.0);
    case K::Add:
      return fold::add(derivative(e.child(0), index), derivative(e.child(1), index));
    case K::Sub:
      return fold::sub(derivative(e.child(0), index), derivative(e.child(1), index));
    case K::Mul: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      return fold::add(fold::mul(derivative(a, index), b),
                       fold::mul(a, derivative(b, index)));
    }
    case K::Div: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      const Expr da = derivative(a, index);
      const Expr db = derivative(b, index);
      if (fold::is(db, 0.0)) return fold::div(da, b);
      return fold::div(fold::sub(fold::mul(da, b), fold::mul(a, db)), fold::pow(b, 2));
    }
    case K::Pow: {
      const int k = e.exponent();
      const Expr du = derivative(e.child(0), index);
      if (k == 0 || fold::is(du, 0.0)) return fold::constant(0.0);
      return fold::mul(fold::mul(fold::constant(k), fold::pow(e.child(0), k - 1)), du);
    }
    case K::Neg:
      return fold::neg(derivative(e.child(0), index));
    default:
      break;
  }

  const Expr& u = e.child(0);
  const Expr du = derivative(u, index);
  if (fold::is(du, 0.0)) return fold::constant(0.0);
  switch (e.kind()) {
    case K::Sin:
      return fold::mul(Expr::unary(K::Cos, u), du);
    case K::Cos:
      return fold::neg(fold::mul(Expr::unary(K::Sin, u), du));
    case K::Exp:
      return fold::mul(e, du);
    case K::Log:
      return fold::div(du, u);
    case K::Sqrt:
      return fold::div(du, fold::mul(fold::constant(2.0), e));
    default:
      throw Error("corrupt expression node");
  }
}

std::vector<Expr> grad(const Expr& e, int n) {
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(derivative(e, i));
  return out;
}

SmoothFunction::SmoothFunction(Expr e, int n) : value(std::move(e)), gradient(grad(value, n)) {}

Eigen::VectorXd SmoothFunction::grad_at(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(gradient.size()));
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    g[static_cast<Eigen::Index>(i)] = gradient[i].eval(x);
  }
  return g;
}

}  // namespace mpcac
