// Fourier multiplier symbols m(xi): parsing, printing, evaluation and parity.
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symlab {

using cplx = std::complex<double>;

/// Raised by the parser; carries the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised by evaluation at a pole (division by zero, negative power of zero).
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when evaluation produces a non-finite value.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

enum class Parity { Even, Odd, Indefinite };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "Even";
    case Parity::Odd: return "Odd";
    default: return "Indefinite";
  }
}

inline Parity parity_product(Parity a, Parity b) {
  if (a == Parity::Indefinite || b == Parity::Indefinite) return Parity::Indefinite;
  return a == b ? Parity::Even : Parity::Odd;
}

enum class Op : std::uint8_t {
  Num, I, Var, Const,  // Const: named constant bound at evaluation (pi, L)
  Neg, Add, Sub, Mul, Div, Pow,
  Call
};

enum class Fn : std::uint8_t {
  Abs, Sqrt, Exp, Tanh, Sech, Sign, Where0,
  // physical-space helpers, only accepted by the initial-condition dialect
  Cos, Sin, Gaussian, Sech2
};

struct FnInfo {
  Fn fn;
  std::string_view name;
  int arity;
  bool symbol_dialect;
};

inline constexpr std::array<FnInfo, 11> kFunctions{{
    {Fn::Abs, "abs", 1, true},
    {Fn::Sqrt, "sqrt", 1, true},
    {Fn::Exp, "exp", 1, true},
    {Fn::Tanh, "tanh", 1, true},
    {Fn::Sech, "sech", 1, true},
    {Fn::Sign, "sign", 1, true},
    {Fn::Where0, "where0", 2, true},
    {Fn::Cos, "cos", 1, false},
    {Fn::Sin, "sin", 1, false},
    {Fn::Gaussian, "gaussian", 2, false},
    {Fn::Sech2, "sech2", 2, false},
}};

inline const FnInfo& fn_info(Fn fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f;
  throw std::logic_error("unknown function id");
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression node. Children are shared, never mutated.
struct Node {
  Op op;
  double value = 0.0;        // Num literal, Pow exponent
  bool int_exponent = false; // Pow
  Fn fn = Fn::Abs;           // Call
  std::string name;          // Var / Const
  std::vector<NodePtr> args;
};

/// Dialect of the expression language. The symbol dialect has variable `xi`;
/// the initial-condition dialect has variable `x`, constants `pi` and `L`,
/// and the periodic profile helpers.
struct Dialect {
  std::string variable = "xi";
  bool physical_helpers = false;
  std::vector<std::string> constants;

  static Dialect symbol() { return {}; }
  static Dialect initial_condition() { return {"x", true, {"pi", "L"}}; }
};

/// Values bound to the Const nodes and the period used by periodic helpers.
struct Bindings {
  double pi = M_PI;
  double period = 0.0;
};

class SymbolExpr {
 public:
  SymbolExpr() = default;
  explicit SymbolExpr(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  const NodePtr& ptr() const { return root_; }
  bool empty() const { return !root_; }

  // builders, used by tests and programmatic construction
  static SymbolExpr num(double v) { return make(Op::Num, v); }
  static SymbolExpr imag() { return make(Op::I); }
  static SymbolExpr var(std::string name = "xi") {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->name = std::move(name);
    return SymbolExpr(n);
  }
  static SymbolExpr unary(Op op, const SymbolExpr& a) { return make(op, 0.0, {a.root_}); }
  static SymbolExpr binary(Op op, const SymbolExpr& a, const SymbolExpr& b) {
    return make(op, 0.0, {a.root_, b.root_});
  }
  static SymbolExpr power(const SymbolExpr& base, double exponent) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->value = exponent;
    n->int_exponent = exponent == std::floor(exponent) && std::abs(exponent) < 1e9;
    n->args = {base.root_};
    return SymbolExpr(n);
  }
  static SymbolExpr call(Fn fn, std::vector<SymbolExpr> args) {
    auto n = std::make_shared<Node>();
    n->op = Op::Call;
    n->fn = fn;
    for (auto& a : args) n->args.push_back(a.root_);
    return SymbolExpr(n);
  }

 private:
  static SymbolExpr make(Op op, double v = 0.0, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->args = std::move(args);
    return SymbolExpr(n);
  }
  NodePtr root_;
};

bool structurally_equal(const Node& a, const Node& b);

inline bool operator==(const SymbolExpr& a, const SymbolExpr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return structurally_equal(a.root(), b.root());
}

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case Op::Num:
      if (a.value != b.value) return false;
      break;
    case Op::Pow:
      if (a.value != b.value || a.int_exponent != b.int_exponent) return false;
      break;
    case Op::Var:
    case Op::Const:
      if (a.name != b.name) return false;
      break;
    case Op::Call:
      if (a.fn != b.fn) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

namespace detail {

inline constexpr int kMaxDepth = 200;

inline bool is_zero_constant(const Node& n) { return n.op == Op::Num && n.value == 0.0; }

/// Conservative range analysis: does the node always evaluate to a real value?
inline bool provably_real(const Node& n) {
  switch (n.op) {
    case Op::Num:
    case Op::Var:
    case Op::Const:
      return true;
    case Op::I:
      return false;
    case Op::Neg:
      return provably_real(*n.args[0]);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return provably_real(*n.args[0]) && provably_real(*n.args[1]);
    case Op::Pow:
      return provably_real(*n.args[0]);
    case Op::Call:
      switch (n.fn) {
        case Fn::Abs: return true;
        case Fn::Sqrt: return false;
        case Fn::Where0: return provably_real(*n.args[0]) && provably_real(*n.args[1]);
        case Fn::Gaussian:
        case Fn::Sech2: return provably_real(*n.args[0]) && provably_real(*n.args[1]);
        default: return provably_real(*n.args[0]);
      }
  }
  return false;
}

/// Conservative: true only if the node is real and >= 0 everywhere.
inline bool provably_nonnegative(const Node& n) {
  switch (n.op) {
    case Op::Num:
      return n.value >= 0.0;
    case Op::Const:
      return true;  // pi, L
    case Op::Add:
    case Op::Mul:
    case Op::Div:
      return provably_nonnegative(*n.args[0]) && provably_nonnegative(*n.args[1]);
    case Op::Pow:
      if (provably_nonnegative(*n.args[0])) return true;
      return n.int_exponent && std::fmod(n.value, 2.0) == 0.0 && provably_real(*n.args[0]);
    case Op::Call:
      switch (n.fn) {
        case Fn::Abs: return true;
        case Fn::Exp:
        case Fn::Sech: return provably_real(*n.args[0]);
        case Fn::Sqrt: return provably_nonnegative(*n.args[0]);
        case Fn::Where0:
          return provably_nonnegative(*n.args[0]) && provably_nonnegative(*n.args[1]);
        case Fn::Gaussian:
        case Fn::Sech2: return provably_real(*n.args[0]) && provably_real(*n.args[1]);
        default: return false;
      }
    default:
      return false;
  }
}

class Parser {
 public:
  Parser(std::string_view text, const Dialect& dialect) : s_(text), d_(dialect) {}

  SymbolExpr parse() {
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (static_cast<unsigned char>(s_[i]) >= 0x80) throw ParseError("non-ASCII character", i);
    auto e = expr(0);
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return SymbolExpr(e);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  bool at_number() {
    skip_ws();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }
  void guard(int depth) {
    if (depth > kMaxDepth) throw ParseError("expression nested too deeply", pos_);
  }

  static NodePtr node(Op op, std::vector<NodePtr> args, double v = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr(int depth) {
    guard(depth);
    auto lhs = term(depth + 1);
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = node(Op::Add, {lhs, term(depth + 1)});
      } else if (peek('-')) {
        ++pos_;
        lhs = node(Op::Sub, {lhs, term(depth + 1)});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term(int depth) {
    guard(depth);
    auto lhs = unary(depth + 1);
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = node(Op::Mul, {lhs, unary(depth + 1)});
      } else if (peek('/')) {
        ++pos_;
        lhs = node(Op::Div, {lhs, unary(depth + 1)});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary(int depth) {
    guard(depth);
    if (peek('-')) {
      ++pos_;
      // "-3" folds to a negative literal unless the literal is raised to a power
      if (at_number()) {
        std::size_t save = pos_;
        double v = number();
        if (!peek('^')) return node(Op::Num, {}, -v);
        pos_ = save;
      }
      return node(Op::Neg, {unary(depth + 1)});
    }
    if (peek('+')) {
      ++pos_;
      return unary(depth + 1);
    }
    return factor(depth + 1);
  }

  NodePtr factor(int depth) {
    guard(depth);
    auto base_start = pos_;
    auto b = base(depth + 1);
    if (!peek('^')) return b;
    ++pos_;
    skip_ws();
    std::size_t exp_pos = pos_;
    bool neg = false;
    if (peek('-')) {
      neg = true;
      ++pos_;
    } else if (peek('+')) {
      ++pos_;
    }
    if (!at_number()) throw ParseError("expected numeric exponent", pos_);
    double e = number();
    if (neg) e = -e;
    bool integral = e == std::floor(e) && std::abs(e) < 1e9;
    if (!integral && !provably_nonnegative(*b))
      throw ParseError("non-integer exponent requires a provably nonnegative base", exp_pos);
    (void)base_start;
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->value = e;
    n->int_exponent = integral;
    n->args = {b};
    return n;
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // "2e" without digits: the 'e' belongs to something else
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return v;
  }

  NodePtr base(int depth) {
    guard(depth);
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr(depth + 1);
      expect(')');
      return e;
    }
    if (at_number()) return node(Op::Num, {}, number());
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_')
      throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string id(s_.substr(start, pos_ - start));
    if (peek('(')) {
      const FnInfo* info = nullptr;
      for (const auto& f : kFunctions)
        if (f.name == id && (f.symbol_dialect || d_.physical_helpers)) info = &f;
      if (!info) throw ParseError("unknown function '" + id + "'", start);
      ++pos_;
      std::vector<NodePtr> args{expr(depth + 1)};
      while (peek(',')) {
        ++pos_;
        args.push_back(expr(depth + 1));
      }
      expect(')');
      if (static_cast<int>(args.size()) != info->arity)
        throw ParseError("function '" + id + "' expects " + std::to_string(info->arity) +
                             " argument(s)",
                         start);
      if (info->fn == Fn::Sign && !provably_real(*args[0]))
        throw ParseError("sign() needs a real-valued argument", start);
      auto n = std::make_shared<Node>();
      n->op = Op::Call;
      n->fn = info->fn;
      n->args = std::move(args);
      return n;
    }
    if (id == "i") return node(Op::I, {});
    if (id == d_.variable) {
      auto n = std::make_shared<Node>();
      n->op = Op::Var;
      n->name = id;
      return n;
    }
    if (std::find(d_.constants.begin(), d_.constants.end(), id) != d_.constants.end()) {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->name = id;
      return n;
    }
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view s_;
  const Dialect& d_;
  std::size_t pos_ = 0;
};

inline int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

inline void print_node(const Node& n, std::string& out);

inline void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

inline void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Num:
      if (n.value < 0 || std::signbit(n.value)) {
        out += "(" + format_number(n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      break;
    case Op::I: out += "i"; break;
    case Op::Var:
    case Op::Const: out += n.name; break;
    case Op::Neg:
      out += '-';
      // a bare literal would fold back into a negative number
      if (n.args[0]->op == Op::Num) {
        out += '(';
        print_node(*n.args[0], out);
        out += ')';
      } else {
        print_child(*n.args[0], 3, out);
      }
      break;
    case Op::Add:
    case Op::Sub:
      print_child(*n.args[0], 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      print_child(*n.args[1], 2, out);
      break;
    case Op::Mul:
    case Op::Div:
      print_child(*n.args[0], 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      print_child(*n.args[1], 3, out);
      break;
    case Op::Pow:
      print_child(*n.args[0], 5, out);
      out += "^" + format_number(n.value);
      break;
    case Op::Call:
      out += fn_info(n.fn).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      break;
  }
}

inline cplx checked(cplx v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw OverflowError("symbol evaluation overflowed");
  return v;
}

inline double wrap_periodic(double d, double period) {
  if (period <= 0) return d;
  d = std::fmod(d, period);
  if (d < -0.5 * period) d += period;
  if (d >= 0.5 * period) d -= period;
  return d;
}

inline cplx eval_node(const Node& n, double x, const Bindings& b) {
  switch (n.op) {
    case Op::Num: return {n.value, 0.0};
    case Op::I: return {0.0, 1.0};
    case Op::Var: return {x, 0.0};
    case Op::Const: return {n.name == "pi" ? b.pi : b.period, 0.0};
    case Op::Neg: return -eval_node(*n.args[0], x, b);
    case Op::Add: return checked(eval_node(*n.args[0], x, b) + eval_node(*n.args[1], x, b));
    case Op::Sub: return checked(eval_node(*n.args[0], x, b) - eval_node(*n.args[1], x, b));
    case Op::Mul: return checked(eval_node(*n.args[0], x, b) * eval_node(*n.args[1], x, b));
    case Op::Div: {
      cplx num = eval_node(*n.args[0], x, b);
      cplx den = eval_node(*n.args[1], x, b);
      if (den == cplx(0.0, 0.0)) throw PoleError("division by zero");
      return checked(num / den);
    }
    case Op::Pow: {
      cplx base = eval_node(*n.args[0], x, b);
      if (n.int_exponent) {
        long long e = static_cast<long long>(n.value);
        if (e < 0 && base == cplx(0.0, 0.0)) throw PoleError("negative power of zero");
        // repeated squaring keeps integer powers exact for real and imaginary bases
        cplx acc(1.0, 0.0), p = base;
        unsigned long long m = static_cast<unsigned long long>(e < 0 ? -e : e);
        while (m) {
          if (m & 1ULL) acc *= p;
          p *= p;
          m >>= 1ULL;
        }
        return checked(e < 0 ? cplx(1.0, 0.0) / acc : acc);
      }
      double r = base.real();  // provably nonnegative real by construction
      if (r == 0.0) {
        if (n.value < 0) throw PoleError("negative power of zero");
        return {0.0, 0.0};
      }
      return checked({std::pow(r, n.value), 0.0});
    }
    case Op::Call: {
      if (n.fn == Fn::Where0)
        return x == 0.0 ? eval_node(*n.args[1], x, b) : eval_node(*n.args[0], x, b);
      cplx a = eval_node(*n.args[0], x, b);
      switch (n.fn) {
        case Fn::Abs: return {std::abs(a), 0.0};
        case Fn::Sqrt:
          if (a.imag() == 0.0) {
            return a.real() >= 0 ? cplx(std::sqrt(a.real()), 0.0)
                                 : cplx(0.0, std::sqrt(-a.real()));
          }
          return checked(std::sqrt(a));
        case Fn::Exp:
          return checked(a.imag() == 0.0 ? cplx(std::exp(a.real()), 0.0) : std::exp(a));
        case Fn::Tanh:
          return checked(a.imag() == 0.0 ? cplx(std::tanh(a.real()), 0.0) : std::tanh(a));
        case Fn::Sech: {
          if (a.imag() == 0.0) return {1.0 / std::cosh(a.real()), 0.0};
          cplx c = std::cosh(a);
          if (c == cplx(0.0, 0.0)) throw PoleError("sech pole");
          return checked(1.0 / c);
        }
        case Fn::Sign:
          if (a.imag() != 0.0) throw std::domain_error("sign of a complex value");
          return {a.real() > 0 ? 1.0 : (a.real() < 0 ? -1.0 : 0.0), 0.0};
        case Fn::Where0:
          return a;
        case Fn::Cos: return checked(std::cos(a));
        case Fn::Sin: return checked(std::sin(a));
        case Fn::Gaussian: {
          double w = eval_node(*n.args[1], x, b).real();
          if (w == 0.0) throw PoleError("gaussian width is zero");
          double d = wrap_periodic(x - a.real(), b.period) / w;
          return {std::exp(-d * d), 0.0};
        }
        case Fn::Sech2: {
          double k = eval_node(*n.args[1], x, b).real();
          double d = wrap_periodic(x - a.real(), b.period) * k;
          double s = 1.0 / std::cosh(d);
          return {s * s, 0.0};
        }
      }
    }
  }
  throw std::logic_error("unreachable");
}

inline Parity parity_node(const Node& n) {
  switch (n.op) {
    case Op::Num:
    case Op::I:
    case Op::Const:
      return Parity::Even;
    case Op::Var:
      return Parity::Odd;
    case Op::Neg:
      return parity_node(*n.args[0]);
    case Op::Add:
    case Op::Sub: {
      if (is_zero_constant(*n.args[0])) return parity_node(*n.args[1]);
      if (is_zero_constant(*n.args[1])) return parity_node(*n.args[0]);
      Parity a = parity_node(*n.args[0]);
      Parity b = parity_node(*n.args[1]);
      return a == b ? a : Parity::Indefinite;
    }
    case Op::Mul:
    case Op::Div:
      if (n.op == Op::Mul && (is_zero_constant(*n.args[0]) || is_zero_constant(*n.args[1])))
        return Parity::Even;
      return parity_product(parity_node(*n.args[0]), parity_node(*n.args[1]));
    case Op::Pow: {
      Parity a = parity_node(*n.args[0]);
      if (a == Parity::Indefinite) return a;
      if (n.int_exponent) {
        bool even_exp = std::fmod(n.value, 2.0) == 0.0;
        return even_exp ? Parity::Even : a;
      }
      return a == Parity::Even ? Parity::Even : Parity::Indefinite;
    }
    case Op::Call: {
      Parity a = parity_node(*n.args[0]);
      switch (n.fn) {
        case Fn::Abs:
        case Fn::Sech:
          return a == Parity::Indefinite ? a : Parity::Even;
        case Fn::Sqrt:
        case Fn::Exp:
          return a == Parity::Even ? a : Parity::Indefinite;
        case Fn::Tanh:
        case Fn::Sign:
          return a;
        case Fn::Where0:
          // the pinned value only matters at xi = 0, which is its own mirror
          if (a == Parity::Even) return a;
          if (a == Parity::Odd && is_zero_constant(*n.args[1])) return a;
          return Parity::Indefinite;
        default:
          return Parity::Indefinite;
      }
    }
  }
  return Parity::Indefinite;
}

}  // namespace detail

inline SymbolExpr parse_expression(std::string_view text, const Dialect& dialect) {
  return detail::Parser(text, dialect).parse();
}

inline SymbolExpr parse_symbol(std::string_view text) {
  static const Dialect d = Dialect::symbol();
  return parse_expression(text, d);
}

/// Canonical form: minimal parentheses, shortest round-trip numbers.
inline std::string print(const SymbolExpr& e) {
  std::string out;
  if (!e.empty()) detail::print_node(e.root(), out);
  return out;
}

inline cplx eval_symbol(const SymbolExpr& e, double xi) {
  return detail::eval_node(e.root(), xi, Bindings{});
}

inline cplx eval_expression(const SymbolExpr& e, double x, const Bindings& b) {
  return detail::eval_node(e.root(), x, b);
}

/// Structural parity. Sound: Even/Odd is only reported when it holds.
inline Parity parity_symbolic(const SymbolExpr& e) { return detail::parity_node(e.root()); }

/// Sampling cross-check at deterministic quasi-random points in (0, radius].
inline Parity parity_numeric(const SymbolExpr& e, int samples = 64, double radius = 10.0) {
  if (samples < 8) throw std::invalid_argument("parity_numeric needs at least 8 samples");
  if (!(radius > 0)) throw std::invalid_argument("parity_numeric radius must be positive");
  constexpr double kTol = 1e-12;
  constexpr double kGolden = 0.6180339887498949;
  double even_res = 0.0, odd_res = 0.0;
  int used = 0;
  for (int j = 1; j <= samples; ++j) {
    double frac = std::fmod(0.5 + j * kGolden, 1.0);
    double xi = radius * (frac == 0.0 ? 1.0 : frac);
    cplx plus, minus;
    try {
      plus = eval_symbol(e, xi);
      minus = eval_symbol(e, -xi);
    } catch (const PoleError&) {
      continue;
    } catch (const OverflowError&) {
      continue;
    }
    ++used;
    double scale = std::max(1.0, std::abs(plus));
    even_res = std::max(even_res, std::abs(minus - plus) / scale);
    odd_res = std::max(odd_res, std::abs(minus + plus) / scale);
  }
  if (used == 0) throw PoleError("every parity sample point is a pole");
  if (even_res < kTol) return Parity::Even;
  if (odd_res < kTol) return Parity::Odd;
  return Parity::Indefinite;
}

/// Symbolic parity, falling back on sampling when the structural rules give up.
inline Parity parity_of(const SymbolExpr& e) {
  Parity p = parity_symbolic(e);
  if (p != Parity::Indefinite) return p;
  try {
    return parity_numeric(e);
  } catch (const PoleError&) {
    return Parity::Indefinite;
  }
}

/// True when the expression mentions the free variable.
inline bool depends_on_variable(const Node& n) {
  if (n.op == Op::Var) return true;
  for (const auto& a : n.args)
    if (depends_on_variable(*a)) return true;
  return false;
}

/// If the node is structurally kappa * (i*xi) for a real constant kappa, returns kappa.
inline std::optional<double> derivative_scale(const Node& n) {
  auto var_sign = [](const Node& m) -> std::optional<double> {
    if (m.op == Op::Var) return 1.0;
    if (m.op == Op::Neg && m.args[0]->op == Op::Var) return -1.0;
    return std::nullopt;
  };
  switch (n.op) {
    case Op::Neg:
      if (auto k = derivative_scale(*n.args[0])) return -*k;
      return std::nullopt;
    case Op::Mul: {
      const Node& a = *n.args[0];
      const Node& b = *n.args[1];
      if (a.op == Op::I)
        if (auto k = var_sign(b)) return k;
      if (b.op == Op::I)
        if (auto k = var_sign(a)) return k;
      if (a.op == Op::Num)
        if (auto k = derivative_scale(b)) return a.value * *k;
      if (b.op == Op::Num)
        if (auto k = derivative_scale(a)) return b.value * *k;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

/// Detects an overall derivative factor i*xi, i.e. m(xi) = i*xi*q(xi) with q a symbol.
inline bool has_derivative_factor(const Node& n) {
  if (derivative_scale(n)) return true;
  switch (n.op) {
    case Op::Neg: return has_derivative_factor(*n.args[0]);
    case Op::Mul: return has_derivative_factor(*n.args[0]) || has_derivative_factor(*n.args[1]);
    case Op::Div: return has_derivative_factor(*n.args[0]);
    case Op::Pow: return n.int_exponent && n.value >= 1 && has_derivative_factor(*n.args[0]);
    default: return false;
  }
}

}  // namespace symlab
