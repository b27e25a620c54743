#include <gtest/gtest.h>

#include <random>

#include "symlab/symbol.hpp"

using namespace symlab;

namespace {

const Node& child(const Node& n, std::size_t i) { return *n.args.at(i); }

}  // namespace

TEST(Parse, ImaginaryTimesXi) {
  auto e = parse_symbol("i*xi");
  ASSERT_EQ(e.root().op, Op::Mul);
  EXPECT_EQ(child(e.root(), 0).op, Op::I);
  EXPECT_EQ(child(e.root(), 1).op, Op::Var);
}

TEST(Parse, QuotientOfCall) {
  auto e = parse_symbol("tanh(xi)/xi");
  ASSERT_EQ(e.root().op, Op::Div);
  EXPECT_EQ(child(e.root(), 0).op, Op::Call);
  EXPECT_EQ(child(e.root(), 0).fn, Fn::Tanh);
  EXPECT_EQ(child(e.root(), 1).op, Op::Var);
}

TEST(Parse, PowerBindsTighterThanSum) {
  auto e = parse_symbol("(i*xi)^3 + 2");
  ASSERT_EQ(e.root().op, Op::Add);
  const Node& p = child(e.root(), 0);
  ASSERT_EQ(p.op, Op::Pow);
  EXPECT_EQ(p.value, 3.0);
  EXPECT_EQ(child(p, 0).op, Op::Mul);
  EXPECT_EQ(child(e.root(), 1).op, Op::Num);
  EXPECT_EQ(child(e.root(), 1).value, 2.0);
}

TEST(Parse, Precedence) {
  EXPECT_EQ(eval_symbol(parse_symbol("2+3*4"), 0).real(), 14.0);
  EXPECT_EQ(eval_symbol(parse_symbol("2*3^2"), 0).real(), 18.0);
  EXPECT_EQ(eval_symbol(parse_symbol("-2^2"), 0).real(), -4.0);
  EXPECT_EQ(eval_symbol(parse_symbol("8/4/2"), 0).real(), 1.0);
  EXPECT_EQ(eval_symbol(parse_symbol("10-4-3"), 0).real(), 3.0);
  EXPECT_EQ(eval_symbol(parse_symbol("2^-1"), 0).real(), 0.5);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_symbol(""), ParseError);
  EXPECT_THROW(parse_symbol("xi +"), ParseError);
  EXPECT_THROW(parse_symbol("(xi"), ParseError);
  EXPECT_THROW(parse_symbol("foo(xi)"), ParseError);
  EXPECT_THROW(parse_symbol("tanh(xi, xi)"), ParseError);
  EXPECT_THROW(parse_symbol("x"), ParseError);         // wrong variable for the symbol dialect
  EXPECT_THROW(parse_symbol("gaussian(1, 2)"), ParseError);  // helper only in the IC dialect
  EXPECT_THROW(parse_symbol("xi^0.5"), ParseError);    // real power of a signed base
  EXPECT_THROW(parse_symbol("sign(i*xi)"), ParseError);
  EXPECT_THROW(parse_symbol("xi # 2"), ParseError);
  EXPECT_NO_THROW(parse_symbol("abs(xi)^0.5"));
}

TEST(Parse, ErrorOffset) {
  try {
    parse_symbol("1 + * xi");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(Parse, DepthLimit) {
  std::string deep(300, '(');
  deep += "xi";
  deep += std::string(300, ')');
  EXPECT_THROW(parse_symbol(deep), ParseError);
}

TEST(Eval, Examples) {
  auto v = eval_symbol(parse_symbol("i*xi"), 2.0);
  EXPECT_EQ(v, cplx(0.0, 2.0));
  EXPECT_THROW(eval_symbol(parse_symbol("tanh(xi)/xi"), 0.0), PoleError);
  auto w = eval_symbol(parse_symbol("(i*xi)^2"), 3.0);
  EXPECT_NEAR(w.real(), -9.0, 1e-15);
  EXPECT_NEAR(w.imag(), 0.0, 1e-15);
}

TEST(Eval, Functions) {
  const double x = 0.7;
  EXPECT_NEAR(eval_symbol(parse_symbol("sech(xi)"), x).real(), 1.0 / std::cosh(x), 1e-15);
  EXPECT_NEAR(eval_symbol(parse_symbol("sqrt(abs(xi))"), -x).real(), std::sqrt(x), 1e-15);
  EXPECT_NEAR(eval_symbol(parse_symbol("exp(-xi^2)"), x).real(), std::exp(-x * x), 1e-15);
  EXPECT_EQ(eval_symbol(parse_symbol("sign(xi)"), -x).real(), -1.0);
  EXPECT_EQ(eval_symbol(parse_symbol("sign(xi)"), 0.0).real(), 0.0);
  EXPECT_NEAR(eval_symbol(parse_symbol("abs(xi)^1.5"), -4.0).real(), 8.0, 1e-14);
}

TEST(Eval, Where0PinsTheRemovableValue) {
  auto e = parse_symbol("where0(tanh(xi)/xi, 1)");
  EXPECT_EQ(eval_symbol(e, 0.0).real(), 1.0);
  EXPECT_NEAR(eval_symbol(e, 1e-3).real(), std::tanh(1e-3) / 1e-3, 1e-15);
  EXPECT_NEAR(eval_symbol(e, 2.0).real(), std::tanh(2.0) / 2.0, 1e-15);
}

TEST(Eval, NegativePowerOfZeroIsPole) {
  EXPECT_THROW(eval_symbol(parse_symbol("xi^-2"), 0.0), PoleError);
  EXPECT_THROW(eval_symbol(parse_symbol("abs(xi)^-0.5"), 0.0), PoleError);
}

TEST(Eval, Overflow) {
  EXPECT_THROW(eval_symbol(parse_symbol("exp(xi)"), 1000.0), OverflowError);
}

TEST(InitialConditionDialect, HelpersAndConstants) {
  auto d = Dialect::initial_condition();
  Bindings b;
  b.period = 10.0;
  auto e = parse_expression("gaussian(L/2, 2)", d);
  EXPECT_NEAR(eval_expression(e, 5.0, b).real(), 1.0, 1e-15);
  EXPECT_NEAR(eval_expression(e, 7.0, b).real(), std::exp(-1.0), 1e-15);
  // periodic wrap: x = 0.5 is 4.5 away from the centre through the boundary
  auto g = parse_expression("gaussian(9, 2)", d);
  EXPECT_NEAR(eval_expression(g, 0.5, b).real(), std::exp(-1.5 * 1.5 / 4.0), 1e-15);
  auto s = parse_expression("sech2(L/2, 0.5)", d);
  EXPECT_NEAR(eval_expression(s, 7.0, b).real(), std::pow(1.0 / std::cosh(1.0), 2), 1e-15);
  auto c = parse_expression("cos(2*pi*x/L) + sin(x)", d);
  EXPECT_NEAR(eval_expression(c, 2.5, b).real(), std::cos(M_PI / 2) + std::sin(2.5), 1e-15);
  EXPECT_THROW(parse_expression("xi", d), ParseError);
}

TEST(Print, RoundTripIsCanonical) {
  for (const char* text : {"i*xi", "(i*xi)^3 + 2", "tanh(xi)/xi", "-(i*xi)^3", "abs(xi)^1.5",
                           "where0(sqrt(tanh(xi)/xi), 1)*(i*xi)", "1 + xi^2", "(-3)*xi", "xi - (1 - xi)",
                           "2^-1", "xi/(2*xi)"}) {
    auto e = parse_symbol(text);
    auto again = parse_symbol(print(e));
    EXPECT_TRUE(e == again) << text << " -> " << print(e);
    EXPECT_EQ(print(again), print(e));
  }
}

TEST(Print, RoundTripRandomTrees) {
  std::mt19937 rng(7);
  std::function<SymbolExpr(int)> gen = [&](int depth) -> SymbolExpr {
    int pick = depth <= 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 9);
    switch (pick) {
      case 0: return SymbolExpr::num(static_cast<double>(rng() % 7) * 0.25);
      case 1: return SymbolExpr::var();
      case 2: return SymbolExpr::imag();
      case 3: return SymbolExpr::binary(Op::Add, gen(depth - 1), gen(depth - 1));
      case 4: return SymbolExpr::binary(Op::Sub, gen(depth - 1), gen(depth - 1));
      case 5: return SymbolExpr::binary(Op::Mul, gen(depth - 1), gen(depth - 1));
      case 6: return SymbolExpr::binary(Op::Div, gen(depth - 1), gen(depth - 1));
      case 7: return SymbolExpr::unary(Op::Neg, gen(depth - 1));
      default: return SymbolExpr::power(gen(depth - 1), static_cast<double>(rng() % 4));
    }
  };
  for (int i = 0; i < 500; ++i) {
    auto e = gen(4);
    auto again = parse_symbol(print(e));
    EXPECT_EQ(print(again), print(e));
  }
}

TEST(Parity, SymbolicExamples) {
  EXPECT_EQ(parity_symbolic(parse_symbol("xi^2")), Parity::Even);
  EXPECT_EQ(parity_symbolic(parse_symbol("tanh(xi)/xi")), Parity::Even);
  EXPECT_EQ(parity_symbolic(parse_symbol("1 + i*xi")), Parity::Indefinite);
  EXPECT_EQ(parity_symbolic(parse_symbol("i*xi")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("(i*xi)^3")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("abs(xi)*(i*xi)")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("where0(sqrt(tanh(xi)/xi), 1)*(i*xi)")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("where0(i*xi*abs(xi)^-0.5, 0)")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("where0(i*xi*abs(xi)^-0.5, 1)")), Parity::Indefinite);
  EXPECT_EQ(parity_symbolic(parse_symbol("xi + 0")), Parity::Odd);
  EXPECT_EQ(parity_symbolic(parse_symbol("(1 + xi)^2")), Parity::Indefinite);
  EXPECT_EQ(parity_symbolic(parse_symbol("exp(xi)")), Parity::Indefinite);
  EXPECT_EQ(parity_symbolic(parse_symbol("exp(xi^2)")), Parity::Even);
  EXPECT_EQ(parity_symbolic(parse_symbol("sign(xi)*xi")), Parity::Even);
}

TEST(Parity, NumericExamples) {
  EXPECT_EQ(parity_numeric(parse_symbol("abs(xi)^1.5"), 64, 10), Parity::Even);
  EXPECT_EQ(parity_numeric(parse_symbol("i*xi^3"), 64, 10), Parity::Odd);
  EXPECT_EQ(parity_numeric(parse_symbol("exp(xi)"), 64, 10), Parity::Indefinite);
  EXPECT_THROW(parity_numeric(parse_symbol("xi"), 4, 10), std::invalid_argument);
  EXPECT_THROW(parity_numeric(parse_symbol("1/(xi-xi)"), 64, 10), PoleError);
}

TEST(Parity, FallbackFindsHiddenStructure) {
  // (1+xi)^2 - 2*xi is 1 + xi^2, even, which the structural rules cannot see
  auto e = parse_symbol("(1 + xi)^2 - 2*xi");
  EXPECT_EQ(parity_symbolic(e), Parity::Indefinite);
  EXPECT_EQ(parity_of(e), Parity::Even);
}

// Soundness: whenever the structural rules commit, sampling must agree.
TEST(Parity, SymbolicIsSoundOnRandomTrees) {
  std::mt19937 rng(42);
  std::function<SymbolExpr(int)> gen = [&](int depth) -> SymbolExpr {
    int pick = depth <= 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 12);
    switch (pick) {
      case 0: return SymbolExpr::num(static_cast<double>(rng() % 5) - 2.0);
      case 1: return SymbolExpr::var();
      case 2: return SymbolExpr::imag();
      case 3: return SymbolExpr::binary(Op::Add, gen(depth - 1), gen(depth - 1));
      case 4: return SymbolExpr::binary(Op::Sub, gen(depth - 1), gen(depth - 1));
      case 5:
      case 6: return SymbolExpr::binary(Op::Mul, gen(depth - 1), gen(depth - 1));
      case 7: return SymbolExpr::unary(Op::Neg, gen(depth - 1));
      case 8: return SymbolExpr::power(gen(depth - 1), static_cast<double>(rng() % 4));
      case 9: return SymbolExpr::call(Fn::Tanh, {gen(depth - 1)});
      case 10: return SymbolExpr::call(Fn::Abs, {gen(depth - 1)});
      default: return SymbolExpr::call(Fn::Sech, {gen(depth - 1)});
    }
  };
  int committed = 0;
  for (int i = 0; i < 2000; ++i) {
    auto e = gen(4);
    Parity s = parity_symbolic(e);
    if (s == Parity::Indefinite) continue;
    Parity n;
    try {
      n = parity_numeric(e, 64, 3.0);
    } catch (const PoleError&) {
      continue;
    }
    ++committed;
    // a symbol that is both even and odd is zero, and sampling reports it as even
    bool zero = true;
    for (double x : {0.3, 1.1, 2.7}) zero = zero && std::abs(eval_symbol(e, x)) < 1e-14;
    EXPECT_TRUE(n == s || zero) << print(e) << " symbolic " << to_string(s) << " numeric " << to_string(n);
  }
  EXPECT_GT(committed, 200);
}

TEST(Structure, DerivativeScale) {
  EXPECT_EQ(derivative_scale(parse_symbol("i*xi").root()), 1.0);
  EXPECT_EQ(derivative_scale(parse_symbol("-(i*xi)").root()), -1.0);
  EXPECT_EQ(derivative_scale(parse_symbol("i*(-xi)").root()), -1.0);
  EXPECT_EQ(derivative_scale(parse_symbol("2*(i*xi)").root()), 2.0);
  EXPECT_FALSE(derivative_scale(parse_symbol("(i*xi)^3").root()).has_value());
  EXPECT_TRUE(has_derivative_factor(parse_symbol("(i*xi)^2").root()));
  EXPECT_TRUE(has_derivative_factor(parse_symbol("-(i*xi)^4").root()));
  EXPECT_FALSE(has_derivative_factor(parse_symbol("abs(xi)^1.5").root()));
  EXPECT_FALSE(has_derivative_factor(parse_symbol("1").root()));
}
