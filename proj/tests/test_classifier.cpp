#include <gtest/gtest.h>

#include "symlab/catalog.hpp"
#include "symlab/classifier.hpp"

using namespace symlab;

namespace {

ClassificationReport of(const char* name) { return classify(*find_equation(name)); }

EquationSpec from(const char* text) { return equation_from_json(json::parse(text)); }

}  // namespace

TEST(Classify, GroundTruthTable) {
  struct Row {
    const char* name;
    Principle label;
  };
  for (auto [name, label] : std::vector<Row>{{"kdv", Principle::P1},
                                             {"bbm", Principle::P1},
                                             {"whitham", Principle::P1},
                                             {"benjamin_ono", Principle::P1},
                                             {"hirota_satsuma", Principle::P1},
                                             {"bidirectional_whitham", Principle::P1},
                                             {"heat", Principle::P2},
                                             {"keller_segel_1d_analogue", Principle::P2},
                                             {"burgers", Principle::P3_strong},
                                             {"kuramoto_sivashinsky", Principle::P3_strong},
                                             {"kdv_burgers", Principle::P3_weak}})
    EXPECT_EQ(of(name).label, label) << name;
}

TEST(Classify, Predictions) {
  EXPECT_EQ(of("kdv").predicted, Prediction::TravelingWave);
  EXPECT_EQ(of("heat").predicted, Prediction::FixedAxis);
  EXPECT_EQ(of("burgers").predicted, Prediction::ConstantInSpaceTime);
  EXPECT_EQ(of("kdv_burgers").predicted, Prediction::SteadySubEquation);
  EXPECT_EQ(of("kpp").label, Principle::P2);
  EXPECT_EQ(of("fast_diffusion").label, Principle::P2);
  EXPECT_TRUE(of("fast_diffusion").local_form);
}

TEST(Classify, KdvBurgersSubEquationTerms) {
  auto r = of("kdv_burgers");
  ASSERT_EQ(r.sub_equation_terms.size(), 2u);
  EXPECT_EQ(r.sub_equation_terms[0].term, 0u);  // 6 u u_x
  EXPECT_EQ(r.sub_equation_terms[1].term, 1u);  // -u_xxx
}

TEST(Classify, BidirectionalWhithamParities) {
  auto r = of("bidirectional_whitham");
  ASSERT_EQ(r.components.size(), 2u);
  for (const auto& c : r.components) {
    EXPECT_EQ(c.left, Parity::Even);
    for (auto p : c.terms) EXPECT_EQ(p, Parity::Odd);
  }
}

TEST(Classify, BurgersFlux) {
  auto r = of("burgers");
  EXPECT_EQ(r.flux.coefficients.at(2), 0.5);
}

TEST(Classify, ConstantLeftScalesFlux) {
  auto r = classify(from(R"({"name": "scaled", "left": "2", "terms": [
      {"coefficient": 1, "outer": "i*xi", "factors": [{"inner": "1"}, {"inner": "1"}]},
      {"coefficient": 1, "outer": "1", "factors": [{"inner": "1"}]}]})"));
  EXPECT_EQ(r.label, Principle::P3_strong);
  EXPECT_EQ(r.predicted, Prediction::ConstantInSpace);  // the reaction term has no derivative
  EXPECT_EQ(r.flux.coefficients.at(2), 0.5);
}

TEST(Classify, LinearFluxIsWeak) {
  // u_t = u_x + u_xx: the odd part is linear so the strong form does not apply
  auto r = classify(from(R"({"name": "advdiff", "left": "1", "terms": [
      {"coefficient": 1, "outer": "i*xi", "factors": [{"inner": "1"}]},
      {"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1"}]}]})"));
  EXPECT_EQ(r.label, Principle::P3_weak);
}

TEST(Classify, IndefiniteIsUnclassified) {
  auto r = classify(from(R"({"name": "mixed", "left": "1", "terms": [
      {"coefficient": 1, "outer": "1 + i*xi", "factors": [{"inner": "1"}]}]})"));
  EXPECT_EQ(r.label, Principle::Unclassified);
  EXPECT_EQ(r.predicted, Prediction::None);
}

TEST(Classify, OddLeftSymbol) {
  // i xi u_t = u: left odd, right even, opposite everywhere
  auto r = classify(from(R"({"name": "oddleft", "left": "i*xi", "terms": [
      {"coefficient": 1, "outer": "1", "factors": [{"inner": "1"}]}]})"));
  EXPECT_EQ(r.label, Principle::P1);
}

// The label depends only on parities: replacing xi by -xi everywhere keeps it.
TEST(Classify, InvariantUnderReflectedSymbols) {
  for (const auto& eq : build_catalog()) {
    auto doc = to_json(eq);
    std::string text = doc.dump();
    std::string flipped;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text.compare(i, 2, "xi") == 0) {
        flipped += "(-xi)";
        ++i;
      } else {
        flipped += text[i];
      }
    }
    auto eq2 = equation_from_json(json::parse(flipped));
    EXPECT_EQ(classify(eq2).label, classify(eq).label) << eq.name;
    EXPECT_EQ(classify(eq2).predicted, classify(eq).predicted) << eq.name;
  }
}

TEST(FluxInvertibility, Examples) {
  LocalFluxView half_square;
  half_square.present = true;
  half_square.coefficients = {{2, 0.5}};
  EXPECT_TRUE(check_flux_invertibility(half_square, 0.1, 2.0).invertible);
  EXPECT_TRUE(check_flux_invertibility(half_square, -1.0, 1.0).invertible);

  LocalFluxView cube;
  cube.present = true;
  cube.coefficients = {{3, 1.0 / 3.0}};
  auto r = check_flux_invertibility(cube, -1.0, 1.0);
  EXPECT_FALSE(r.invertible);
  ASSERT_TRUE(r.witness);
  EXPECT_NEAR(*r.witness, 0.0, 1e-12);

  cube.coefficients = {{3, 1.0 / 3.0}, {2, -0.5}};  // F1'' = 2u - 1, root at 1/2
  r = check_flux_invertibility(cube, -1.0, 2.0);
  EXPECT_FALSE(r.invertible);
  EXPECT_NEAR(*r.witness, 0.5, 1e-12);
  EXPECT_TRUE(check_flux_invertibility(cube, 0.6, 2.0).invertible);
}

TEST(Report, OneLine) {
  EXPECT_EQ(one_line(of("kdv")), "kdv | 1 | P1 | TravelingWave");
  EXPECT_EQ(one_line(of("burgers")), "burgers | 1 | P3_strong | ConstantInSpaceTime");
  EXPECT_EQ(one_line(of("keller_segel_1d_analogue")), "keller_segel_1d_analogue | 2 | P2 | FixedAxis (classify_only)");
}

TEST(Report, Json) {
  auto j = to_json(of("kdv_burgers"));
  EXPECT_EQ(j["label"], "P3_weak");
  EXPECT_EQ(j["sub_equation_terms"].size(), 2u);
  EXPECT_FALSE(j["rationale"].empty());
  EXPECT_EQ(to_json(of("burgers"))["flux_coefficients"]["2"], 0.5);
}
