// Principle labels from symbol parities.
//
//   P1         left and right-hand side of opposite parity in every component:
//              symmetric solutions travel with the axis velocity.
//   P2         same parity in every component: symmetric solutions keep a fixed axis.
//   P3_strong  u_t = (F1(u))_x + F2 with F1 a nonlinear local flux and F2 even:
//              symmetric solutions are spatially constant (and constant in time
//              when F2 = (G)_x).
//   P3_weak    any other mixed equation: at each instant a symmetric solution is
//              a steady solution of -lambda' P u_x = (opposite-parity terms).
#pragma once

#include <string>
#include <vector>

#include "symlab/equation.hpp"

namespace symlab {

enum class Principle { P1, P2, P3_strong, P3_weak, Unclassified };
enum class Prediction {
  TravelingWave,
  FixedAxis,
  ConstantInSpace,
  ConstantInSpaceTime,
  SteadySubEquation,
  None
};

inline const char* to_string(Principle p) {
  switch (p) {
    case Principle::P1: return "P1";
    case Principle::P2: return "P2";
    case Principle::P3_strong: return "P3_strong";
    case Principle::P3_weak: return "P3_weak";
    default: return "Unclassified";
  }
}

inline const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::TravelingWave: return "TravelingWave";
    case Prediction::FixedAxis: return "FixedAxis";
    case Prediction::ConstantInSpace: return "ConstantInSpace";
    case Prediction::ConstantInSpaceTime: return "ConstantInSpaceTime";
    case Prediction::SteadySubEquation: return "SteadySubEquation";
    default: return "None";
  }
}

struct TermRef {
  std::size_t component;
  std::size_t term;
};

struct ComponentParity {
  Parity left = Parity::Indefinite;
  std::vector<Parity> terms;
};

struct ClassificationReport {
  std::string equation;
  std::size_t dimension = 1;
  Principle label = Principle::Unclassified;
  Prediction predicted = Prediction::None;
  std::vector<ComponentParity> components;
  std::vector<TermRef> sub_equation_terms;  // the F1 of the steady sub-equation (P3_weak)
  LocalFluxView flux;                       // meaningful for P3_strong
  bool classify_only = false;
  bool local_form = false;
  std::vector<std::string> rationale;
};

namespace detail {

inline bool all_terms(const ComponentParity& c, Parity p) {
  for (auto t : c.terms)
    if (t != p) return false;
  return true;
}

inline Parity opposite(Parity p) {
  return p == Parity::Even ? Parity::Odd : (p == Parity::Odd ? Parity::Even : p);
}

/// A nonzero real constant left symbol (u_t scaled by a constant).
inline bool constant_left(const SymbolExpr& e) {
  if (e.empty() || depends_on_variable(e.root())) return false;
  cplx v = eval_symbol(e, 0.0);
  return v.imag() == 0.0 && v.real() != 0.0;
}

}  // namespace detail

inline ClassificationReport classify(const EquationSpec& spec) {
  ClassificationReport r;
  r.equation = spec.name;
  r.dimension = spec.dimension;
  r.classify_only = spec.classify_only;
  r.local_form = spec.local_form.has_value();
  if (r.local_form) r.rationale.push_back("local-form classification: " + *spec.local_form);

  bool indefinite = false;
  for (std::size_t c = 0; c < spec.dimension; ++c) {
    ComponentParity cp;
    cp.left = parity_of(spec.left[c]);
    indefinite |= cp.left == Parity::Indefinite;
    for (const auto& t : spec.terms[c]) {
      cp.terms.push_back(term_parity(t));
      indefinite |= cp.terms.back() == Parity::Indefinite;
    }
    r.components.push_back(std::move(cp));
  }
  if (indefinite) {
    r.rationale.push_back("a symbol parity could not be established");
    return r;
  }

  bool p1 = true, p2 = true;
  for (const auto& cp : r.components) {
    p1 = p1 && detail::all_terms(cp, detail::opposite(cp.left));
    p2 = p2 && detail::all_terms(cp, cp.left);
  }
  if (p1) {
    r.label = Principle::P1;
    r.predicted = Prediction::TravelingWave;
    r.rationale.push_back(
        "left symbol and right-hand side have opposite parity in every component: a symmetric "
        "solution is steady with speed equal to the axis velocity");
    return r;
  }
  if (p2) {
    r.label = Principle::P2;
    r.predicted = Prediction::FixedAxis;
    r.rationale.push_back(
        "left symbol and right-hand side have the same parity in every component: a symmetric "
        "solution keeps a fixed axis of symmetry");
    return r;
  }

  // mixed parities
  if (spec.dimension == 1 && r.components[0].left == Parity::Even &&
      detail::constant_left(spec.left[0])) {
    LocalFluxView flux = extract_local_flux(spec);
    bool has_even = false, even_are_derivatives = true;
    for (std::size_t k = 0; k < spec.terms[0].size(); ++k) {
      if (r.components[0].terms[k] != Parity::Even) continue;
      has_even = true;
      even_are_derivatives = even_are_derivatives && has_derivative_factor(spec.terms[0][k].outer.root());
    }
    if (flux.present && flux.nonlinear() && has_even) {
      double scale = eval_symbol(spec.left[0], 0.0).real();
      for (auto& [n, a] : flux.coefficients) a /= scale;
      r.flux = flux;
      r.label = Principle::P3_strong;
      r.predicted = even_are_derivatives ? Prediction::ConstantInSpaceTime : Prediction::ConstantInSpace;
      r.rationale.push_back(
          "odd part is a nonlinear local flux derivative and the remainder is even: a symmetric "
          "solution depends only on time, provided F1' is invertible on the solution range");
      if (even_are_derivatives)
        r.rationale.push_back("every even term is a derivative (i*xi factor): the constant is also "
                              "constant in time");
      return r;
    }
  }

  r.label = Principle::P3_weak;
  r.predicted = Prediction::SteadySubEquation;
  for (std::size_t c = 0; c < spec.dimension; ++c)
    for (std::size_t k = 0; k < spec.terms[c].size(); ++k)
      if (r.components[c].terms[k] == detail::opposite(r.components[c].left))
        r.sub_equation_terms.push_back({c, k});
  r.rationale.push_back(
      "mixed parities: at each instant a symmetric solution is a steady solution of "
      "-lambda'(t) P(D) u_x = F1(D, u), F1 collecting the terms of parity opposite to the left "
      "symbol");
  return r;
}

struct InvertibilityCheck {
  bool invertible = false;
  std::optional<double> witness;
  std::string note;
};

/// Conservative monotonicity test for F1': F1'' must keep one strict sign on
/// [lo, hi] (1024 samples plus endpoints). A linear F1' passes because F1''
/// is a nonzero constant.
inline InvertibilityCheck check_flux_invertibility(const LocalFluxView& flux, double lo, double hi) {
  InvertibilityCheck out;
  if (!flux.present || lo > hi) {
    out.note = "flux absent or empty range";
    out.witness = lo;
    return out;
  }
  constexpr int kSamples = 1024;
  std::vector<double> pts;
  pts.push_back(lo);
  for (int i = 0; i < kSamples; ++i) pts.push_back(lo + (hi - lo) * (i + 0.5) / kSamples);
  pts.push_back(hi);

  auto f2 = [&](double u) { return flux.second_derivative(u); };
  double prev_u = pts[0];
  double prev = f2(prev_u);
  if (prev == 0.0) {
    out.witness = prev_u;
    out.note = "F1'' vanishes";
    return out;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double u = pts[i];
    double v = f2(u);
    if (v == 0.0) {
      out.witness = u;
      out.note = "F1'' vanishes";
      return out;
    }
    if ((v > 0) != (prev > 0)) {
      // bisect the sign change down to a root of F1''
      double a = prev_u, b = u, fa = prev;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        double fm = f2(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.witness = 0.5 * (a + b);
      out.note = "F1'' changes sign";
      return out;
    }
    prev = v;
    prev_u = u;
  }
  out.invertible = true;
  out.note = "F1'' keeps a strict sign (conservative sufficient test)";
  return out;
}

// ---------------------------------------------------------------------------

inline json to_json(const ClassificationReport& r) {
  json j;
  j["equation"] = r.equation;
  j["dimension"] = r.dimension;
  j["label"] = to_string(r.label);
  j["predicted"] = to_string(r.predicted);
  j["classify_only"] = r.classify_only;
  j["local_form_classification"] = r.local_form;
  j["components"] = json::array();
  for (const auto& c : r.components) {
    json jc;
    jc["left"] = to_string(c.left);
    jc["terms"] = json::array();
    for (auto p : c.terms) jc["terms"].push_back(to_string(p));
    j["components"].push_back(jc);
  }
  if (r.label == Principle::P3_weak) {
    j["sub_equation_terms"] = json::array();
    for (const auto& t : r.sub_equation_terms)
      j["sub_equation_terms"].push_back({{"component", t.component}, {"term", t.term}});
  }
  if (r.label == Principle::P3_strong) {
    json jf = json::object();
    for (const auto& [n, a] : r.flux.coefficients) jf[std::to_string(n)] = a;
    j["flux_coefficients"] = jf;
  }
  j["rationale"] = r.rationale;
  return j;
}

/// "kdv | 1 | P1 | TravelingWave"
inline std::string one_line(const ClassificationReport& r) {
  std::string s = r.equation + " | " + std::to_string(r.dimension) + " | " + to_string(r.label) +
                  " | " + to_string(r.predicted);
  if (r.classify_only) s += " (classify_only)";
  return s;
}

}  // namespace symlab
