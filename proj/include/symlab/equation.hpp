// Equations P(D) u_t = F(D, u) with F a sum of pseudo-products.
#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symlab/spectral.hpp"
#include "symlab/symbol.hpp"

namespace symlab {

/// One multiplier-filtered copy of a field component inside a product.
struct Factor {
  SymbolExpr inner;
  std::size_t component = 0;
  std::string inner_text;
};

/// coefficient * h(D)[ prod_j g_j(D) u_{c_j} ].
struct PseudoProductTerm {
  double coefficient = 1.0;
  SymbolExpr outer;
  std::string outer_text;
  std::vector<Factor> factors;

  std::size_t degree() const { return factors.size(); }
  bool is_linear() const { return factors.size() == 1; }
};

struct EquationSpec {
  std::string name;
  std::size_t dimension = 1;
  std::vector<SymbolExpr> left;
  std::vector<std::string> left_text;
  std::vector<std::vector<PseudoProductTerm>> terms;  // per component row
  std::string notes;
  bool classify_only = false;
  // a left symbol vanishing at xi = 0 is tolerated for classification
  bool zero_mode_exempt = false;
  // non-polynomial local operator, stored as a parity-equivalent polynomial surrogate
  std::optional<std::string> local_form;
};

/// Degree-n coefficients of F1(u) = sum_n a_n u^n, where the odd part of the
/// equation is exactly (F1(u))_x.
struct LocalFluxView {
  bool present = false;
  std::map<int, double> coefficients;

  bool empty() const {
    for (const auto& [n, a] : coefficients)
      if (a != 0.0) return false;
    return true;
  }
  bool nonlinear() const {
    for (const auto& [n, a] : coefficients)
      if (n >= 2 && a != 0.0) return true;
    return false;
  }
  double value(double u) const {
    double acc = 0.0;
    for (const auto& [n, a] : coefficients) acc += a * std::pow(u, n);
    return acc;
  }
  double first_derivative(double u) const {
    double acc = 0.0;
    for (const auto& [n, a] : coefficients)
      if (n >= 1) acc += a * n * std::pow(u, n - 1);
    return acc;
  }
  double second_derivative(double u) const {
    double acc = 0.0;
    for (const auto& [n, a] : coefficients)
      if (n >= 2) acc += a * n * (n - 1) * std::pow(u, n - 2);
    return acc;
  }
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parity of xi -> F_hat for one term: parity(h) * prod parity(g_j).
inline Parity term_parity(const PseudoProductTerm& t) {
  Parity p = parity_of(t.outer);
  for (const auto& f : t.factors) p = parity_product(p, parity_of(f.inner));
  return p;
}

inline bool symbol_is_one(const SymbolExpr& e) {
  return !e.empty() && e.root().op == Op::Num && e.root().value == 1.0;
}

/// Odd part as a local flux derivative: every odd term must be c * kappa*(i xi)[u^n]
/// with trivial inner symbols on a single component.
inline LocalFluxView extract_local_flux(const EquationSpec& spec) {
  LocalFluxView view;
  if (spec.dimension != 1) return view;
  view.present = true;
  for (const auto& t : spec.terms[0]) {
    if (term_parity(t) != Parity::Odd) continue;
    auto kappa = derivative_scale(t.outer.root());
    bool shape = kappa.has_value();
    for (const auto& f : t.factors) shape = shape && symbol_is_one(f.inner) && f.component == 0;
    if (!shape) {
      view.present = false;
      view.coefficients.clear();
      return view;
    }
    view.coefficients[static_cast<int>(t.degree())] += t.coefficient * *kappa;
  }
  return view;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

enum class ValidationPurpose { Classify, Simulate };

inline constexpr double kLeftSymbolFloor = 1e-12;

inline ValidationReport validate_spec(const EquationSpec& spec, const Grid& grid,
                                      ValidationPurpose purpose = ValidationPurpose::Classify,
                                      double dealias_fraction = 2.0 / 3.0) {
  ValidationReport r;
  const bool exempt_zero = spec.zero_mode_exempt && purpose == ValidationPurpose::Classify;
  if (spec.dimension == 0) r.violations.push_back("dimension must be positive");
  if (spec.left.size() != spec.dimension)
    r.violations.push_back("expected one left symbol per component");
  if (spec.terms.size() != spec.dimension)
    r.violations.push_back("expected one term list per component");
  if (!r.ok()) return r;

  auto eval_on_grid = [&](const SymbolExpr& e, const std::string& what) -> bool {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      try {
        (void)eval_symbol(e, grid.xi(j));
      } catch (const std::exception& ex) {
        std::ostringstream os;
        os << what << ": " << ex.what() << " at xi=" << grid.xi(j);
        r.violations.push_back(os.str());
        return false;
      }
    }
    return true;
  };

  for (std::size_t c = 0; c < spec.dimension; ++c) {
    const std::string row = "component " + std::to_string(c);
    if (spec.left[c].empty()) {
      r.violations.push_back(row + ": missing left symbol");
      continue;
    }
    if (eval_on_grid(spec.left[c], row + " left symbol")) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double mag = std::abs(eval_symbol(spec.left[c], grid.xi(j)));
        if (mag > kLeftSymbolFloor) continue;
        if (grid.xi(j) == 0.0) {
          if (!exempt_zero) r.violations.push_back("left symbol vanishes at ξ=0");
        } else {
          std::ostringstream os;
          os << row << ": left symbol vanishes at xi=" << grid.xi(j);
          r.violations.push_back(os.str());
        }
      }
    }
    for (std::size_t k = 0; k < spec.terms[c].size(); ++k) {
      const auto& t = spec.terms[c][k];
      const std::string where = row + " term " + std::to_string(k);
      if (t.factors.empty()) r.violations.push_back(where + ": no factors");
      if (t.outer.empty()) {
        r.violations.push_back(where + ": missing outer symbol");
      } else {
        eval_on_grid(t.outer, where + " outer symbol");
      }
      for (const auto& f : t.factors) {
        if (f.component >= spec.dimension)
          r.violations.push_back(where + ": component index " + std::to_string(f.component) +
                                 " out of range");
        if (f.inner.empty()) {
          r.violations.push_back(where + ": missing inner symbol");
        } else {
          eval_on_grid(f.inner, where + " inner symbol");
        }
      }
      if (t.degree() > 2 && dealias_fraction > 2.0 / (t.degree() + 1) + 1e-12) {
        std::ostringstream os;
        os << where << ": degree " << t.degree() << " product with dealias fraction "
           << dealias_fraction << " may alias (use <= " << 2.0 / (t.degree() + 1) << ")";
        r.warnings.push_back(os.str());
      }
    }
  }
  if (purpose == ValidationPurpose::Simulate && spec.classify_only)
    r.violations.push_back("equation '" + spec.name + "' is classification-only");
  return r;
}

// ---------------------------------------------------------------------------
// structured text form

using json = nlohmann::json;

inline json to_json(const EquationSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dimension"] = spec.dimension;
  j["left"] = json::array();
  for (std::size_t c = 0; c < spec.left.size(); ++c)
    j["left"].push_back(c < spec.left_text.size() && !spec.left_text[c].empty()
                            ? spec.left_text[c]
                            : print(spec.left[c]));
  j["terms"] = json::array();
  for (const auto& row : spec.terms) {
    json jr = json::array();
    for (const auto& t : row) {
      json jt;
      jt["coefficient"] = t.coefficient;
      jt["outer"] = t.outer_text.empty() ? print(t.outer) : t.outer_text;
      jt["factors"] = json::array();
      for (const auto& f : t.factors)
        jt["factors"].push_back(
            {{"inner", f.inner_text.empty() ? print(f.inner) : f.inner_text},
             {"component", f.component}});
      jr.push_back(jt);
    }
    j["terms"].push_back(jr);
  }
  j["classify_only"] = spec.classify_only;
  if (spec.zero_mode_exempt) j["zero_mode"] = "exempt";
  if (spec.local_form) j["local_form"] = *spec.local_form;
  if (!spec.notes.empty()) j["notes"] = spec.notes;
  return j;
}

namespace detail {

inline SymbolExpr parse_field(const json& j, const std::string& where) {
  if (!j.is_string()) throw SpecError(where + ": expected a symbol string");
  try {
    return parse_symbol(j.get<std::string>());
  } catch (const ParseError& e) {
    throw SpecError(where + ": " + e.what());
  }
}

inline PseudoProductTerm parse_term(const json& jt, const std::string& where) {
  if (!jt.is_object()) throw SpecError(where + ": expected an object");
  PseudoProductTerm t;
  t.coefficient = jt.value("coefficient", 1.0);
  t.outer_text = jt.value("outer", std::string("1"));
  t.outer = parse_field(json(t.outer_text), where + ".outer");
  if (!jt.contains("factors") || !jt["factors"].is_array())
    throw SpecError(where + ": missing factors list");
  for (std::size_t i = 0; i < jt["factors"].size(); ++i) {
    const auto& jf = jt["factors"][i];
    const std::string fw = where + ".factors[" + std::to_string(i) + "]";
    Factor f;
    f.inner_text = jf.value("inner", std::string("1"));
    f.inner = parse_field(json(f.inner_text), fw + ".inner");
    auto comp = jf.value("component", 0);
    if (comp < 0) throw SpecError(fw + ": negative component index");
    f.component = static_cast<std::size_t>(comp);
    t.factors.push_back(std::move(f));
  }
  return t;
}

}  // namespace detail

/// Accepts {"terms": [[...], [...]]} (per component) or, for scalar equations,
/// a flat {"terms": [...]} list.
inline EquationSpec equation_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("equation document must be an object");
  EquationSpec spec;
  spec.name = j.value("name", std::string("unnamed"));
  int dim = j.value("dimension", 1);
  if (dim <= 0) throw SpecError("dimension must be positive");
  spec.dimension = static_cast<std::size_t>(dim);
  if (!j.contains("left")) throw SpecError("missing left symbols");
  json left = j["left"].is_array() ? j["left"] : json::array({j["left"]});
  for (std::size_t c = 0; c < left.size(); ++c) {
    spec.left_text.push_back(left[c].is_string() ? left[c].get<std::string>() : "");
    spec.left.push_back(detail::parse_field(left[c], "left[" + std::to_string(c) + "]"));
  }
  if (!j.contains("terms") || !j["terms"].is_array()) throw SpecError("missing terms");
  const auto& jterms = j["terms"];
  bool nested = !jterms.empty() && jterms[0].is_array();
  if (!nested && spec.dimension != 1)
    throw SpecError("systems need one term list per component");
  json rows = nested ? jterms : json::array({jterms});
  for (std::size_t c = 0; c < rows.size(); ++c) {
    std::vector<PseudoProductTerm> row;
    for (std::size_t k = 0; k < rows[c].size(); ++k)
      row.push_back(detail::parse_term(
          rows[c][k], "terms[" + std::to_string(c) + "][" + std::to_string(k) + "]"));
    spec.terms.push_back(std::move(row));
  }
  if (jterms.empty()) spec.terms.assign(spec.dimension, {});
  spec.classify_only = j.value("classify_only", false);
  spec.zero_mode_exempt = j.value("zero_mode", std::string("require")) == "exempt";
  if (j.contains("local_form")) spec.local_form = j["local_form"].get<std::string>();
  spec.notes = j.value("notes", std::string());
  return spec;
}

}  // namespace symlab
