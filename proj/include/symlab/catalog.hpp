// Named equations shipped with the library, stored in the same structured
// text form that users write by hand.
#pragma once

#include <string_view>

#include "symlab/equation.hpp"

namespace symlab {

namespace detail {

inline constexpr std::string_view kCatalogJson = R"json([
{"name": "kdv", "dimension": 1, "left": ["1"],
 "notes": "Korteweg-de Vries, u_t + 6 u u_x + u_xxx = 0",
 "terms": [{"coefficient": -3, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^3", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "bbm", "dimension": 1, "left": ["1 + xi^2"],
 "notes": "Benjamin-Bona-Mahony, u_t - u_xxt + u_x + u u_x = 0",
 "terms": [{"coefficient": -1, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -0.5, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]}]},

{"name": "whitham", "dimension": 1, "left": ["1"],
 "notes": "Whitham, u_t + K u_x + 3/2 u u_x = 0 with K = sqrt(tanh(D)/D)",
 "terms": [{"coefficient": -1, "outer": "where0(sqrt(tanh(xi)/xi), 1)*(i*xi)", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -0.75, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]}]},

{"name": "benjamin_ono", "dimension": 1, "left": ["1"],
 "notes": "Benjamin-Ono, u_t + u u_x + H u_xx = 0",
 "terms": [{"coefficient": -1, "outer": "abs(xi)*(i*xi)", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -0.5, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]}]},

{"name": "ostrovsky", "dimension": 1, "left": ["i*xi"], "classify_only": true, "zero_mode": "exempt",
 "notes": "Ostrovsky, (u_t + u u_x + u_xxx)_x = u; left symbol vanishes at the zero mode",
 "terms": [{"coefficient": -0.5, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^4", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": 1, "outer": "1", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "hirota_satsuma", "dimension": 2, "left": ["1", "1"],
 "notes": "Hirota-Satsuma, u_t = u_xxx/2 + 3 u u_x - 6 w w_x, w_t = -w_xxx - 3 u w_x",
 "terms": [[{"coefficient": 0.5, "outer": "(i*xi)^3", "factors": [{"inner": "1", "component": 0}]},
            {"coefficient": 1.5, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
            {"coefficient": -3, "outer": "i*xi", "factors": [{"inner": "1", "component": 1}, {"inner": "1", "component": 1}]}],
           [{"coefficient": -1, "outer": "(i*xi)^3", "factors": [{"inner": "1", "component": 1}]},
            {"coefficient": -3, "outer": "1", "factors": [{"inner": "1", "component": 0}, {"inner": "i*xi", "component": 1}]}]]},

{"name": "bidirectional_whitham", "dimension": 2, "left": ["1", "1"],
 "notes": "bidirectional Whitham, eta_t = -K u_x - (eta u)_x, u_t = -eta_x - u u_x with K = tanh(D)/D",
 "terms": [[{"coefficient": -1, "outer": "where0(tanh(xi)/xi, 1)*(i*xi)", "factors": [{"inner": "1", "component": 1}]},
            {"coefficient": -1, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 1}]}],
           [{"coefficient": -1, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}]},
            {"coefficient": -1, "outer": "1", "factors": [{"inner": "1", "component": 1}, {"inner": "i*xi", "component": 1}]}]]},

{"name": "heat", "dimension": 1, "left": ["1"],
 "notes": "heat, u_t = u_xx",
 "terms": [{"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "porous_medium", "dimension": 1, "left": ["1"], "classify_only": true,
 "notes": "porous medium, u_t = (u^2)_xx; degenerate diffusion with no linear part",
 "terms": [{"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]}]},

{"name": "fast_diffusion", "dimension": 1, "left": ["1"], "classify_only": true,
 "local_form": "u_t = (u^m)_xx with 0 < m < 1",
 "notes": "fast diffusion; the non-polynomial nonlinearity is represented by the parity-equivalent surrogate D^2[u]",
 "terms": [{"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "thin_film", "dimension": 1, "left": ["1"], "classify_only": true,
 "notes": "thin film, u_t = -(u^3 u_xxx)_x; degenerate fourth-order flux",
 "terms": [{"coefficient": -1, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}, {"inner": "1", "component": 0}, {"inner": "(i*xi)^3", "component": 0}]}]},

{"name": "cahn_hilliard", "dimension": 1, "left": ["1"],
 "notes": "Cahn-Hilliard, u_t = (u^3 - u - u_xx)_xx",
 "terms": [{"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^4", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "kpp", "dimension": 1, "left": ["1"],
 "notes": "Kolmogorov-Petrovsky-Piscounov (Fisher), u_t = u_xx + u - u^2",
 "terms": [{"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": 1, "outer": "1", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "1", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]}]},

{"name": "keller_segel_1d_analogue", "dimension": 2, "left": ["1", "1"], "classify_only": true,
 "notes": "fractional Keller-Segel, one-dimensional analogue: u_t = -|D|^1.5 u - (u B v)_x, v_t = -|D|^1.5 v + u with B = D |D|^-0.5",
 "terms": [[{"coefficient": -1, "outer": "abs(xi)^1.5", "factors": [{"inner": "1", "component": 0}]},
            {"coefficient": -1, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "where0(i*xi*abs(xi)^-0.5, 0)", "component": 1}]}],
           [{"coefficient": -1, "outer": "abs(xi)^1.5", "factors": [{"inner": "1", "component": 1}]},
            {"coefficient": 1, "outer": "1", "factors": [{"inner": "1", "component": 0}]}]]},

{"name": "burgers", "dimension": 1, "left": ["1"],
 "notes": "viscous Burgers, u_t = (u^2/2)_x + nu u_xx with nu = 0.1",
 "terms": [{"coefficient": 0.5, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": 0.1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "kuramoto_sivashinsky", "dimension": 1, "left": ["1"],
 "notes": "Kuramoto-Sivashinsky, u_t = -u u_x - u_xx - u_xxxx",
 "terms": [{"coefficient": -0.5, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^4", "factors": [{"inner": "1", "component": 0}]}]},

{"name": "kdv_burgers", "dimension": 1, "left": ["1"],
 "notes": "viscous KdV-Burgers, u_t = 6 u u_x - u_xxx + nu u_xx with nu = 0.1",
 "terms": [{"coefficient": 3, "outer": "i*xi", "factors": [{"inner": "1", "component": 0}, {"inner": "1", "component": 0}]},
           {"coefficient": -1, "outer": "(i*xi)^3", "factors": [{"inner": "1", "component": 0}]},
           {"coefficient": 0.1, "outer": "(i*xi)^2", "factors": [{"inner": "1", "component": 0}]}]}
])json";

}  // namespace detail

inline std::vector<EquationSpec> build_catalog() {
  static const std::vector<EquationSpec> catalog = [] {
    std::vector<EquationSpec> out;
    for (const auto& j : json::parse(detail::kCatalogJson)) out.push_back(equation_from_json(j));
    return out;
  }();
  return catalog;
}

inline std::optional<EquationSpec> find_equation(std::string_view name) {
  for (const auto& e : build_catalog())
    if (e.name == name) return e;
  return std::nullopt;
}

}  // namespace symlab
