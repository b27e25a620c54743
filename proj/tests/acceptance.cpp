// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status
// is nonzero when any criterion fails.
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "symlab/symlab.hpp"

using namespace symlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

SpectralState ic(const Grid& g, const std::vector<std::string>& exprs) { return make_initial_state(g, exprs); }

Trajectory run(const EquationSpec& spec, const SpectralState& u0, double t_end, std::size_t stride,
               double dt = 1e-3) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.snapshot_stride = stride;
  return integrate(spec, u0, cfg);
}

double defect_at(const VerificationReport& v, double t) {
  for (const auto& s : v.track)
    if (std::abs(s.t - t) < 1e-9) return s.defect;
  return std::nan("");
}

// 1. catalog labels
void classifier_ground_truth(Outcome& o) {
  const std::vector<std::pair<std::string, Principle>> expected = {
      {"kdv", Principle::P1},          {"bbm", Principle::P1},
      {"whitham", Principle::P1},      {"benjamin_ono", Principle::P1},
      {"hirota_satsuma", Principle::P1}, {"bidirectional_whitham", Principle::P1},
      {"heat", Principle::P2},         {"keller_segel_1d_analogue", Principle::P2},
      {"burgers", Principle::P3_strong}, {"kuramoto_sivashinsky", Principle::P3_strong},
      {"kdv_burgers", Principle::P3_weak}};
  int mismatches = 0;
  for (const auto& [name, label] : expected) {
    auto eq = find_equation(name);
    if (!eq || classify(*eq).label != label) {
      ++mismatches;
      o.detail << " " << name;
    }
  }
  o.detail << " mismatches=" << mismatches;
  o.require(mismatches == 0, "label mismatch");
}

// 2. kdv soliton
void kdv_soliton(Outcome& o) {
  auto kdv = *find_equation("kdv");
  Grid g(256, 40.0);
  auto u0 = ic(g, {"0.5*sech2(L/2, 0.5)"});
  auto tr = run(kdv, u0, 5.0, 250);
  auto v = verify(kdv, classify(kdv), tr);
  auto slope = axis_slope(v.track);
  double trav = traveling_residual(tr, 1.0);
  o.detail << " max_defect=" << v.max_defect << " slope=" << (slope ? *slope : NAN) << " residual(c=1)=" << trav
           << " verdict=" << to_string(v.verdict);
  o.require(!tr.blowup, "blow-up");
  o.require(v.max_defect < 1e-6, "defect");
  o.require(slope && std::abs(*slope - 1.0) < 0.01, "axis slope");
  o.require(trav < 1e-4, "traveling residual");
  o.require(v.verdict == Verdict::ConsistentSymmetricPrediction, "verdict");
}

// 3. heat, two symmetric bumps
void heat_two_bump(Outcome& o) {
  auto heat = *find_equation("heat");
  Grid g(256, 20.0);
  auto u0 = ic(g, {"gaussian(L/2 - 1.5, 0.7) + gaussian(L/2 + 1.5, 0.7)"});
  auto tr = run(heat, u0, 1.0, 100);
  auto v = verify(heat, classify(heat), tr);
  double drift = 0;
  for (const auto& s : v.track) drift = std::max(drift, std::abs(s.lambda - v.track.front().lambda));
  double change = distance2(tr.snapshots.back(), u0) / norm2(u0);
  o.detail << " max_defect=" << v.max_defect << " drift/L=" << drift / g.period() << " change(t=1)=" << change
           << " verdict=" << to_string(v.verdict);
  o.require(v.max_defect < 1e-8, "defect");
  o.require(drift < 1e-6 * g.period(), "axis drift");
  o.require(change > 0.1, "profile evolution");
  o.require(v.verdict == Verdict::ConsistentSymmetricPrediction, "verdict");
}

// 4. burgers: symmetric Gaussian loses symmetry, constant stays constant
void burgers_contrapositive(Outcome& o) {
  auto burgers = *find_equation("burgers");
  auto cls = classify(burgers);
  Grid g(256, 20.0);
  auto u0 = ic(g, {"gaussian(L/2, 1)"});
  auto v = verify(burgers, cls, run(burgers, u0, 1.0, 100));
  double d0 = defect_at(v, 0.0), d1 = defect_at(v, 1.0);
  auto c0 = ic(g, {"0.3"});
  auto ctr = run(burgers, c0, 1.0, 100);
  auto cv = verify(burgers, cls, ctr);
  double cdev = 0;
  for (const auto& s : ctr.snapshots)
    for (double u : to_physical(s.coeffs[0])) cdev = std::max(cdev, std::abs(u - 0.3));
  o.detail << " defect(0)=" << d0 << " defect(1)=" << d1 << " verdict=" << to_string(v.verdict)
           << " constant_dev=" << cdev << " constant_verdict=" << to_string(cv.verdict);
  o.require(d0 < 1e-12, "initial defect");
  o.require(d1 > 1e-3, "defect at t=1");
  o.require(v.verdict == Verdict::ConsistentSymmetryLost, "gaussian verdict");
  o.require(cdev < 1e-10, "constant deviation");
  o.require(cv.verdict == Verdict::ConsistentSymmetricPrediction, "constant verdict");
}

// 5. kdv, symmetric Gaussian (not a soliton)
void kdv_gaussian(Outcome& o) {
  auto kdv = *find_equation("kdv");
  Grid g(256, 40.0);
  auto u0 = ic(g, {"gaussian(L/2, 1)"});
  auto v = verify(kdv, classify(kdv), run(kdv, u0, 2.0, 200));
  double d2 = defect_at(v, 2.0);
  o.detail << " defect(2)=" << d2 << " verdict=" << to_string(v.verdict);
  o.require(d2 > 1e-3, "defect at t=2");
  o.require(v.verdict == Verdict::ConsistentSymmetryLost, "verdict");
}

// 6. bidirectional Whitham system
void whitham_system(Outcome& o) {
  auto bw = *find_equation("bidirectional_whitham");
  auto cls = classify(bw);
  Grid g(256, 40.0);
  auto u0 = ic(g, {"0.01*sech2(L/2, 0.3)", "0.01*sech2(L/2, 0.3)"});
  // advance a little so the state is a genuine solution state, then translate it
  auto tr = run(bw, u0, 0.5, 500);
  const auto& base = tr.snapshots.back();
  Trajectory synth;
  for (int i = 0; i <= 20; ++i) {
    auto s = shift(base, 1.0 * 0.1 * i);
    s.time = 0.1 * i;
    synth.snapshots.push_back(s);
  }
  auto est = estimate_speed(synth);
  double gap = est.axis_slope ? std::abs(est.axis_slope->c - est.phase.c) : INFINITY;
  o.detail << " label=" << to_string(cls.label) << " c_axis=" << (est.axis_slope ? est.axis_slope->c : NAN)
           << " c_phase=" << est.phase.c << " gap=" << gap;
  o.require(cls.label == Principle::P1, "label");
  o.require(!tr.blowup, "blow-up");
  o.require(gap < 1e-8, "estimator agreement");
}

// 7. pseudospectral product against direct convolution
void convolution_oracle(Outcome& o) {
  Grid g(32, 2 * M_PI);
  auto sq = equation_from_json(json::parse(
      R"({"name": "square", "left": "1", "terms": [{"outer": "1", "factors": [{"inner": "1"}, {"inner": "1"}]}]})"));
  CompiledEquation eq(sq, g);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const long kmax = 10, half = 16;
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SpectralState s(g, 1);
    s.coeffs[0][0] = nd(rng);
    for (long k = 1; k <= kmax; ++k) {
      cplx v(nd(rng), nd(rng));
      s.coeffs[0][g.index(k)] = v;
      s.coeffs[0][g.index(-k)] = std::conj(v);
    }
    auto fast = eq.apply_terms(s.coeffs, {{0}});
    CoeffArray slow(g.size(), 0.0);
    for (long p = -half + 1; p < half; ++p)
      for (long q = -half + 1; q < half; ++q)
        if (std::abs(p + q) <= kmax) slow[g.index(p + q)] += s.coeffs[0][g.index(p)] * s.coeffs[0][g.index(q)];
    for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(fast[0][j] - slow[j]));
  }
  o.detail << " max_error=" << worst;
  o.require(worst < 1e-12, "convolution error");
}

// 8. reflection, defect, axis and linear-flow algebra
void analysis_algebra(Outcome& o) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-30, 30);
  Grid g(128, 20.0);
  auto random_state = [&](long kmax) {
    SpectralState s(g, 1);
    s.coeffs[0][0] = nd(rng);
    for (long k = 1; k <= kmax; ++k) {
      cplx v(nd(rng), nd(rng));
      s.coeffs[0][g.index(k)] = v;
      s.coeffs[0][g.index(-k)] = std::conj(v);
    }
    return s;
  };
  double inv = 0, equi = 0, axis = 0;
  for (int i = 0; i < 100; ++i) {
    auto s = random_state(40);
    double lam = ud(rng), a = ud(rng);
    inv = std::max(inv, distance2(reflect(reflect(s, lam), lam), s) / norm2(s));
    equi = std::max(equi, std::abs(symmetry_defect(shift(s, a), lam + a) - symmetry_defect(s, lam)));
    // symmetric about lam by construction
    SpectralState sym(g, 1);
    sym.coeffs[0][0] = nd(rng);
    for (long k = 1; k <= 10; ++k) {
      double r = nd(rng), xi = g.xi(g.index(k));
      sym.coeffs[0][g.index(k)] = std::polar(r, -lam * xi);
      sym.coeffs[0][g.index(-k)] = std::polar(r, lam * xi);
    }
    double est = estimate_axis(sym).lambda, half = g.period() / 2;
    double d = std::fmod(std::abs(est - lam), half);
    axis = std::max(axis, std::min(d, half - d));
  }
  Grid hg(64, 2 * M_PI);
  SpectralState h0(hg, 1);
  for (long k = 0; k <= 8; ++k) {
    cplx v = k == 0 ? cplx(nd(rng), 0) : cplx(nd(rng), nd(rng));
    h0.coeffs[0][hg.index(k)] = v;
    if (k) h0.coeffs[0][hg.index(-k)] = std::conj(v);
  }
  auto heat = *find_equation("heat");
  auto ht = run(heat, h0, 1.0, 1000);
  auto exact = h0;
  exact.time = 1.0;
  for (std::size_t j = 0; j < hg.size(); ++j) exact.coeffs[0][j] *= std::exp(-hg.xi(j) * hg.xi(j));
  double heat_err = distance2(ht.snapshots.back(), exact) / norm2(h0);
  o.detail << " involution=" << inv << " equivariance=" << equi << " axis/L=" << axis / g.period()
           << " heat_flow=" << heat_err;
  o.require(inv < 1e-13, "involution");
  o.require(equi < 1e-12, "equivariance");
  o.require(axis < 1e-9 * g.period(), "axis recovery");
  o.require(heat_err < 1e-10, "linear flow");
}

// 9. fourth order on u_t = u_xx + u^2
void integrator_order(Outcome& o) {
  auto eq = equation_from_json(json::parse(R"({"name": "heat_quadratic", "left": "1", "terms": [
      {"coefficient": 1, "outer": "(i*xi)^2", "factors": [{"inner": "1"}]},
      {"coefficient": 1, "outer": "1", "factors": [{"inner": "1"}, {"inner": "1"}]}]})"));
  Grid g(64, 2 * M_PI);
  auto u0 = ic(g, {"0.5*cos(x) + 0.2*sin(2*x)"});
  const double dt = 0.1;
  auto end = [&](double h) { return run(eq, u0, 1.0, 1u << 20, h).snapshots.back(); };
  auto ref = end(dt / 16);
  double e1 = distance2(end(dt), ref), e2 = distance2(end(dt / 2), ref);
  o.detail << " err(dt)=" << e1 << " err(dt/2)=" << e2 << " ratio=" << e1 / e2;
  o.require(e1 / e2 >= 12.0, "convergence factor");
}

// 10. KdV-Burgers steady profile
void kdv_burgers_profile(Outcome& o) {
  auto kb = *find_equation("kdv_burgers");
  auto cls = classify(kb);
  const double c = 1.0;
  Grid g(256, 60.0);
  // -c u' = 6 u u' - u''' is solved by the negative-amplitude profile
  auto u0 = ic(g, {"-0.5*sech2(L/2, 0.5)"});
  double res0 = sub_equation_residual(kb, cls, u0, c);
  double flipped = sub_equation_residual(kb, cls, ic(g, {"0.5*sech2(L/2, 0.5)"}), c);
  auto tr = run(kb, u0, 1.0, 100);
  auto est = estimate_speed(tr);
  double dev = std::min(est.phase.residual, traveling_residual(tr, c));
  if (est.axis_slope) dev = std::min(dev, est.axis_slope->residual);
  o.detail << " residual(t=0)=" << res0 << " positive_profile_residual=" << flipped << " deviation(t=1)=" << dev;
  o.require(res0 < 1e-6, "steady residual");
  o.require(dev > 1e-2, "deviation from traveling translate");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"classifier ground truth", classifier_ground_truth},
      {"P1 run: kdv soliton travels symmetrically", kdv_soliton},
      {"P2 run: heat keeps a fixed axis", heat_two_bump},
      {"P3 contrapositive: burgers", burgers_contrapositive},
      {"P1 contrapositive: kdv gaussian", kdv_gaussian},
      {"system run: bidirectional whitham", whitham_system},
      {"product vs direct convolution", convolution_oracle},
      {"analysis algebra", analysis_algebra},
      {"integrator order", integrator_order},
      {"kdv-burgers steady profile", kdv_burgers_profile},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2zu  %-44s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
