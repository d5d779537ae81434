#include "screening/effort.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "screening/numerics.hpp"

namespace screening {
namespace {

// int_a^b theta e^{-c theta} dtheta, stable as c -> 0.
double theta_exp_moment(double c, double a, double b) {
  if (!(b > a)) return 0.0;
  if (c == 0.0) return 0.5 * (b - a) * (b + a);
  const double d = c * (b - a);
  double k;  // (e^{-d} - 1 + d)/d^2
  if (d < 1e-2) {
    k = 0.5 + d * (-1.0 / 6.0 + d * (1.0 / 24.0 + d * (-1.0 / 120.0 + d / 720.0)));
  } else {
    k = num::expm1_minus_x(-d) / (d * d);
  }
  return std::exp(-c * a) * (b * (-std::expm1(-d)) / c - (b - a) * (b - a) * k);
}

// int_a^b e^{-c theta} dtheta
double exp_moment(double c, double a, double b) {
  if (!(b > a)) return 0.0;
  if (c == 0.0) return b - a;
  return std::exp(-c * a) * (-std::expm1(-c * (b - a))) / c;
}

double integrate_with_breaks(const std::function<double(double)>& f, double lo, double hi,
                             std::vector<double> breaks) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0, prev = lo;
  for (double x : breaks) {
    if (!(x > prev) || x > hi) continue;
    if (x - prev > 1e-14) total += num::integrate(f, prev, x, {1e-12, 1e-12, 200});
    prev = x;
  }
  if (hi - prev > 1e-14) total += num::integrate(f, prev, hi, {1e-12, 1e-12, 200});
  return total;
}

// R(e) for any piecewise-uniform (or unit-point) branch posterior.
double marginal_with_law(double e, const BranchLaw& law, const ComplexityBelief& belief,
                         Technology tech, const Primitives& prim) {
  const double V = prim.V;
  if (V == 0.0) return 0.0;
  if (law.unit_point) {
    const double x = tech == Technology::Multiplicative ? e : 1.0 + e;
    return V * belief.density(x);
  }
  const double ts = law.theta_star;
  if (belief.kind() == ComplexityBelief::Kind::Prior) {
    const double lam = belief.rate();
    if (tech == Technology::Multiplicative) {
      const double c = lam * e;
      return V * lam *
             (law.dens_lo * theta_exp_moment(c, 0.0, ts) + law.dens_hi * theta_exp_moment(c, ts, 1.0));
    }
    return V * lam * std::exp(-lam * e) *
           (law.dens_lo * exp_moment(lam, 0.0, ts) + law.dens_hi * exp_moment(lam, ts, 1.0));
  }
  // truncated exponential: adaptive quadrature over kink-aligned pieces
  const double a = belief.lower(), b = belief.upper();
  if (tech == Technology::Multiplicative) {
    if (e <= 0.0) return V * law.mean() * belief.density(0.0);
    auto f = [&](double th) { return th * belief.density(th * e) * law.density(th); };
    return V * integrate_with_breaks(f, 0.0, 1.0, {ts, a / e, b / e});
  }
  auto f = [&](double th) { return belief.density(th + e) * law.density(th); };
  return V * integrate_with_breaks(f, 0.0, 1.0, {ts, a - e, b - e});
}

EffortSolution solve_point_mass(const BranchLaw& law, double t, Technology tech,
                                const Primitives& prim) {
  const double gam = prim.gamma, V = prim.V;
  EffortSolution out;
  if (V == 0.0) return out;

  auto val = [&](double e) {
    double p;
    if (tech == Technology::Multiplicative) {
      if (law.unit_point)
        p = e >= t ? 1.0 : 0.0;
      else if (e <= 0.0)
        p = t <= 0.0 ? 1.0 : 0.0;
      else
        p = 1.0 - law.cdf(t / e);
    } else {
      if (law.unit_point)
        p = 1.0 + e >= t ? 1.0 : 0.0;
      else
        p = 1.0 - law.cdf(t - e);
    }
    return V * p - std::pow(e, gam);
  };

  // beyond V^{1/gamma} the cost alone exceeds the best possible benefit
  const double cap = std::pow(V, 1.0 / gam);
  num::MaxResult best = num::maximize_1d(val, 0.0, cap, {1e-12, 1e-12, 80}, 64);

  // kinks of P(success|e) and stationary points of each smooth piece
  std::vector<double> cand{0.0, t};
  const double ts = law.theta_star;
  if (tech == Technology::Multiplicative) {
    if (ts > theta_min_clamp) cand.push_back(t / ts);
    if (t > 0.0) {
      cand.push_back(std::pow(V * law.dens_hi * t / gam, 1.0 / (gam + 1.0)));
      cand.push_back(std::pow(V * law.dens_lo * t / gam, 1.0 / (gam + 1.0)));
    }
  } else {
    if (t > 1.0) cand.push_back(t - 1.0);
    if (t > ts) cand.push_back(t - ts);
    if (law.dens_hi > 0.0) cand.push_back(std::pow(V * law.dens_hi / gam, 1.0 / (gam - 1.0)));
    if (law.dens_lo > 0.0) cand.push_back(std::pow(V * law.dens_lo / gam, 1.0 / (gam - 1.0)));
  }
  std::sort(cand.begin(), cand.end());
  double bx = best.argmax, bv = best.max;
  for (double c : cand) {
    if (!(c >= 0.0) || !std::isfinite(c)) continue;
    const double v = val(c);
    if (v > bv || (v == bv && c < bx)) {
      bv = v;
      bx = c;
    }
  }
  out.e = bx;
  out.objective_value = bv;
  return out;
}

EffortSolution solve_with_law(const BranchLaw& law, const ComplexityBelief& belief, Technology tech,
                              const Primitives& prim) {
  if (belief.kind() == ComplexityBelief::Kind::PointMass)
    return solve_point_mass(law, belief.point(), tech, prim);

  const double gam = prim.gamma;
  auto R = [&](double e) { return marginal_with_law(e, law, belief, tech, prim); };
  const double R0 = R(0.0);

  if (R0 > 0.0) {
    auto D = [&](double e) { return gam * std::pow(e, gam - 1.0) - R(e); };
    double e_hi = std::pow(R0 / gam, 1.0 / (gam - 1.0)) + 1.0;
    for (int i = 0; i < 60 && D(e_hi) <= 0.0; ++i) e_hi *= 2.0;
    const double e = num::find_root_bracketed(D, {0.0, e_hi}, {1e-12, 1e-12, 200});
    EffortSolution out;
    out.e = e;
    out.interior = true;
    out.residual = D(e);
    out.objective_value = prim.V * expected_success(e, law, belief, tech) - std::pow(e, gam);
    return out;
  }

  // R(0) = 0 with a support detached from the origin: the benefit turns on only
  // at strictly positive effort, so the FOC bracket degenerates; maximize
  // directly instead.
  if (belief.kind() == ComplexityBelief::Kind::TruncExp && belief.lower() > 0.0 && prim.V > 0.0) {
    const double cap = std::pow(prim.V, 1.0 / gam);
    auto v = [&](double e) {
      return prim.V * expected_success(e, law, belief, tech) - std::pow(e, gam);
    };
    const num::MaxResult m = num::maximize_1d(v, 0.0, cap, {1e-10, 1e-10, 60});
    EffortSolution out;
    out.e = m.argmax;
    out.objective_value = m.max;
    return out;
  }

  EffortSolution out;  // corner: no marginal benefit at zero effort
  out.objective_value = prim.V * expected_success(0.0, law, belief, tech);
  return out;
}

}  // namespace

double marginal_benefit(double e, const AbilityBranch& ab, const ComplexityBelief& belief,
                        Technology tech, const Primitives& prim) {
  if (!belief.has_density())
    throw PointMassHasNoDensity("marginal_benefit: point-mass belief has no density");
  return marginal_with_law(e, branch_weight_and_density(ab), belief, tech, prim);
}

double marginal_benefit_quadrature(double e, const AbilityBranch& ab, const ComplexityBelief& belief,
                                   Technology tech, const Primitives& prim) {
  if (!belief.has_density())
    throw PointMassHasNoDensity("marginal_benefit_quadrature: point-mass belief has no density");
  const BranchLaw law = branch_weight_and_density(ab);
  const double V = prim.V;
  if (V == 0.0) return 0.0;
  std::vector<double> breaks{law.theta_star};
  if (tech == Technology::Multiplicative) {
    if (e <= 0.0) return V * law.mean() * belief.density(0.0);
    if (belief.kind() == ComplexityBelief::Kind::TruncExp) {
      breaks.push_back(belief.lower() / e);
      breaks.push_back(belief.upper() / e);
    }
    auto f = [&](double th) { return th * belief.density(th * e) * law.density(th); };
    return V * integrate_with_breaks(f, 0.0, 1.0, breaks);
  }
  if (belief.kind() == ComplexityBelief::Kind::TruncExp) {
    breaks.push_back(belief.lower() - e);
    breaks.push_back(belief.upper() - e);
  }
  auto f = [&](double th) { return belief.density(th + e) * law.density(th); };
  return V * integrate_with_breaks(f, 0.0, 1.0, breaks);
}

double expected_success(double e, const BranchLaw& law, const ComplexityBelief& belief,
                        Technology tech) {
  if (belief.kind() == ComplexityBelief::Kind::PointMass) {
    const double t = belief.point();
    if (tech == Technology::Multiplicative) {
      if (law.unit_point) return e >= t ? 1.0 : 0.0;
      if (e <= 0.0) return t <= 0.0 ? 1.0 : 0.0;
      return 1.0 - law.cdf(t / e);
    }
    if (law.unit_point) return 1.0 + e >= t ? 1.0 : 0.0;
    return 1.0 - law.cdf(t - e);
  }
  if (law.unit_point) return belief.cdf(tech == Technology::Multiplicative ? e : 1.0 + e);

  const double ts = law.theta_star;
  if (belief.kind() == ComplexityBelief::Kind::Prior) {
    const double lam = belief.rate();
    if (tech == Technology::Multiplicative) {
      const double c = lam * e;
      return 1.0 - (law.dens_lo * exp_moment(c, 0.0, ts) + law.dens_hi * exp_moment(c, ts, 1.0));
    }
    return 1.0 - std::exp(-lam * e) *
                     (law.dens_lo * exp_moment(lam, 0.0, ts) + law.dens_hi * exp_moment(lam, ts, 1.0));
  }

  const double a = belief.lower(), b = belief.upper();
  std::vector<double> breaks{ts};
  if (tech == Technology::Multiplicative) {
    if (e <= 0.0) return 0.0;  // T >= a >= 0 with positive support width
    breaks.push_back(a / e);
    breaks.push_back(b / e);
  } else {
    breaks.push_back(a - e);
    breaks.push_back(b - e);
  }
  auto f = [&](double th) {
    return law.density(th) * belief.cdf(tech == Technology::Multiplicative ? th * e : th + e);
  };
  return integrate_with_breaks(f, 0.0, 1.0, breaks);
}

EffortSolution solve_effort(const AbilityBranch& ab, const ComplexityBelief& belief, Technology tech,
                            const Primitives& prim) {
  return solve_with_law(branch_weight_and_density(ab), belief, tech, prim);
}

std::pair<EffortSolution, EffortSolution> effort_pair(double theta_star,
                                                      const ComplexityBelief& belief,
                                                      Technology tech, TestNoise noise,
                                                      const Primitives& prim) {
  const double ts = std::clamp(theta_star, 0.0, 1.0);
  EffortSolution pass, fail;
  try {
    pass = solve_effort({Branch::Pass, ts, noise}, belief, tech, prim);
  } catch (const EmptyBranchError&) {
    // theta* = 1: zero-width pass truncation, point mass at theta = 1
    pass = solve_with_law(unit_point_law(), belief, tech, prim);
  }
  try {
    fail = solve_effort({Branch::Fail, ts, noise}, belief, tech, prim);
  } catch (const EmptyBranchError&) {
    fail = EffortSolution{};  // theta* = 0: empty fail branch
    fail.degenerate = true;
  }
  return {pass, fail};
}

}  // namespace screening
