#include "screening/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "screening/advisor.hpp"
#include "screening/numerics.hpp"

namespace screening {

void SeparatingKnob::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("SeparatingKnob: alpha must lie in (0, 1]");
}

namespace {

void require_pool_params(double lambda, double gamma) {
  if (!(lambda > 0.0)) throw std::invalid_argument("u_pool: lambda must be positive");
  if (!(gamma > 1.0)) throw std::invalid_argument("u_pool: gamma must exceed 1");
}

}  // namespace

double u_pool(double lambda, double V, double gamma) {
  if (V <= 0.0) return 0.0;
  require_pool_params(lambda, gamma);
  // stationarity in z = lambda*e: z^{gamma-1} e^z = (V/gamma) lambda^gamma,
  // solved in logs where both sides stay O(1)
  const double L = std::log(V / gamma) + gamma * std::log(lambda);
  auto g = [&](double z) { return (gamma - 1.0) * std::log(z) + z - L; };
  double lo = std::min(1.0, std::exp(L / (gamma - 1.0)));
  for (int i = 0; i < 600 && g(lo) > 0.0; ++i) lo *= 0.25;
  double hi = std::max(1.0, L + 10.0);
  for (int i = 0; i < 200 && g(hi) < 0.0; ++i) hi *= 2.0;
  const double z = num::find_root_bracketed(g, {lo, hi}, {1e-14, 1e-14, 300});
  // payoff at the stationary point; second-order insensitive to root error
  const double val = V * (-std::expm1(-z)) - std::pow(z / lambda, gamma);
  return std::max(0.0, val);
}

double u_pool_quadratic(double lambda, double V) {
  if (V <= 0.0) return 0.0;
  if (!(lambda > 0.0)) throw std::invalid_argument("u_pool_quadratic: lambda must be positive");
  const double w = num::lambert_w0(0.5 * V * lambda * lambda);
  return std::max(0.0, V - (w * w + 2.0 * w) / (lambda * lambda));
}

double u_sep_bound(double lambda, double V, double gamma, SeparatingKnob knob) {
  knob.validate();
  if (V <= 0.0) return 0.0;
  require_pool_params(lambda, gamma);
  const double x = lambda * knob.alpha * std::pow(V, 1.0 / gamma);
  return (1.0 - std::pow(knob.alpha, gamma)) * V * num::exp_mean_defect(x);
}

PartitionPoint phi(double lambda, double V, double gamma, SeparatingKnob knob) {
  PartitionPoint p;
  p.lambda = lambda;
  p.V = V;
  p.gamma = gamma;
  p.alpha = knob.alpha;
  p.u_sep = u_sep_bound(lambda, V, gamma, knob);
  p.u_pool = u_pool(lambda, V, gamma);
  p.phi = p.u_sep - p.u_pool;
  if (p.phi > 1e-9)
    p.classification = PartitionClass::SeparatingByBounds;
  else if (p.phi < -1e-9)
    p.classification = PartitionClass::PoolingSustainableByBounds;
  else
    p.classification = PartitionClass::Boundary;
  return p;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  g.reserve(80);
  for (int i = 0; i < 40; ++i) g.push_back(std::pow(10.0, -3.0 + 3.0 * i / 39.0));
  for (int i = 0; i < 40; ++i) g.push_back(1.0 + (1000.0 - 1.0) * i / 39.0);
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double lambda_star(double V, double gamma, SeparatingKnob knob,
                   std::span<const double> search_grid) {
  knob.validate();
  std::vector<double> fallback;
  if (search_grid.empty()) {
    fallback = default_lambda_grid();
    search_grid = fallback;
  }
  auto f = [&](double lam) { return phi(lam, V, gamma, knob).phi; };
  const num::Bracket br = num::find_bracket(f, search_grid);
  return num::find_root_bracketed(f, br, {1e-10, 1e-10, 200});
}

namespace {

BoundaryCurve trace_boundary(BoundaryCurve::Axis axis, const std::vector<double>& grid,
                             auto&& solve_one) {
  BoundaryCurve out;
  out.axis = axis;
  out.grid = grid;
  out.lambda_star_values.reserve(grid.size());
  for (double x : grid) {
    try {
      out.lambda_star_values.emplace_back(solve_one(x));
    } catch (const num::NoCrossingError&) {
      out.lambda_star_values.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace

BoundaryCurve boundary_vs_V(const std::vector<double>& V_grid, double gamma, SeparatingKnob knob) {
  return trace_boundary(BoundaryCurve::Axis::V, V_grid,
                        [&](double V) { return lambda_star(V, gamma, knob); });
}

BoundaryCurve boundary_vs_gamma(const std::vector<double>& gamma_grid, double V,
                                SeparatingKnob knob) {
  for (double g : gamma_grid)
    if (!(g > 1.0)) throw std::invalid_argument("boundary_vs_gamma: entries must exceed 1");
  return trace_boundary(BoundaryCurve::Axis::Gamma, gamma_grid,
                        [&](double g) { return lambda_star(V, g, knob); });
}

AsymptoticsReport asymptotic_check(double V, double gamma, SeparatingKnob knob) {
  knob.validate();
  AsymptoticsReport rep;
  const double a = knob.alpha;

  const double lam_small = 1e-4;
  rep.slope_value = u_sep_bound(lam_small, V, gamma, knob) / lam_small;
  rep.slope_target = 0.5 * (1.0 - std::pow(a, gamma)) * a * std::pow(V, 1.0 + 1.0 / gamma);
  rep.slope_rel_err = rep.slope_target != 0.0
                          ? std::abs(rep.slope_value - rep.slope_target) / std::abs(rep.slope_target)
                          : std::abs(rep.slope_value);

  const double p1 = u_pool(1e-4, V, gamma), p2 = u_pool(1e-3, V, gamma);
  rep.exponent_value = (std::log(p2) - std::log(p1)) / std::log(10.0);
  rep.exponent_target = gamma / (gamma - 1.0);
  rep.exponent_rel_err = std::abs(rep.exponent_value - rep.exponent_target) / rep.exponent_target;

  const double lam_big = 1e3;
  rep.sep_limit_value = u_sep_bound(lam_big, V, gamma, knob);
  rep.sep_limit_target = (1.0 - std::pow(a, gamma)) * V;
  rep.sep_limit_gap = std::abs(rep.sep_limit_value - rep.sep_limit_target);
  rep.pool_limit_value = u_pool(lam_big, V, gamma);
  rep.pool_limit_target = V;
  rep.pool_limit_gap = std::abs(rep.pool_limit_value - rep.pool_limit_target);
  return rep;
}

IcVerdict ic_diagnostic(double lambda, double V, double gamma, SeparatingKnob knob) {
  switch (phi(lambda, V, gamma, knob).classification) {
    case PartitionClass::SeparatingByBounds:
      return IcVerdict::PoolingEliminated;
    case PartitionClass::PoolingSustainableByBounds:
      return IcVerdict::PoolingSustainableByBounds;
    case PartitionClass::Boundary:
      break;
  }
  return IcVerdict::Boundary;
}

namespace {

std::vector<double> clip_and_sort(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out;
  for (double p : pts)
    if (p > lo && p < hi) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

double piecewise_integral(const std::function<double(double)>& f, double lo, double hi,
                          const std::vector<double>& inner, num::Tolerance tol) {
  double total = 0.0, prev = lo;
  for (double x : inner) {
    if (x - prev > 1e-14) total += num::integrate(f, prev, x, tol);
    prev = x;
  }
  if (hi - prev > 1e-14) total += num::integrate(f, prev, hi, tol);
  return total;
}

}  // namespace

VoiResult value_of_information(const Primitives& prim, Technology tech, TestNoise noise,
                               const PostingCost& pcost, const std::vector<double>& T_grid,
                               const ComplexityBelief* t_dist) {
  validate(prim);
  validate(noise);
  const ComplexityBelief dist =
      t_dist != nullptr ? *t_dist : ComplexityBelief::prior(prim.lambda);
  if (!dist.has_density())
    throw std::invalid_argument("value_of_information: T distribution must carry a density");

  double lo = 0.0, hi = 0.0;
  if (dist.kind() == ComplexityBelief::Kind::Prior) {
    hi = num::exp_tail_cutoff(dist.rate(), 1e-10);
  } else {
    lo = dist.lower();
    hi = dist.upper();
  }

  // branch efforts depend on T only through the fixed belief: cache per threshold
  std::map<std::uint64_t, std::pair<double, double>> cache;
  auto efforts_at = [&](double ts) {
    std::uint64_t key = 0;
    std::memcpy(&key, &ts, sizeof key);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto [pass, fail] = effort_pair(ts, dist, tech, noise, prim);
    auto val = std::make_pair(pass.e, fail.e);
    cache.emplace(key, val);
    return val;
  };

  const std::vector<double> panel_edges = clip_and_sort(T_grid, lo, hi);

  auto informed_integrand = [&](double T) {
    auto f = [&](double ts) {
      auto [epass, efail] = efforts_at(ts);
      return objective_from_efforts(T, ts, epass, efail, prim, tech, noise, pcost).total;
    };
    return dist.density(T) * num::maximize_1d(f, 0.0, 1.0, {1e-8, 1e-8, 200}).max;
  };
  const double informed =
      piecewise_integral(informed_integrand, lo, hi, panel_edges, {1e-5, 1e-5, 200});

  auto constant_value = [&](double ts) {
    auto [epass, efail] = efforts_at(ts);
    std::vector<double> brks;
    if (tech == Technology::Multiplicative)
      brks = {ts * epass, epass, ts * efail, efail};
    else
      brks = {epass, epass + ts, epass + 1.0, efail, efail + ts, efail + 1.0};
    auto sf = [&](double T) {
      return dist.density(T) *
             objective_from_efforts(T, ts, epass, efail, prim, tech, noise, pcost).success_prob;
    };
    const double es = piecewise_integral(sf, lo, hi, clip_and_sort(std::move(brks), lo, hi),
                                         {1e-9, 1e-9, 200});
    const double tsc = std::clamp(ts, 0.0, 1.0);
    const double w_pass = (1.0 - noise.eta_minus) * (1.0 - tsc) + noise.eta_plus * tsc;
    const double effort_cost =
        w_pass * std::pow(epass, prim.gamma) + (1.0 - w_pass) * std::pow(efail, prim.gamma);
    return prim.V * es - effort_cost - pcost(tsc);
  };
  const num::MaxResult um = num::maximize_1d(constant_value, 0.0, 1.0, {1e-8, 1e-8, 200});

  VoiResult out;
  out.informed = informed;
  out.uninformed = um.max;
  out.best_constant_theta = um.argmax;
  out.raw = informed - um.max;
  out.value = std::max(0.0, out.raw);
  return out;
}

}  // namespace screening
