#include "screening/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "screening/numerics.hpp"

namespace screening {

Regime Regime::pooled(double block_lo, double block_hi) {
  if (!(block_lo >= 0.0) || !(block_hi > block_lo))
    throw std::invalid_argument("Regime::pooled: need 0 <= lo < hi");
  return Regime(Kind::Pooled, block_lo, block_hi);
}

ComplexityBelief Regime::belief_at(double T, double lambda) const {
  switch (kind_) {
    case Kind::Naive:
      return ComplexityBelief::prior(lambda);
    case Kind::SeparatingConjecture:
      return ComplexityBelief::point_mass(T);
    case Kind::Pooled:
      return ComplexityBelief::trunc_exp(lambda, a_, b_);
  }
  throw std::logic_error("Regime::belief_at: bad kind");
}

namespace {

// Ability mass of [lo,hi] that clears a success cutoff in theta.
double len_above(double cut, double lo, double hi) { return hi - std::clamp(cut, lo, hi); }

double success_cut(double T, double e, Technology tech) {
  if (tech == Technology::Multiplicative) {
    if (T <= 0.0) return 0.0;  // theta*0 >= 0 always holds
    if (e <= 0.0) return std::numeric_limits<double>::infinity();
    return T / e;
  }
  return T - e;
}

struct EffortCache {
  std::map<std::uint64_t, std::pair<EffortSolution, EffortSolution>> map;
};

std::pair<EffortSolution, EffortSolution> efforts_cached(double ts, const ComplexityBelief& belief,
                                                         Technology tech, TestNoise noise,
                                                         const Primitives& prim,
                                                         EffortCache* cache) {
  if (cache == nullptr) return effort_pair(ts, belief, tech, noise, prim);
  std::uint64_t key = 0;
  std::memcpy(&key, &ts, sizeof key);
  if (auto it = cache->map.find(key); it != cache->map.end()) return it->second;
  auto sol = effort_pair(ts, belief, tech, noise, prim);
  cache->map.emplace(key, sol);
  return sol;
}

ThresholdChoice optimize_threshold_impl(double T, const ComplexityBelief& belief,
                                        const Primitives& prim, Technology tech, TestNoise noise,
                                        const PostingCost& pcost, EffortCache* cache, double lo,
                                        double hi, num::MaxDiag* diag) {
  auto f = [&](double ts) {
    auto [pass, fail] = efforts_cached(ts, belief, tech, noise, prim, cache);
    return objective_from_efforts(T, ts, pass.e, fail.e, prim, tech, noise, pcost).total;
  };
  const num::MaxResult m = num::maximize_1d(f, lo, hi, {1e-9, 1e-9, 200}, 512, diag);
  return {m.argmax, m.max, false};
}

bool near_tie_from(const num::MaxDiag& diag, double best) {
  return diag.has_runner && best - diag.runner_val <= 1e-9;
}

}  // namespace

ObjectiveBreakdown objective_from_efforts(double T, double theta_star, double e_pass, double e_fail,
                                          const Primitives& prim, Technology tech, TestNoise noise,
                                          const PostingCost& pcost) {
  const double ts = std::clamp(theta_star, 0.0, 1.0);
  const double em = noise.eta_minus, ep = noise.eta_plus;
  const double cut_p = success_cut(T, e_pass, tech);
  const double cut_f = success_cut(T, e_fail, tech);

  ObjectiveBreakdown out;
  out.success_prob = (1.0 - em) * len_above(cut_p, ts, 1.0) + ep * len_above(cut_p, 0.0, ts) +
                     em * len_above(cut_f, ts, 1.0) + (1.0 - ep) * len_above(cut_f, 0.0, ts);
  const double w_pass = (1.0 - em) * (1.0 - ts) + ep * ts;
  out.effort_cost =
      w_pass * std::pow(e_pass, prim.gamma) + (1.0 - w_pass) * std::pow(e_fail, prim.gamma);
  out.posting_cost = pcost(ts);
  out.total = prim.V * out.success_prob - out.effort_cost - out.posting_cost;
  return out;
}

ObjectiveBreakdown objective_with_belief(double T, double theta_star, const ComplexityBelief& belief,
                                         const Primitives& prim, Technology tech, TestNoise noise,
                                         const PostingCost& pcost) {
  auto [pass, fail] = effort_pair(theta_star, belief, tech, noise, prim);
  return objective_from_efforts(T, theta_star, pass.e, fail.e, prim, tech, noise, pcost);
}

ObjectiveBreakdown objective(double T, double theta_star, const Regime& regime,
                             const Primitives& prim, Technology tech, TestNoise noise,
                             const PostingCost& pcost) {
  return objective_with_belief(T, theta_star, regime.belief_at(T, prim.lambda), prim, tech, noise,
                               pcost);
}

double continuation_cost_with_belief(double theta_star, const ComplexityBelief& belief,
                                     const Primitives& prim, Technology tech, TestNoise noise) {
  const double ts = std::clamp(theta_star, 0.0, 1.0);
  auto [pass, fail] = effort_pair(ts, belief, tech, noise, prim);
  const double w_pass = (1.0 - noise.eta_minus) * (1.0 - ts) + noise.eta_plus * ts;
  return w_pass * std::pow(pass.e, prim.gamma) + (1.0 - w_pass) * std::pow(fail.e, prim.gamma);
}

double continuation_cost(double theta_star, const Regime& regime, const Primitives& prim,
                         Technology tech, TestNoise noise) {
  if (regime.kind() == Regime::Kind::SeparatingConjecture)
    throw std::invalid_argument(
        "continuation_cost: separating-conjecture beliefs depend on T; pass an explicit belief");
  return continuation_cost_with_belief(theta_star, regime.belief_at(0.0, prim.lambda), prim, tech,
                                       noise);
}

ThresholdChoice optimal_threshold(double T, const Regime& regime, const Primitives& prim,
                                  Technology tech, TestNoise noise, const PostingCost& pcost) {
  const ComplexityBelief belief = regime.belief_at(T, prim.lambda);
  num::MaxDiag diag;
  ThresholdChoice c =
      optimize_threshold_impl(T, belief, prim, tech, noise, pcost, nullptr, 0.0, 1.0, &diag);
  c.near_tie = near_tie_from(diag, c.value);
  return c;
}

namespace {

// Shared policy-curve pass: optimizes each grid point, preferring the
// restricted argmax over [theta_prev, 1] whenever it ties the global one
// (monotone selection among exact ties).
PolicyCurve optimize_over_grid(const std::vector<double>& T_grid,
                               const std::vector<ComplexityBelief>& beliefs,
                               const std::vector<EffortCache*>& caches, const Primitives& prim,
                               Technology tech, TestNoise noise, const PostingCost& pcost) {
  PolicyCurve out;
  out.T_grid = T_grid;
  out.theta_values.reserve(T_grid.size());
  out.values.reserve(T_grid.size());
  out.near_tie.reserve(T_grid.size());

  double prev = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    num::MaxDiag diag;
    const ThresholdChoice g = optimize_threshold_impl(T_grid[i], beliefs[i], prim, tech, noise,
                                                      pcost, caches[i], 0.0, 1.0, &diag);
    double th = g.theta_star, val = g.value;
    if (have_prev && th < prev) {
      const ThresholdChoice r = optimize_threshold_impl(T_grid[i], beliefs[i], prim, tech, noise,
                                                        pcost, caches[i], prev, 1.0, nullptr);
      if (r.value >= g.value - 1e-9 * std::max(1.0, std::abs(g.value))) {
        th = r.theta_star;
        val = r.value;
      }
    }
    out.theta_values.push_back(th);
    out.values.push_back(val);
    out.near_tie.push_back(near_tie_from(diag, g.value) ? 1 : 0);
    prev = th;
    have_prev = true;
  }
  return out;
}

}  // namespace

PolicyCurve policy_curve(const std::vector<double>& T_grid, const Regime& regime,
                         const Primitives& prim, Technology tech, TestNoise noise,
                         const PostingCost& pcost) {
  const std::size_t n = T_grid.size();
  std::vector<ComplexityBelief> beliefs;
  beliefs.reserve(n);
  for (double T : T_grid) beliefs.push_back(regime.belief_at(T, prim.lambda));

  // efforts depend on T only through the belief, so naive/pooled runs share one cache
  EffortCache shared;
  const bool shareable = regime.kind() != Regime::Kind::SeparatingConjecture;
  std::vector<EffortCache*> caches(n, shareable ? &shared : nullptr);
  return optimize_over_grid(T_grid, beliefs, caches, prim, tech, noise, pcost);
}

TaxonomyReport classify_policy(const PolicyCurve& curve, double flat_tol) {
  TaxonomyReport rep;
  const auto& th = curve.theta_values;
  const std::size_t n = th.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    if (std::abs(th[i + 1] - th[i]) <= flat_tol) {
      std::size_t j = i + 1;
      while (j + 1 < n && std::abs(th[j + 1] - th[j]) <= flat_tol) ++j;
      double sum = 0.0;
      for (std::size_t k = i; k <= j; ++k) sum += th[k];
      rep.blocks.push_back({curve.T_grid[i], curve.T_grid[j], sum / double(j - i + 1), i, j});
      i = j;
    } else {
      ++i;
    }
  }
  if (rep.blocks.empty())
    rep.kind = TaxonomyReport::Kind::Separating;
  else if (rep.blocks.size() == 1 && rep.blocks[0].i1 == 0 && rep.blocks[0].i2 + 1 == n)
    rep.kind = TaxonomyReport::Kind::Pooling;
  else
    rep.kind = TaxonomyReport::Kind::SemiSeparating;
  for (char c : curve.near_tie)
    if (c) rep.flagged = true;
  return rep;
}

double mvi(double T, double theta_bar, double h, const Regime& regime, const Primitives& prim,
           Technology tech, TestNoise noise) {
  if (!(h > 0.0)) throw std::invalid_argument("mvi: step must be positive");
  if (theta_bar + h > 1.0) throw std::invalid_argument("mvi: theta_bar + h exceeds 1");
  const PostingCost none = PostingCost::none();
  const ComplexityBelief belief = regime.belief_at(T, prim.lambda);
  const double u0 = objective_with_belief(T, theta_bar, belief, prim, tech, noise, none).total;
  const double u1 = objective_with_belief(T, theta_bar + h, belief, prim, tech, noise, none).total;
  return (u1 - u0) / h;
}

IterationResult best_response_iteration(const PolicyCurve& initial, int rounds,
                                        const Primitives& prim, Technology tech, TestNoise noise,
                                        const PostingCost& pcost) {
  IterationResult res;
  res.curve = initial;
  const std::size_t n = initial.T_grid.size();
  if (rounds <= 0 || n == 0) return res;

  constexpr double inversion_flat_tol = 1e-5;
  for (int r = 0; r < rounds; ++r) {
    const PolicyCurve& cur = res.curve;

    const TaxonomyReport tax = classify_policy(cur, inversion_flat_tol);
    std::vector<int> block_of(n, -1);
    for (std::size_t b = 0; b < tax.blocks.size(); ++b)
      for (std::size_t k = tax.blocks[b].i1; k <= tax.blocks[b].i2; ++k) block_of[k] = int(b);

    std::vector<ComplexityBelief> beliefs;
    beliefs.reserve(n);
    std::vector<EffortCache> block_caches(tax.blocks.size());
    std::vector<EffortCache*> caches(n, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      if (block_of[i] >= 0) {
        const PooledBlock& b = tax.blocks[std::size_t(block_of[i])];
        if (b.T2 > b.T1) {
          beliefs.push_back(ComplexityBelief::trunc_exp(prim.lambda, b.T1, b.T2));
          caches[i] = &block_caches[std::size_t(block_of[i])];
          continue;
        }
      }
      beliefs.push_back(ComplexityBelief::point_mass(cur.T_grid[i]));
    }

    PolicyCurve next = optimize_over_grid(cur.T_grid, beliefs, caches, prim, tech, noise, pcost);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      change = std::max(change, std::abs(next.theta_values[i] - cur.theta_values[i]));
    res.curve = std::move(next);
    res.rounds_used = r + 1;
    res.final_change = change;
    if (change <= 1e-4) break;
  }
  return res;
}

double detect_t_small(const Regime& regime, const Primitives& prim, Technology tech,
                      TestNoise noise, const PostingCost& pcost, double t_hi) {
  if (!(t_hi > 0.0)) throw std::invalid_argument("detect_t_small: t_hi must be positive");
  auto departs = [&](double T) {
    return optimal_threshold(T, regime, prim, tech, noise, pcost).theta_star > 1e-3;
  };

  // scan a log ladder for the FIRST departure: the predicate need not be
  // monotone in T (at large T the corner ties can pull the argmax back to 0)
  double lo = 0.0, hi = 0.0;
  double prev = 0.0;
  bool found = false;
  const int steps = 48;
  for (int i = 0; i <= steps; ++i) {
    const double T = t_hi * std::pow(10.0, -6.0 * (1.0 - double(i) / steps));
    if (departs(T)) {
      lo = prev;
      hi = T;
      found = true;
      break;
    }
    prev = T;
  }
  if (!found) return t_hi;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (departs(mid) ? hi : lo) = mid;
  }
  return lo;
}

}  // namespace screening
