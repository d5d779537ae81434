#include "screening/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace screening::oracle {

double u01(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return double(z >> 11) * 0x1.0p-53;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (!(b > a)) return 0.0;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// P(success | e) under the branch posterior, by quadrature where a density exists.
double success_probability(double e, const BranchLaw& law, const ComplexityBelief& belief,
                           Technology tech) {
  const bool mult = tech == Technology::Multiplicative;
  if (belief.kind() == ComplexityBelief::Kind::PointMass) {
    const double t = belief.point();
    if (law.unit_point) return (mult ? e >= t : 1.0 + e >= t) ? 1.0 : 0.0;
    if (mult) {
      if (e <= 0.0) return t <= 0.0 ? 1.0 : 0.0;
      return 1.0 - law.cdf(t / e);
    }
    return 1.0 - law.cdf(t - e);
  }
  if (law.unit_point) return belief.cdf(mult ? e : 1.0 + e);
  auto g = [&](double th) { return belief.cdf(mult ? th * e : th + e); };
  const double ts = law.theta_star;
  return law.dens_lo * simpson(g, 0.0, ts, 500) + law.dens_hi * simpson(g, ts, 1.0, 500);
}

}  // namespace

double grid_argmax_effort(const AbilityBranch& ab, const ComplexityBelief& belief, Technology tech,
                          const Primitives& prim, double e_max, double step) {
  if (!(step > 0.0) || !(e_max > 0.0))
    throw std::invalid_argument("grid_argmax_effort: step and e_max must be positive");
  const BranchLaw law = branch_weight_and_density(ab);
  const long long n = (long long)std::ceil(e_max / step);
  double best_e = 0.0, best_v = -std::numeric_limits<double>::infinity();
  for (long long i = 0; i <= n; ++i) {
    const double e = std::min(double(i) * step, e_max);
    const double v =
        prim.V * success_probability(e, law, belief, tech) - std::pow(e, prim.gamma);
    if (v > best_v) {
      best_v = v;
      best_e = e;
    }
  }
  return best_e;
}

double grid_argmax_threshold(double T, const Regime& regime, const Primitives& prim,
                             Technology tech, TestNoise noise, const PostingCost& pcost,
                             double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_argmax_threshold: step must be positive");
  const long long n = (long long)std::ceil(1.0 / step);
  double best_th = 0.0, best_v = -std::numeric_limits<double>::infinity();
  for (long long i = 0; i <= n; ++i) {
    const double th = std::min(double(i) * step, 1.0);
    const double v = objective(T, th, regime, prim, tech, noise, pcost).total;
    if (v > best_v) {
      best_v = v;
      best_th = th;
    }
  }
  return best_th;
}

namespace {

McEstimate mc_impl(const std::function<double(double)>& policy, const Primitives& prim,
                   Technology tech, TestNoise noise, long long draws, std::uint64_t seed,
                   const Regime& regime, const PostingCost& pcost, std::optional<double> fixed_T) {
  if (draws < 1) throw std::invalid_argument("mc_payoff: draws must be positive");
  // a worthless stake is a legitimate degenerate case; rate and curvature are not
  if (!(prim.V >= 0.0)) throw std::domain_error("mc_payoff: V must be >= 0");
  if (!(prim.gamma > 1.0)) throw std::domain_error("mc_payoff: gamma must be > 1");
  if (!(prim.lambda > 0.0)) throw std::domain_error("mc_payoff: lambda must be > 0");
  validate(noise);

  // effort depends on the posted threshold and, for separating conjectures, on T
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<double, double>> cache;
  auto efforts = [&](double ts, double T) {
    std::uint64_t kts = 0, kT = 0;
    std::memcpy(&kts, &ts, sizeof kts);
    if (regime.kind() == Regime::Kind::SeparatingConjecture) std::memcpy(&kT, &T, sizeof kT);
    const auto key = std::make_pair(kts, kT);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto [pass, fail] = effort_pair(ts, regime.belief_at(T, prim.lambda), tech, noise, prim);
    auto val = std::make_pair(pass.e, fail.e);
    cache.emplace(key, val);
    return val;
  };

  long double sum = 0.0L, sumsq = 0.0L;
  for (long long i = 0; i < draws; ++i) {
    const double theta = u01(seed, 3 * std::uint64_t(i));
    const double uT = u01(seed, 3 * std::uint64_t(i) + 1);
    const double un = u01(seed, 3 * std::uint64_t(i) + 2);

    const double T = fixed_T ? *fixed_T : -std::log1p(-uT) / prim.lambda;
    const double ts = std::clamp(policy(T), 0.0, 1.0);
    const bool pass = theta >= ts ? un >= noise.eta_minus : un < noise.eta_plus;
    const auto [e_pass, e_fail] = efforts(ts, T);
    const double e = pass ? e_pass : e_fail;
    const bool success = tech == Technology::Multiplicative ? theta * e >= T : theta + e >= T;
    const double x = (success ? prim.V : 0.0) - std::pow(e, prim.gamma) - pcost(ts);
    sum += x;
    sumsq += (long double)x * x;
  }

  McEstimate out;
  out.draws = draws;
  out.seed = seed;
  out.mean = double(sum / draws);
  if (draws > 1) {
    const long double var = (sumsq - sum * sum / draws) / (draws - 1);
    out.std_error = double(std::sqrt(std::max(0.0L, var) / draws));
  }
  return out;
}

}  // namespace

McEstimate mc_payoff(const PolicyCurve& policy, const Primitives& prim, Technology tech,
                     TestNoise noise, long long draws, std::uint64_t seed, const Regime& regime,
                     const PostingCost& pcost, std::optional<double> fixed_T) {
  if (policy.T_grid.empty()) throw std::invalid_argument("mc_payoff: empty policy curve");
  auto lookup = [&policy](double T) {
    const auto& g = policy.T_grid;
    auto it = std::upper_bound(g.begin(), g.end(), T);
    if (it == g.begin()) return policy.theta_values.front();
    return policy.theta_values[std::size_t(it - g.begin()) - 1];
  };
  return mc_impl(lookup, prim, tech, noise, draws, seed, regime, pcost, fixed_T);
}

McEstimate mc_payoff(double constant_theta, const Primitives& prim, Technology tech,
                     TestNoise noise, long long draws, std::uint64_t seed, const Regime& regime,
                     const PostingCost& pcost, std::optional<double> fixed_T) {
  return mc_impl([constant_theta](double) { return constant_theta; }, prim, tech, noise, draws,
                 seed, regime, pcost, fixed_T);
}

}  // namespace screening::oracle
