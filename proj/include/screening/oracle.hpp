#pragma once

#include <cstdint>
#include <optional>

#include "screening/advisor.hpp"
#include "screening/model.hpp"

// Brute-force and Monte-Carlo references for the test suite; production code
// never calls into this namespace.
namespace screening::oracle {

// Deterministic counter-based uniform draw on [0,1).
double u01(std::uint64_t seed, std::uint64_t counter);

// Exhaustive scan of the agent objective over {0, step, ..., e_max}; the
// success expectation is computed by fixed-panel Simpson quadrature.
double grid_argmax_effort(const AbilityBranch& ab, const ComplexityBelief& belief, Technology tech,
                          const Primitives& prim, double e_max, double step);

// Exhaustive scan of the advisor objective over theta in {0, step, ..., 1}.
double grid_argmax_threshold(double T, const Regime& regime, const Primitives& prim,
                             Technology tech, TestNoise noise, const PostingCost& pcost,
                             double step);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(draws)
  long long draws = 0;
  std::uint64_t seed = 0;
};

// Samples (theta, T, test noise), applies the policy and the regime's effort
// rule, and averages V*1{success} - C(e) - k(theta*). fixed_T pins the
// difficulty instead of drawing it from the exponential prior.
McEstimate mc_payoff(const PolicyCurve& policy, const Primitives& prim, Technology tech,
                     TestNoise noise, long long draws, std::uint64_t seed,
                     const Regime& regime = Regime::naive(),
                     const PostingCost& pcost = PostingCost::none(),
                     std::optional<double> fixed_T = std::nullopt);

McEstimate mc_payoff(double constant_theta, const Primitives& prim, Technology tech,
                     TestNoise noise, long long draws, std::uint64_t seed,
                     const Regime& regime = Regime::naive(),
                     const PostingCost& pcost = PostingCost::none(),
                     std::optional<double> fixed_T = std::nullopt);

}  // namespace screening::oracle
