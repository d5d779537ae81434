#pragma once

#include <cstddef>
#include <vector>

#include "screening/effort.hpp"
#include "screening/model.hpp"

namespace screening {

// How the agent's belief over T is assigned when the advisor posts a threshold.
class Regime {
 public:
  enum class Kind { Naive, SeparatingConjecture, Pooled };

  static Regime naive() { return Regime(Kind::Naive); }
  static Regime separating_conjecture() { return Regime(Kind::SeparatingConjecture); }
  static Regime pooled(double block_lo, double block_hi);

  Kind kind() const { return kind_; }
  double block_lo() const { return a_; }
  double block_hi() const { return b_; }

  // The effort-stage belief induced at true difficulty T.
  ComplexityBelief belief_at(double T, double lambda) const;

 private:
  explicit Regime(Kind k, double a = 0.0, double b = 0.0) : kind_(k), a_(a), b_(b) {}
  Kind kind_;
  double a_, b_;
};

struct ObjectiveBreakdown {
  double success_prob = 0.0;
  double effort_cost = 0.0;
  double posting_cost = 0.0;
  double total = 0.0;  // V*success_prob - effort_cost - posting_cost
};

// Assembles the advisor payoff from already-solved branch efforts (uniform ability).
ObjectiveBreakdown objective_from_efforts(double T, double theta_star, double e_pass, double e_fail,
                                          const Primitives& prim, Technology tech, TestNoise noise,
                                          const PostingCost& pcost);

ObjectiveBreakdown objective_with_belief(double T, double theta_star, const ComplexityBelief& belief,
                                         const Primitives& prim, Technology tech, TestNoise noise,
                                         const PostingCost& pcost);

ObjectiveBreakdown objective(double T, double theta_star, const Regime& regime,
                             const Primitives& prim, Technology tech, TestNoise noise,
                             const PostingCost& pcost);

// Weighted effort cost across the two branches at a posted threshold.
double continuation_cost(double theta_star, const Regime& regime, const Primitives& prim,
                         Technology tech, TestNoise noise);
double continuation_cost_with_belief(double theta_star, const ComplexityBelief& belief,
                                     const Primitives& prim, Technology tech, TestNoise noise);

struct ThresholdChoice {
  double theta_star = 0.0;
  double value = 0.0;
  bool near_tie = false;  // a remote runner-up came within 1e-9 of the max
};

ThresholdChoice optimal_threshold(double T, const Regime& regime, const Primitives& prim,
                                  Technology tech, TestNoise noise, const PostingCost& pcost);

struct PolicyCurve {
  std::vector<double> T_grid;
  std::vector<double> theta_values;
  std::vector<double> values;
  std::vector<char> near_tie;
};

PolicyCurve policy_curve(const std::vector<double>& T_grid, const Regime& regime,
                         const Primitives& prim, Technology tech, TestNoise noise,
                         const PostingCost& pcost);

struct PooledBlock {
  double T1 = 0.0;
  double T2 = 0.0;
  double theta_bar = 0.0;
  std::size_t i1 = 0;  // grid indices spanned by the block
  std::size_t i2 = 0;
};

struct TaxonomyReport {
  enum class Kind { Separating, Pooling, SemiSeparating };
  Kind kind = Kind::Separating;
  std::vector<PooledBlock> blocks;
  bool flagged = false;  // some grid point had a near-tie argmax
};

TaxonomyReport classify_policy(const PolicyCurve& curve, double flat_tol);

// One-sided difference quotient of the advisor payoff in the posted threshold,
// efforts re-solved at theta_bar + h; posting costs excluded.
double mvi(double T, double theta_bar, double h, const Regime& regime, const Primitives& prim,
           Technology tech, TestNoise noise);

struct IterationResult {
  PolicyCurve curve;
  int rounds_used = 0;
  double final_change = 0.0;  // sup-norm change of theta over the last round
};

// Alternates belief inversion (increasing segments -> point mass, flat blocks ->
// truncated exponential) with per-T re-optimization; stops early when the
// sup-norm change drops to 1e-4.
IterationResult best_response_iteration(const PolicyCurve& initial, int rounds,
                                        const Primitives& prim, Technology tech, TestNoise noise,
                                        const PostingCost& pcost);

// Largest T found (to 1e-6) below which the optimal threshold stays at zero.
double detect_t_small(const Regime& regime, const Primitives& prim, Technology tech,
                      TestNoise noise, const PostingCost& pcost, double t_hi = 1.0);

}  // namespace screening
