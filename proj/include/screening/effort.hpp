#pragma once

#include <utility>

#include "screening/model.hpp"

namespace screening {

// Guard for divisions t/theta near the lower support edge of uniform ability.
inline constexpr double theta_min_clamp = 1e-6;

struct EffortSolution {
  double e = 0.0;
  bool interior = false;
  double residual = 0.0;         // C'(e) - R(e); meaningful at interior solutions
  double objective_value = 0.0;  // attained continuation payoff
  bool degenerate = false;       // zero-weight branch resolved by convention
};

// Marginal benefit R(e) of continuation effort for one branch:
//   R(e) = V * E_branch[theta * g(theta e)]  (multiplicative)
//   R(e) = V * E_branch[g(theta + e)]        (additive)
// Exponential-prior kernels evaluate in closed form; truncated-exponential
// beliefs go through adaptive quadrature. Throws PointMassHasNoDensity.
double marginal_benefit(double e, const AbilityBranch& ab, const ComplexityBelief& belief,
                        Technology tech, const Primitives& prim);

// Reference quadrature evaluation of the same kernel (used to validate the
// closed forms; also the production path for truncated beliefs).
double marginal_benefit_quadrature(double e, const AbilityBranch& ab, const ComplexityBelief& belief,
                                   Technology tech, const Primitives& prim);

// Agent-perceived success probability E_branch[P(success | theta, e)] under
// the given belief; the continuation objective is V * this - e^gamma.
double expected_success(double e, const BranchLaw& law, const ComplexityBelief& belief,
                        Technology tech);

// Continuation effort for one branch: unique FOC root gamma e^{gamma-1} = R(e)
// for density-bearing beliefs (corner e = 0 when R(0) = 0), direct kink-aware
// maximization for point-mass beliefs and detached truncated supports.
EffortSolution solve_effort(const AbilityBranch& ab, const ComplexityBelief& belief,
                            Technology tech, const Primitives& prim);

// Both branch solutions at a posted threshold. Zero-weight branches resolve by
// the limit conventions: theta*=0 fail is empty (e = 0, degenerate flag),
// theta*=1 pass is the point-mass-at-one truncation limit.
std::pair<EffortSolution, EffortSolution> effort_pair(double theta_star,
                                                      const ComplexityBelief& belief,
                                                      Technology tech, TestNoise noise,
                                                      const Primitives& prim);

}  // namespace screening
