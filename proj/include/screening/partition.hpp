#pragma once

#include <optional>
#include <span>
#include <vector>

#include "screening/model.hpp"

namespace screening {

// Knob indexing the feasible separating-policy family used by the lower bound.
struct SeparatingKnob {
  double alpha = 0.5;
  void validate() const;
};

enum class PartitionClass { SeparatingByBounds, Boundary, PoolingSustainableByBounds };

struct PartitionPoint {
  double lambda = 0.0;
  double V = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double u_sep = 0.0;
  double u_pool = 0.0;
  double phi = 0.0;  // u_sep - u_pool
  PartitionClass classification = PartitionClass::Boundary;
};

// Pooling upper benchmark: max_e V(1 - e^{-lambda e}) - e^gamma, via the
// stationarity substitution z = lambda*e.
double u_pool(double lambda, double V, double gamma);

// Same object for gamma = 2 in Lambert-W closed form.
double u_pool_quadratic(double lambda, double V);

// Feasible separating lower bound (1 - alpha^gamma) * V * [1 - (1-e^{-x})/x],
// x = lambda * alpha * V^{1/gamma}.
double u_sep_bound(double lambda, double V, double gamma, SeparatingKnob knob);

PartitionPoint phi(double lambda, double V, double gamma, SeparatingKnob knob);

// Mixed log/linear lambda grid: 40 log points on [1e-3, 1], 40 linear on [1, 1e3].
std::vector<double> default_lambda_grid();

// Zero of phi in lambda over the grid (empty grid = the default one).
double lambda_star(double V, double gamma, SeparatingKnob knob,
                   std::span<const double> search_grid = {});

struct BoundaryCurve {
  enum class Axis { V, Gamma };
  Axis axis = Axis::V;
  std::vector<double> grid;
  std::vector<std::optional<double>> lambda_star_values;  // absent where phi never crosses
};

BoundaryCurve boundary_vs_V(const std::vector<double>& V_grid, double gamma, SeparatingKnob knob);
BoundaryCurve boundary_vs_gamma(const std::vector<double>& gamma_grid, double V,
                                SeparatingKnob knob);

struct AsymptoticsReport {
  double slope_value = 0.0;  // u_sep(lambda)/lambda at lambda = 1e-4
  double slope_target = 0.0;
  double slope_rel_err = 0.0;
  double exponent_value = 0.0;  // log-log slope of u_pool over {1e-4, 1e-3}
  double exponent_target = 0.0;
  double exponent_rel_err = 0.0;
  double sep_limit_value = 0.0;  // at lambda = 1e3
  double sep_limit_target = 0.0;
  double sep_limit_gap = 0.0;
  double pool_limit_value = 0.0;
  double pool_limit_target = 0.0;
  double pool_limit_gap = 0.0;
};

AsymptoticsReport asymptotic_check(double V, double gamma, SeparatingKnob knob);

enum class IcVerdict { PoolingEliminated, PoolingSustainableByBounds, Boundary };

IcVerdict ic_diagnostic(double lambda, double V, double gamma, SeparatingKnob knob);

struct VoiResult {
  double value = 0.0;  // max(0, raw)
  double raw = 0.0;    // informed - uninformed
  double informed = 0.0;
  double uninformed = 0.0;
  double best_constant_theta = 0.0;
};

// Advisor's value of observing T versus committing to one threshold; the
// distribution of T defaults to the exponential prior at prim.lambda and also
// serves as the agent's effort-stage belief.
VoiResult value_of_information(const Primitives& prim, Technology tech, TestNoise noise,
                               const PostingCost& pcost, const std::vector<double>& T_grid,
                               const ComplexityBelief* t_dist = nullptr);

}  // namespace screening
