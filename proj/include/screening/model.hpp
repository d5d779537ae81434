#pragma once

#include <stdexcept>

namespace screening {

// Benchmark parameter triple: payoff V, cost exponent gamma (C(e) = e^gamma),
// exponential rate lambda of the complexity draw.
struct Primitives {
  double V = 1.0;
  double gamma = 2.0;
  double lambda = 1.0;
};

// Throws std::domain_error unless V > 0, gamma > 1, lambda > 0.
void validate(const Primitives& prim);

// Success requires theta*e >= T (Multiplicative) or theta+e >= T (Additive).
enum class Technology { Multiplicative, Additive };

struct TestNoise {
  double eta_minus = 0.0;  // false-negative rate, in [0,1)
  double eta_plus = 0.0;   // false-positive rate, in [0,1)
  bool silent() const { return eta_minus == 0.0 && eta_plus == 0.0; }
};

void validate(const TestNoise& noise);

// Cost k(theta*) of posting a threshold: zero at 0, continuous, nondecreasing,
// convex.
class PostingCost {
 public:
  enum class Kind { None, Linear, Power };

  static PostingCost none() { return {}; }
  static PostingCost linear(double slope);
  static PostingCost power(double coef, double exponent);

  double operator()(double theta_star) const;
  Kind kind() const { return kind_; }
  double slope() const { return a_; }
  double coef() const { return a_; }
  double exponent() const { return p_; }

 private:
  Kind kind_ = Kind::None;
  double a_ = 0.0;
  double p_ = 1.0;
};

struct PointMassHasNoDensity : std::logic_error {
  using std::logic_error::logic_error;
};
struct EmptyBranchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The agent's effort-stage distribution over complexity T: the exponential
// prior, a point mass (separating conjecture), or an exponential truncated to a
// pooled block.
class ComplexityBelief {
 public:
  enum class Kind { Prior, PointMass, TruncExp };

  static ComplexityBelief prior(double lambda);
  static ComplexityBelief point_mass(double t);
  static ComplexityBelief trunc_exp(double lambda, double a, double b);

  Kind kind() const { return kind_; }
  bool has_density() const { return kind_ != Kind::PointMass; }
  double rate() const { return lambda_; }
  double point() const { return a_; }  // PointMass location
  double lower() const { return a_; }
  double upper() const { return b_; }

  double density(double x) const;  // throws PointMassHasNoDensity
  double cdf(double x) const;

 private:
  ComplexityBelief() = default;
  Kind kind_ = Kind::Prior;
  double lambda_ = 1.0;
  double a_ = 0.0;
  double b_ = 0.0;
};

double belief_density(const ComplexityBelief& belief, double x);
double belief_cdf(const ComplexityBelief& belief, double x);

enum class Branch { Pass, Fail };

struct AbilityBranch {
  Branch branch = Branch::Pass;
  double theta_star = 0.0;
  TestNoise noise{};
};

// Bayes posterior of ability given the test outcome, under Unif[0,1] ability.
// Piecewise constant with a knot at theta_star; `unit_point` marks the
// zero-width pass truncation limit at theta* = 1 (all mass at theta = 1).
struct BranchLaw {
  double weight = 0.0;  // ex-ante probability of the outcome
  double theta_star = 0.0;
  double dens_lo = 0.0;  // density on [0, theta_star)
  double dens_hi = 0.0;  // density on [theta_star, 1]
  bool unit_point = false;

  double density(double theta) const;
  double cdf(double theta) const;
  double mean() const;
};

// Outcome probability and ability posterior for a (possibly noisy) branch.
// Pass weight = (1-eta_minus)(1-theta*) + eta_plus*theta*; throws
// EmptyBranchError when the weight is zero. theta* is clamped to [0,1].
BranchLaw branch_weight_and_density(const AbilityBranch& ab);

// Zero-width pass truncation limit at theta* = 1.
BranchLaw unit_point_law();

}  // namespace screening
