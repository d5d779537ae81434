#include "screening/model.hpp"

#include <algorithm>
#include <cmath>

#include "screening/numerics.hpp"

namespace screening {

void validate(const Primitives& prim) {
  if (!(prim.V > 0.0)) throw std::domain_error("Primitives: V must be > 0");
  if (!(prim.gamma > 1.0)) throw std::domain_error("Primitives: gamma must be > 1");
  if (!(prim.lambda > 0.0)) throw std::domain_error("Primitives: lambda must be > 0");
}

void validate(const TestNoise& noise) {
  if (!(noise.eta_minus >= 0.0 && noise.eta_minus < 1.0))
    throw std::domain_error("TestNoise: eta_minus must lie in [0,1)");
  if (!(noise.eta_plus >= 0.0 && noise.eta_plus < 1.0))
    throw std::domain_error("TestNoise: eta_plus must lie in [0,1)");
}

PostingCost PostingCost::linear(double slope) {
  if (!(slope >= 0.0)) throw std::domain_error("PostingCost: slope must be >= 0");
  PostingCost k;
  k.kind_ = Kind::Linear;
  k.a_ = slope;
  return k;
}

PostingCost PostingCost::power(double coef, double exponent) {
  if (!(coef >= 0.0)) throw std::domain_error("PostingCost: coef must be >= 0");
  if (!(exponent >= 1.0)) throw std::domain_error("PostingCost: exponent must be >= 1");
  PostingCost k;
  k.kind_ = Kind::Power;
  k.a_ = coef;
  k.p_ = exponent;
  return k;
}

double PostingCost::operator()(double theta_star) const {
  switch (kind_) {
    case Kind::None:
      return 0.0;
    case Kind::Linear:
      return a_ * theta_star;
    case Kind::Power:
      return a_ * std::pow(theta_star, p_);
  }
  return 0.0;
}

ComplexityBelief ComplexityBelief::prior(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("ComplexityBelief: lambda must be > 0");
  ComplexityBelief b;
  b.kind_ = Kind::Prior;
  b.lambda_ = lambda;
  return b;
}

ComplexityBelief ComplexityBelief::point_mass(double t) {
  if (!(t >= 0.0)) throw std::domain_error("ComplexityBelief: point mass must be >= 0");
  ComplexityBelief b;
  b.kind_ = Kind::PointMass;
  b.a_ = t;
  return b;
}

ComplexityBelief ComplexityBelief::trunc_exp(double lambda, double a, double b) {
  if (!(lambda > 0.0)) throw std::domain_error("ComplexityBelief: lambda must be > 0");
  if (!(a >= 0.0 && b > a)) throw std::domain_error("ComplexityBelief: need 0 <= a < b");
  ComplexityBelief belief;
  belief.kind_ = Kind::TruncExp;
  belief.lambda_ = lambda;
  belief.a_ = a;
  belief.b_ = b;
  return belief;
}

double ComplexityBelief::density(double x) const {
  switch (kind_) {
    case Kind::Prior:
      return x < 0.0 ? 0.0 : lambda_ * std::exp(-lambda_ * x);
    case Kind::TruncExp: {
      if (x < a_ || x > b_) return 0.0;
      const double z = -std::expm1(-lambda_ * (b_ - a_));
      return lambda_ * std::exp(-lambda_ * (x - a_)) / z;
    }
    case Kind::PointMass:
      throw PointMassHasNoDensity("ComplexityBelief: point mass has no density");
  }
  return 0.0;
}

double ComplexityBelief::cdf(double x) const {
  switch (kind_) {
    case Kind::Prior:
      return x <= 0.0 ? 0.0 : -std::expm1(-lambda_ * x);
    case Kind::TruncExp:
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return std::expm1(-lambda_ * (x - a_)) / std::expm1(-lambda_ * (b_ - a_));
    case Kind::PointMass:
      return x >= a_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double belief_density(const ComplexityBelief& belief, double x) { return belief.density(x); }
double belief_cdf(const ComplexityBelief& belief, double x) { return belief.cdf(x); }

double BranchLaw::density(double theta) const {
  if (unit_point) return 0.0;  // no Lebesgue density; callers branch on unit_point
  if (theta < 0.0 || theta > 1.0) return 0.0;
  return theta < theta_star ? dens_lo : dens_hi;
}

double BranchLaw::cdf(double theta) const {
  if (unit_point) return theta >= 1.0 ? 1.0 : 0.0;
  const double t = std::clamp(theta, 0.0, 1.0);
  return dens_lo * std::min(t, theta_star) + dens_hi * std::max(0.0, t - theta_star);
}

double BranchLaw::mean() const {
  if (unit_point) return 1.0;
  const double ts = theta_star;
  return dens_lo * ts * ts / 2.0 + dens_hi * (1.0 - ts * ts) / 2.0;
}

BranchLaw branch_weight_and_density(const AbilityBranch& ab) {
  validate(ab.noise);
  const double ts = std::clamp(ab.theta_star, 0.0, 1.0);
  const double em = ab.noise.eta_minus, ep = ab.noise.eta_plus;

  double w, hi, lo;
  if (ab.branch == Branch::Pass) {
    w = (1.0 - em) * (1.0 - ts) + ep * ts;
    hi = 1.0 - em;
    lo = ep;
  } else {
    w = em * (1.0 - ts) + (1.0 - ep) * ts;
    hi = em;
    lo = 1.0 - ep;
  }
  if (w <= 0.0) throw EmptyBranchError("branch_weight_and_density: zero-probability branch");
  return {w, ts, lo / w, hi / w, false};
}

BranchLaw unit_point_law() { return {0.0, 1.0, 0.0, 0.0, true}; }

}  // namespace screening
