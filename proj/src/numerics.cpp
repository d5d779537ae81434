#include "screening/numerics.hpp"

#include <cmath>

namespace screening::num {

namespace {
constexpr double kInvE = 0.36787944117144232160;
}

double lambert_w0(double c) {
  if (!(c >= -kInvE))  // also rejects NaN
    throw std::domain_error("lambert_w0: argument below -1/e");
  if (c == 0.0) return 0.0;
  if (c == -kInvE) return -1.0;

  double w;
  if (c < -0.25) {
    // branch-point expansion in p = sqrt(2(1 + e*c))
    const double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * c));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else if (c < 0.3) {
    w = c * (1.0 + c * (-1.0 + c * 1.5));
  } else if (c < 3.0) {
    w = std::log1p(c) * 0.8;
  } else {
    const double l1 = std::log(c), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  // Halley refinement; globally convergent for these seeds
  for (int it = 0; it < 80; ++it) {
    const double ew = std::exp(w);
    const double r = w * ew - c;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * r / (2.0 * wp1);
    if (denom == 0.0) break;
    const double dw = r / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    return 0.5 * x * x *
           (1.0 + x * (1.0 / 3.0 + x * (1.0 / 12.0 + x * (1.0 / 60.0 + x * (1.0 / 360.0 + x / 2520.0)))));
  }
  return std::expm1(x) - x;
}

double exp_mean_defect(double x) {
  if (x == 0.0) return 0.0;
  if (x < 1e-4) return x / 2.0 - x * x / 6.0 + x * x * x / 24.0;
  return 1.0 + std::expm1(-x) / x;
}

double exp_tail_defect(double x) {
  if (x < 0.05) {
    // sum_{k>=2} (-1)^k x^k (k-1)/k!
    return x * x *
           (0.5 + x * (-1.0 / 3.0 + x * (1.0 / 8.0 + x * (-1.0 / 30.0 + x * (1.0 / 144.0 - x / 840.0)))));
  }
  return -(std::expm1(-x) + x * std::exp(-x));
}

double exp_tail_cutoff(double rate, double mass) {
  if (!(rate > 0.0) || !(mass > 0.0)) throw std::domain_error("exp_tail_cutoff: need rate, mass > 0");
  return -std::log(mass) / rate;
}

}  // namespace screening::num
