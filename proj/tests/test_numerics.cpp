#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "screening/numerics.hpp"

using namespace screening::num;

TEST_CASE("lambert_w0 pins the exact anchor points") {
  CHECK(std::abs(lambert_w0(0.0)) <= 1e-12);
  CHECK(std::abs(lambert_w0(std::numbers::e) - 1.0) <= 1e-12);
  // bisection reference for w*e^w = 0.5
  CHECK(lambert_w0(0.5) == doctest::Approx(0.351733711249196).epsilon(1e-9));
}

TEST_CASE("lambert_w0 satisfies its defining identity across fourteen decades") {
  for (int i = 0; i < 200; ++i) {
    const double c = std::pow(10.0, -8.0 + 16.0 * i / 199.0);
    const double w = lambert_w0(c);
    CHECK(std::abs(w * std::exp(w) - c) <= 1e-10 * std::max(1.0, c));
    CHECK(w >= 0.0);
  }
}

TEST_CASE("lambert_w0 rejects arguments left of the branch point") {
  CHECK_THROWS_AS(lambert_w0(-0.5), std::domain_error);
  CHECK_THROWS_AS(lambert_w0(-1.0), std::domain_error);
}

TEST_CASE("expm1_minus_x is accurate where naive evaluation cancels") {
  CHECK(expm1_minus_x(1.0) == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-14));
  CHECK(expm1_minus_x(-0.7) == doctest::Approx(std::expm1(-0.7) + 0.7).epsilon(1e-13));
  const double x = 1e-8;
  // leading term x^2/2, next correction relative size x/3
  CHECK(expm1_minus_x(x) == doctest::Approx(0.5 * x * x).epsilon(1e-8));
  CHECK(expm1_minus_x(0.0) == 0.0);
}

TEST_CASE("exp_mean_defect matches direct evaluation and its small-x limit") {
  CHECK(exp_mean_defect(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(exp_mean_defect(3.0) ==
        doctest::Approx(1.0 - (1.0 - std::exp(-3.0)) / 3.0).epsilon(1e-14));
  const double x = 1e-9;
  CHECK(exp_mean_defect(x) == doctest::Approx(0.5 * x).epsilon(1e-6));
  CHECK(exp_mean_defect(0.0) == 0.0);
  // monotone increasing toward 1
  double prev = 0.0;
  for (double t = 0.25; t <= 64.0; t *= 2.0) {
    const double v = exp_mean_defect(t);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
}

TEST_CASE("exp_tail_defect matches its antiderivative identity") {
  // integral of t e^{-t} over [0,x] equals 1 - (1+x)e^{-x}
  CHECK(exp_tail_defect(1.0) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-14));
  const double x = 1e-7;
  CHECK(exp_tail_defect(x) == doctest::Approx(0.5 * x * x).epsilon(1e-6));
  CHECK(exp_tail_defect(0.0) == 0.0);
}

TEST_CASE("exp_tail_cutoff caps the residual exponential mass") {
  for (double rate : {0.25, 1.0, 7.0}) {
    for (double mass : {1e-6, 1e-10, 1e-14}) {
      const double cut = exp_tail_cutoff(rate, mass);
      CHECK(std::exp(-rate * cut) <= mass * (1.0 + 1e-11));
      CHECK(std::exp(-rate * cut * 0.9) > mass);
    }
  }
}

TEST_CASE("find_root_bracketed solves the calibration roots") {
  auto linear = [](double x) { return x - 1.0; };
  CHECK(find_root_bracketed(linear, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));

  auto exp2 = [](double x) { return std::exp(x) - 2.0; };
  CHECK(find_root_bracketed(exp2, {0.0, 1.0}) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-10));

  auto we = [](double x) { return x * std::exp(x) - 0.5; };
  const double r = find_root_bracketed(we, {0.0, 1.0});
  CHECK(std::abs(r - lambert_w0(0.5)) <= 1e-8);
}

TEST_CASE("find_root_bracketed stays inside the bracket and reports misuse") {
  auto f = [](double x) { return std::cos(3.0 * x) - 0.2 * x; };
  const double r = find_root_bracketed(f, {0.0, 1.0});
  CHECK(r >= 0.0);
  CHECK(r <= 1.0);
  CHECK(std::abs(f(r)) <= 1e-8);

  auto pos = [](double) { return 1.0; };
  CHECK_THROWS_AS(find_root_bracketed(pos, {0.0, 1.0}), NoSignChangeError);
  CHECK_THROWS_AS(find_root_bracketed(f, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(find_root_bracketed(f, {0.0, 1.0}, {1e-10, 1e-10, 0}), ConvergenceError);

  // an endpoint that is already a zero is returned as-is
  auto ident = [](double x) { return x; };
  CHECK(find_root_bracketed(ident, {0.0, 1.0}) == 0.0);
}

TEST_CASE("find_bracket returns the first sign-changing cell") {
  auto f = [](double x) { return x - 0.5; };
  const std::vector<double> grid{0.0, 1.0};
  const Bracket br = find_bracket(f, grid);
  CHECK(br.lo == 0.0);
  CHECK(br.hi == 1.0);

  auto wave = [](double x) { return std::sin(x); };
  const std::vector<double> wide{1.0, 2.0, 3.0, 4.0, 7.0};
  const Bracket first = find_bracket(wave, wide);
  CHECK(first.lo == 3.0);  // pi sits in (3,4); (6.28..) in (4,7) must not win
  CHECK(first.hi == 4.0);

  auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(find_bracket(one, grid), NoCrossingError);
  const std::vector<double> single{1.0};
  CHECK_THROWS_AS(find_bracket(f, single), std::invalid_argument);
}

TEST_CASE("integrate reproduces the calibration antiderivatives") {
  Tolerance tol{1e-12, 1e-12, 200};
  auto id = [](double x) { return x; };
  CHECK(integrate(id, 0.0, 1.0, tol) == doctest::Approx(0.5).epsilon(1e-11));

  auto sq = [](double x) { return x * x; };
  CHECK(integrate(sq, 0.0, 2.0, tol) == doctest::Approx(8.0 / 3.0).epsilon(1e-11));

  auto s = [](double x) { return std::sin(x); };
  CHECK(integrate(s, 0.0, std::numbers::pi, tol) == doctest::Approx(2.0).epsilon(1e-11));

  auto texp = [](double t) { return t * std::exp(-t); };
  CHECK(integrate(texp, 0.0, 1.0, tol) ==
        doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-11));

  // exponential density over its effective support integrates to one
  const double lam = 2.0;
  auto dens = [lam](double x) { return lam * std::exp(-lam * x); };
  CHECK(integrate(dens, 0.0, exp_tail_cutoff(lam, 1e-14), tol) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // kinked integrand
  auto vee = [](double x) { return std::abs(x - 0.3); };
  CHECK(integrate(vee, 0.0, 1.0, tol) == doctest::Approx(0.29).epsilon(1e-10));

  CHECK(integrate(id, 0.7, 0.7, tol) == 0.0);
  CHECK_THROWS_AS(integrate(id, 1.0, 0.0, tol), std::invalid_argument);
}

TEST_CASE("maximize_1d finds smooth, kinked, and corner maxima") {
  auto bump = [](double x) { return -(x - 0.3) * (x - 0.3); };
  auto r = maximize_1d(bump, 0.0, 1.0);
  CHECK(std::abs(r.argmax - 0.3) <= 1e-8);
  CHECK(std::abs(r.max) <= 1e-15);

  auto tent = [](double x) { return std::min(x, 1.0 - x); };
  r = maximize_1d(tent, 0.0, 1.0);
  CHECK(std::abs(r.argmax - 0.5) <= 1e-8);
  CHECK(r.max == doctest::Approx(0.5).epsilon(1e-10));

  // agent-style objective: argmax solves e^{-e} = 2e
  auto gain = [](double e) { return (1.0 - std::exp(-e)) - e * e; };
  r = maximize_1d(gain, 0.0, 5.0);
  CHECK(std::abs(r.argmax - lambert_w0(0.5)) <= 1e-6);

  auto rising = [](double x) { return x; };
  r = maximize_1d(rising, 0.0, 1.0);
  CHECK(r.argmax == 1.0);
  auto falling = [](double x) { return -x; };
  r = maximize_1d(falling, 0.0, 1.0);
  CHECK(r.argmax == 0.0);

  // constant function: ties resolve to the smaller argument
  auto flat = [](double) { return 3.0; };
  r = maximize_1d(flat, 0.2, 0.9);
  CHECK(r.argmax == 0.2);

  CHECK_THROWS_AS(maximize_1d(flat, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("maximize_1d recovers concave-quadratic vertices within tolerance") {
  const double verts[] = {0.037, 0.25, 0.5001, 0.77, 0.993};
  for (double v : verts) {
    auto q = [v](double x) { return 1.0 - 4.0 * (x - v) * (x - v); };
    const auto r = maximize_1d(q, 0.0, 1.0, {1e-10, 1e-10, 200});
    CHECK(std::abs(r.argmax - v) <= 1e-7);
  }
}

TEST_CASE("maximize_1d reports a remote runner-up through the diagnostic") {
  // twin peaks of equal height well apart
  auto twin = [](double x) {
    const double a = -(x - 0.2) * (x - 0.2);
    const double b = -(x - 0.8) * (x - 0.8);
    return std::max(a, b);
  };
  MaxDiag diag;
  const auto r = maximize_1d(twin, 0.0, 1.0, {}, 512, &diag);
  CHECK(diag.has_runner);
  CHECK(std::abs(r.max - diag.runner_val) <= 1e-5);
  CHECK(std::abs(r.argmax - diag.runner_x) > 0.25);
}
