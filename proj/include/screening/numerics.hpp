#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace screening::num {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;
  int max_iter = 200;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct NoSignChangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Principal branch of w*exp(w) = c, defined on c >= -1/e.
double lambert_w0(double c);

// Cancellation-stable helpers for exponential expressions near 0.
double expm1_minus_x(double x);    // e^x - 1 - x
double exp_mean_defect(double x);  // 1 - (1 - e^{-x})/x, x >= 0; -> 0 as x -> 0
double exp_tail_defect(double x);  // 1 - (1 + x) e^{-x},  x >= 0; -> 0 as x -> 0

// Point beyond which an Exp(rate) tail holds less than `mass` probability.
double exp_tail_cutoff(double rate, double mass);

// Classic Brent: inverse-quadratic / secant steps with a bisection safeguard.
template <class F>
double find_root_bracketed(F&& f, Bracket br, Tolerance tol = {}) {
  double a = br.lo, b = br.hi;
  if (!(a < b)) throw std::invalid_argument("find_root_bracketed: need lo < hi");
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NoSignChangeError("find_root_bracketed: no sign change over bracket");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < tol.max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * (tol.abs + tol.rel * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw ConvergenceError("find_root_bracketed: iteration budget exhausted");
}

// First adjacent grid pair with a sign change (zero counts as a change).
template <class F>
Bracket find_bracket(F&& f, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("find_bracket: need >= 2 grid points");
  double x0 = grid[0];
  double f0 = f(x0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x1 = grid[i];
    const double f1 = f(x1);
    if ((f0 <= 0.0 && f1 >= 0.0) || (f0 >= 0.0 && f1 <= 0.0)) return {x0, x1};
    x0 = x1;
    f0 = f1;
  }
  throw NoCrossingError("find_bracket: constant sign on grid");
}

namespace detail {

// Gauss-Kronrod 7/15 on [a,b]; returns (estimate, |K15-G7|).
template <class F>
std::pair<double, double> gk15(F& f, double a, double b) {
  static constexpr double xk[7] = {
      0.991455371120812639206854697526329,  // Kronrod only
      0.949107912342758524526189684047851,  // Gauss
      0.864864423359769072789712788640926,
      0.741531185599394439863864773280788,
      0.586087235467691130294144838258730,
      0.405845151377397166906606412076961,
      0.207784955007898467600689403773245};
  static constexpr double wk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = wk[7] * fc;
  double resg = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * xk[i];
    double f1 = f(c - dx), f2 = f(c + dx);
    if (!std::isfinite(f1)) f1 = 0.0;
    if (!std::isfinite(f2)) f2 = 0.0;
    resk += wk[i] * (f1 + f2);
    if (i % 2 == 1) resg += wg[(i - 1) / 2] * (f1 + f2);
  }
  resk *= h;
  resg *= h;
  return {resk, std::abs(resk - resg)};
}

}  // namespace detail

// Globally adaptive quadrature on a finite interval: repeatedly bisect the
// segment with the largest K15-vs-G7 discrepancy.
template <class F>
double integrate(F&& f, double a, double b, Tolerance tol = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate: need a <= b");
  if (a == b) return 0.0;

  struct Seg {
    double a, b, val, err;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  auto& fn = f;
  auto [v0, e0] = detail::gk15(fn, a, b);
  std::priority_queue<Seg> segs;
  segs.push({a, b, v0, e0});
  double total = v0, toterr = e0;

  const int budget = 50 * std::max(1, tol.max_iter);
  for (int splits = 0; splits < budget; ++splits) {
    const double target = std::max(tol.abs, tol.rel * std::abs(total));
    if (toterr <= target) return total;
    Seg s = segs.top();
    segs.pop();
    const double m = 0.5 * (s.a + s.b);
    if (m <= s.a || m >= s.b) {  // interval at floating-point resolution
      toterr -= s.err;
      continue;
    }
    auto [vl, el] = detail::gk15(fn, s.a, m);
    auto [vr, er] = detail::gk15(fn, m, s.b);
    total += vl + vr - s.val;
    toterr += el + er - s.err;
    segs.push({s.a, m, vl, el});
    segs.push({m, s.b, vr, er});
  }
  if (toterr <= std::max(tol.abs, tol.rel * std::abs(total))) return total;
  throw ConvergenceError("integrate: refinement budget exhausted");
}

struct MaxResult {
  double argmax = 0.0;
  double max = 0.0;
};

// Best scanned point away from the argmax cell; lets callers spot near-ties
// between separated local maxima.
struct MaxDiag {
  bool has_runner = false;
  double runner_x = 0.0;
  double runner_val = 0.0;
};

// Coarse scan (kink-tolerant) followed by iterative zoom on the best cell.
// Endpoints are always evaluated; ties resolve to the smaller argument.
template <class F>
MaxResult maximize_1d(F&& f, double lo, double hi, Tolerance tol = {}, int scan_points = 512,
                      MaxDiag* diag = nullptr) {
  if (!(lo <= hi)) throw std::invalid_argument("maximize_1d: need lo <= hi");
  if (lo == hi) return {lo, f(lo)};

  const int n = std::max(2, scan_points);
  const double span = hi - lo;
  double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  std::vector<double> vals(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = (i == n) ? hi : lo + span * i / n;
    const double v = f(x);
    vals[static_cast<std::size_t>(i)] = v;
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  if (diag) {
    *diag = {};
    for (int i = 0; i <= n; ++i) {
      if (std::abs(i - best_i) <= 2) continue;
      const double v = vals[static_cast<std::size_t>(i)];
      if (!diag->has_runner || v > diag->runner_val) {
        diag->has_runner = true;
        diag->runner_val = v;
        diag->runner_x = (i == n) ? hi : lo + span * i / n;
      }
    }
  }

  double wlo = lo + span * std::max(0, best_i - 1) / n;
  double whi = (best_i + 1 >= n) ? hi : lo + span * (best_i + 1) / n;
  const double xtol = std::max(tol.abs, tol.rel * std::max(1.0, std::abs(best_x)));
  for (int round = 0; round < tol.max_iter && (whi - wlo) > xtol; ++round) {
    constexpr int m = 32;
    const double w = whi - wlo;
    double bx = wlo, bv = -std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int i = 0; i <= m; ++i) {
      const double x = (i == m) ? whi : wlo + w * i / m;
      const double v = f(x);
      if (v > bv) {
        bv = v;
        bx = x;
        bi = i;
      }
    }
    if (bv > best_v) {
      best_v = bv;
      best_x = bx;
    }
    const double nlo = wlo + w * std::max(0, bi - 1) / m;
    const double nhi = (bi + 1 >= m) ? whi : wlo + w * (bi + 1) / m;
    wlo = nlo;
    whi = nhi;
  }
  return {best_x, best_v};
}

}  // namespace screening::num
