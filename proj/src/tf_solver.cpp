#include "spintf/tf_solver.hpp"

#include <algorithm>
#include <cmath>

#include "spintf/potential.hpp"

namespace spintf {

namespace {

void require_reduced(const ModelParams& p) {
  if (!(p.n > 0.0)) throw Error(Errc::non_positive_mass, "n must be positive");
  if (p.m < 0.0)
    throw Error(Errc::invalid_argument, "solvers expect reduced parameters (m >= 0)");
  if (p.m > p.n) throw Error(Errc::magnetization_exceeds_mass, "m > n");
}

double finish_energy(TFSolution& sol, const ModelParams& p) {
  sol.e0 = tf_energy(sol, p);
  return sol.e0;
}

}  // namespace

double critical_q1(const ModelParams& p) {
  if (!(p.alpha > 0.0)) throw Error(Errc::wrong_sign, "q1 is defined for alpha > 0");
  require_reduced(p);
  // Rationalized form of -n + sqrt(n^2 + alpha m^2); exact at m = 0.
  double am2 = p.alpha * p.m * p.m;
  return am2 / (p.n + std::sqrt(p.n * p.n + am2));
}

double critical_q2(const ModelParams& p) {
  if (!(p.alpha > 0.0)) throw Error(Errc::wrong_sign, "q2 is defined for alpha > 0");
  require_reduced(p);
  double s = std::sqrt(p.alpha + 1.0);
  return (1.0 - 1.0 / s) * (p.n + (s - 1.0) * p.m);
}

Regime classify(const ModelParams& p) {
  require_reduced(p);
  if (p.alpha > 0.0) {
    double q1 = critical_q1(p);
    double q2 = critical_q2(p);
    if (p.q > q2) return Regime::ns_ms;
    if (p.q < q1) return Regime::pure_2c;
    return Regime::ns_2c;
  }
  if (p.alpha < 0.0) {
    if (p.q < 0.0) return Regime::ms_ms;
    if (p.q > 0.0) return Regime::pure_3c;
    return Regime::ferro_q0_degenerate;
  }
  if (p.q > 0.0) return Regime::alpha0_qpos;
  if (p.q < 0.0) return Regime::alpha0_qneg;
  return Regime::alpha0_q0;
}

double solve_cubic_bracketed(const CubicProblem& c) {
  auto f = [&](double x) { return ((c.c3 * x + c.c2) * x + c.c1) * x + c.c0; };
  auto df = [&](double x) { return (3.0 * c.c3 * x + 2.0 * c.c2) * x + c.c1; };

  double lo = c.lo, hi = c.hi;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw Error(Errc::root_not_found, "cubic bracket carries no sign change");

  while (hi - lo > c.tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm * flo < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double x = 0.5 * (lo + hi);
  double d = df(x);
  if (d != 0.0) {
    double step = f(x) / d;
    double polished = x - step;
    if (polished >= c.lo && polished <= c.hi) x = polished;
  }
  return x;
}

TFSolution solve_ns_ms(const ModelParams& p) {
  require_reduced(p);
  if (!(p.alpha > 0.0 && p.alpha <= 1.0))
    throw Error(Errc::regime_mismatch, "NS+MS requires alpha in (0,1]");
  if (!(p.q > critical_q2(p)))
    throw Error(Errc::regime_mismatch, "NS+MS requires q > q2");

  double s = std::sqrt(p.alpha + 1.0);
  double A = p.n + (s - 1.0) * p.m;
  TFSolution sol;
  sol.regime = Regime::ns_ms;
  sol.state_a = SpinState(std::sqrt(A / s), 0.0, 0.0);
  sol.state_b = SpinState(0.0, std::sqrt(A), 0.0);
  sol.has_b = true;
  sol.r = s * p.m / A;
  sol.calib = {{"A", A},
               {"beta1", -2.0 * A},
               {"beta2", 2.0 * A - 2.0 * p.q - 2.0 * A * s},
               {"q2", critical_q2(p)}};
  finish_energy(sol, p);
  return sol;
}

TFSolution solve_2c(const ModelParams& p) {
  require_reduced(p);
  if (!(p.alpha > 0.0 && p.alpha <= 1.0))
    throw Error(Errc::regime_mismatch, "2C requires alpha in (0,1]");
  if (!(p.q < critical_q1(p)))
    throw Error(Errc::regime_mismatch, "2C requires q < q1");

  double A = p.n, B = p.m;
  double S = std::sqrt(A * A + p.alpha * B * B);
  TFSolution sol;
  sol.regime = Regime::pure_2c;
  sol.state_a = SpinState(std::sqrt(0.5 * (p.n + p.m)), 0.0, std::sqrt(0.5 * (p.n - p.m)));
  sol.has_b = false;
  sol.r = 1.0;
  sol.calib = {{"A", A}, {"B", B}, {"k1", A / S}, {"k2", B / S}, {"q1", critical_q1(p)}};
  finish_energy(sol, p);
  return sol;
}

TFSolution solve_ns_2c(const ModelParams& p) {
  require_reduced(p);
  if (!(p.alpha > 0.0 && p.alpha <= 1.0))
    throw Error(Errc::regime_mismatch, "NS+2C requires alpha in (0,1]");
  double q1 = critical_q1(p), q2 = critical_q2(p);
  if (p.q < q1 || p.q > q2)
    throw Error(Errc::regime_mismatch, "NS+2C requires q1 <= q <= q2");

  TFSolution sol;
  sol.regime = Regime::ns_2c;

  if (p.m == 0.0) {
    // No magnetization: the NS state fills the whole domain. The 2C well of
    // the calibrated potential still exists, with A = n - q, B from the
    // u_0^2 cancellation.
    double A = p.n - p.q;
    double B = std::sqrt((2.0 * p.n - p.q) * p.q / p.alpha);
    sol.state_a =
        SpinState(std::sqrt(0.5 * (A + B)), 0.0, std::sqrt(std::max(0.0, 0.5 * (A - B))));
    sol.state_b = SpinState(0.0, std::sqrt(p.n), 0.0);
    sol.has_b = true;
    sol.r = 0.0;
    sol.calib = {{"A", A}, {"B", B}, {"r2", 0.0}};
    finish_energy(sol, p);
    return sol;
  }

  // Dimensionless volume-fraction equation: bisect qbar = Q1(r) on (r2, 1),
  // where Q1 is strictly decreasing, then polish on the cubic itself.
  double qbar = p.q / p.n;
  double eta = p.alpha * p.m * p.m / (p.n * p.n);
  auto Q1 = [eta](double r) {
    // eta / (r^2 (1 + sqrt(1 + eta (2r-1)/r^2))): smooth through r = 1/2.
    double t = 1.0 + eta * (2.0 * r - 1.0) / (r * r);
    return eta / (r * r * (1.0 + std::sqrt(t)));
  };
  double s = std::sqrt(1.0 + p.alpha);
  double r2 = s / (s - 1.0 + p.n / p.m);

  double lo = r2, hi = 1.0;
  double flo = Q1(lo) - qbar, fhi = Q1(hi) - qbar;
  double r;
  if (flo <= 0.0) {
    r = lo;
  } else if (fhi >= 0.0) {
    r = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = Q1(mid) - qbar;
      if (fm > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    r = 0.5 * (lo + hi);
    // One Newton step on 2 qb^2 r^3 + (2 qb - qb^2) r^2 - eta.
    double c3 = 2.0 * qbar * qbar, c2 = 2.0 * qbar - qbar * qbar;
    double fr = (c3 * r + c2) * r * r - eta;
    double dfr = 3.0 * c3 * r * r + 2.0 * c2 * r;
    if (dfr != 0.0) {
      double polished = r - fr / dfr;
      if (polished > r2 && polished <= 1.0) r = polished;
    }
    double resid = (c3 * r + c2) * r * r - eta;
    if (std::abs(resid) > 1e-10)
      throw Error(Errc::root_not_found, "volume-fraction cubic residual too large");
  }

  double A = p.n + (r - 1.0) * p.q;
  double B = p.m / r;
  sol.state_a = SpinState(std::sqrt(0.5 * (A + B)), 0.0, std::sqrt(std::max(0.0, 0.5 * (A - B))));
  sol.state_b = SpinState(0.0, std::pow(A * A + p.alpha * B * B, 0.25), 0.0);
  sol.has_b = true;
  sol.r = r;
  sol.calib = {{"A", A}, {"B", B}, {"r2", r2}};
  finish_energy(sol, p);
  return sol;
}

TFSolution solve_ms_ms(const ModelParams& p) {
  require_reduced(p);
  if (!(p.alpha > -1.0 && p.alpha < 0.0))
    throw Error(Errc::regime_mismatch, "MS+MS requires alpha in (-1,0)");
  if (!(p.q < 0.0)) throw Error(Errc::regime_mismatch, "MS+MS requires q < 0");

  TFSolution sol;
  sol.regime = Regime::ms_ms;
  sol.state_a = SpinState(std::sqrt(p.n), 0.0, 0.0);
  sol.state_b = SpinState(0.0, 0.0, std::sqrt(p.n));
  sol.has_b = true;
  sol.r = 0.5 * (1.0 + p.m / p.n);
  sol.calib = {{"A", p.n}};
  finish_energy(sol, p);
  return sol;
}

TFSolution solve_3c(const ModelParams& p) {
  require_reduced(p);
  if (!(p.alpha > -1.0 && p.alpha < 0.0))
    throw Error(Errc::regime_mismatch, "3C requires alpha in (-1,0)");
  if (!(p.q > 0.0)) throw Error(Errc::regime_mismatch, "3C requires q > 0");

  const double q = p.q, n = p.n, m = p.m, alpha = p.alpha;
  const double disc = q * q + 2.0 * alpha * q * n;
  const double lo = std::sqrt(std::max(0.0, disc));

  double b;
  if (m == 0.0) {
    // g(b) = b (b^2 - disc): the admissible root sits at the bracket's lower
    // endpoint (0 when disc < 0).
    b = lo;
  } else if (m == n) {
    b = q;  // saturated: g(q) = 2 alpha q (m - n) = 0
  } else {
    CubicProblem cubic;
    cubic.c3 = 1.0;
    cubic.c1 = -disc;
    cubic.c0 = 2.0 * alpha * q * q * m;
    cubic.lo = lo;
    cubic.hi = q;
    b = solve_cubic_bracketed(cubic);
  }

  const double a_mult = 0.5 * q - 0.5 * b * b / q;
  const double amp2 = n + a_mult / alpha;  // (|u1| + |u-1|)^2
  const double tol = 1e-12 * std::max(1.0, n);
  if (amp2 < tol && m == 0.0)
    throw Error(Errc::degenerate_regime,
                "3C formulas lose the +-1 components (m = 0, q >= -2 alpha n); "
                "the minimizer is the nematic state, outside this theorem's form");
  if (amp2 < -tol)
    throw Error(Errc::degenerate_regime, "negative squared amplitude in 3C state");

  const double amp = std::sqrt(std::max(0.0, amp2));
  const double u1 = (q + b) / (2.0 * q) * amp;
  const double um1 = (q - b) / (2.0 * q) * amp;
  const double u0sq = (q * q - b * b) / (2.0 * q * q) * n -
                      (q * q + b * b) / (2.0 * q * q) * (a_mult / alpha);
  if (u0sq < -tol)
    throw Error(Errc::degenerate_regime, "negative u0^2 in 3C state");
  const double u0 = std::sqrt(std::max(0.0, u0sq));

  TFSolution sol;
  sol.regime = Regime::pure_3c;
  sol.state_a = SpinState(u1, u0, um1);
  sol.has_b = false;
  sol.r = 1.0;
  sol.calib = {{"b", b}, {"a_mult", a_mult}};

  if (std::abs(mass_density(sol.state_a) - n) > 1e-8 * std::max(1.0, n))
    throw Error(Errc::degenerate_regime, "3C state mass deviates from n");
  if (std::abs(magnetization_density(sol.state_a) - m) > 1e-8 * std::max(1.0, n))
    throw Error(Errc::degenerate_regime, "3C state magnetization deviates from m");

  finish_energy(sol, p);
  return sol;
}

TFSolution solve_alpha_zero(const ModelParams& p) {
  require_reduced(p);
  if (p.alpha != 0.0) throw Error(Errc::regime_mismatch, "requires alpha = 0");

  TFSolution sol;
  sol.has_b = false;
  sol.r = 1.0;
  sol.degenerate_family = true;
  if (p.q > 0.0) {
    sol.regime = Regime::alpha0_qpos;
    sol.state_a = SpinState(std::sqrt(p.m), std::sqrt(p.n - p.m), 0.0);
    sol.family_note = "any (u1,u0,0) with u1^2+u0^2 = n and mean u1^2 = m";
  } else if (p.q < 0.0) {
    sol.regime = Regime::alpha0_qneg;
    sol.state_a =
        SpinState(std::sqrt(0.5 * (p.n + p.m)), 0.0, std::sqrt(0.5 * (p.n - p.m)));
    sol.family_note = "any (u1,0,u-1) with u1^2+u-1^2 = n and mean u1^2-u-1^2 = m";
  } else {
    sol.regime = Regime::alpha0_q0;
    sol.state_a =
        SpinState(std::sqrt(0.5 * (p.n + p.m)), 0.0, std::sqrt(0.5 * (p.n - p.m)));
    sol.family_note = "any field of density n with mean magnetization m";
  }
  finish_energy(sol, p);
  return sol;
}

TFSolution solve(const ModelParams& p) {
  switch (classify(p)) {
    case Regime::ns_ms: return solve_ns_ms(p);
    case Regime::ns_2c: return solve_ns_2c(p);
    case Regime::pure_2c: return solve_2c(p);
    case Regime::ms_ms: return solve_ms_ms(p);
    case Regime::pure_3c: return solve_3c(p);
    case Regime::ferro_q0_degenerate: {
      // Continuum of minimizers; report the spatially constant representative.
      TFSolution sol;
      sol.regime = Regime::ferro_q0_degenerate;
      double sn = std::sqrt(p.n);
      double u1 = 0.5 * (p.n + p.m) / sn;
      double um1 = 0.5 * (p.n - p.m) / sn;
      sol.state_a = SpinState(u1, std::sqrt(2.0 * u1 * um1), um1);
      sol.has_b = false;
      sol.r = 1.0;
      sol.degenerate_family = true;
      sol.family_note =
          "any |u1|+|u-1| = sqrt(n), u0^2 = 2 u1 u-1 with mean magnetization m";
      finish_energy(sol, p);
      return sol;
    }
    default: return solve_alpha_zero(p);
  }
}

double tf_energy(const TFSolution& sol, const ModelParams& p) {
  double density = sol.r * h_tf(sol.state_a, p);
  if (sol.has_b) density += (1.0 - sol.r) * h_tf(sol.state_b, p);
  return p.omega_volume * density;
}

}  // namespace spintf
