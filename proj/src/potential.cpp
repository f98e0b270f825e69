#include "spintf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spintf {

namespace {

double sgn_alpha(double alpha) { return alpha < 0.0 ? -1.0 : 1.0; }

double get(const std::map<std::string, double>& calib, const char* key) {
  auto it = calib.find(key);
  if (it == calib.end())
    throw Error(Errc::invalid_argument, std::string("missing calibration constant ") + key);
  return it->second;
}

/// Halton sequence in (0,1), deterministic quasi-random sampling.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

double h_tf(const SpinState& u, const ModelParams& p) {
  double rho = u.squaredNorm();
  double sg = sgn_alpha(p.alpha);
  double d = u[0] - sg * u[2];
  double d2 = u[0] * u[0] - u[2] * u[2];
  double spin = 2.0 * u[1] * u[1] * d * d + d2 * d2;
  return 0.5 * rho * rho + 0.5 * p.alpha * spin + p.q * (u[0] * u[0] + u[2] * u[2]);
}

PotentialW build_w(const ModelParams& p, const TFSolution& sol) {
  PotentialW w;
  w.regime = sol.regime;
  w.params = p;
  w.calib = sol.calib;
  w.well_a = sol.state_a;
  w.well_b = sol.state_b;
  w.has_b = sol.has_b;

  switch (sol.regime) {
    case Regime::ns_ms: {
      double A = get(sol.calib, "A");
      double beta1 = get(sol.calib, "beta1");
      double beta2 = get(sol.calib, "beta2");
      double q2 = get(sol.calib, "q2");
      w.lambda1 = 0.5 * beta1;
      w.lambda2 = 0.5 * beta2;
      w.offset = 0.5 * A * A;
      double s = std::sqrt(p.alpha + 1.0);
      double c1sq = (p.alpha + 1.0) - s;
      w.c = {A,
             s,
             (1.0 - p.alpha) / s,
             std::sqrt(c1sq),
             p.alpha / std::sqrt(c1sq),
             (2.0 * p.alpha + 4.0 - 2.0 * s) / c1sq,
             4.0 * p.alpha / (p.alpha + 1.0),
             4.0 * (p.q - q2)};
      break;
    }
    case Regime::pure_2c:
    case Regime::ns_2c: {
      double A = get(sol.calib, "A");
      double B = get(sol.calib, "B");
      double S = std::sqrt(A * A + p.alpha * B * B);
      double k1 = A / S, k2 = B / S;
      w.lambda1 = -(A + p.q);
      w.lambda2 = -p.alpha * B;
      w.offset = 0.5 * (A * A + p.alpha * B * B);
      w.c = {A,
             B,
             k1,
             k2,
             2.0 * (S - A - p.q),                    // u0^2 coefficient; q1 - q for PURE_2C
             p.alpha + 1.0 - k1 - p.alpha * k2,      // quadratic form in (|u1|,|u-1|)
             p.alpha + 1.0 - k1 + p.alpha * k2,
             0.0};
      break;
    }
    case Regime::ms_ms: {
      double A = get(sol.calib, "A");
      w.lambda1 = -(A * (1.0 + p.alpha) + p.q);
      w.lambda2 = 0.0;
      w.offset = 0.5 * (1.0 + p.alpha) * A * A;
      w.c = {A, 1.0 + p.alpha, -p.alpha, -2.0 * p.q, 0, 0, 0, 0};
      break;
    }
    case Regime::pure_3c: {
      double a = get(sol.calib, "a_mult");
      double b = get(sol.calib, "b");
      w.lambda1 = -(a + (1.0 + p.alpha) * p.n);
      w.lambda2 = -b;
      w.offset = 0.5 * ((1.0 + p.alpha) * p.n * p.n - a * a / p.alpha);
      w.c = {p.n, 1.0 + p.alpha, -p.alpha, a / p.alpha, p.q - b, p.q + b, 1.0 / p.q, 0};
      break;
    }
    default:
      throw Error(Errc::regime_mismatch,
                  "W calibration is defined for NS_MS, PURE_2C, NS_2C, MS_MS, PURE_3C");
  }

  double scale = std::max(1.0, p.n * p.n);
  if (std::abs(eval_w(w, w.well_a)) > 1e-12 * scale ||
      (w.has_b && std::abs(eval_w(w, w.well_b)) > 1e-12 * scale))
    throw Error(Errc::well_violation, "calibrated W does not vanish at the wells");
  return w;
}

double eval_w(const PotentialW& w, const SpinState& u) {
  const double v1 = std::abs(u[0]), v0 = std::abs(u[1]), vm = std::abs(u[2]);
  const auto& c = w.c;

  switch (w.regime) {
    case Regime::ns_ms: {
      // c = {A, s, (1-a)/s, c1, a/c1, cross, quartic, 4(q-q2)}
      double sq1 = c[1] * v1 * v1 + v0 * v0 + c[2] * vm * vm - c[0];
      double sq2 = c[3] * v1 - c[4] * vm;
      double two_w = sq1 * sq1 + 2.0 * v0 * v0 * sq2 * sq2 + c[5] * v0 * v0 * vm * vm +
                     c[6] * vm * vm * vm * vm + c[7] * vm * vm;
      return 0.5 * two_w;
    }
    case Regime::pure_2c:
    case Regime::ns_2c: {
      // c = {A, B, k1, k2, 2(S-A-q), f11, fmm, -}
      double sq1 = v1 * v1 + c[2] * v0 * v0 + vm * vm - c[0];
      double sq2 = v1 * v1 + c[3] * v0 * v0 - vm * vm - c[1];
      double quad = c[5] * v1 * v1 + c[6] * vm * vm - 2.0 * w.params.alpha * v1 * vm;
      double two_w = sq1 * sq1 + w.params.alpha * sq2 * sq2 + v0 * v0 * (c[4] + 2.0 * quad);
      return 0.5 * two_w;
    }
    case Regime::ms_ms: {
      // c = {A, 1+a, -a, -2q, ...}
      double sq1 = v1 * v1 + v0 * v0 + vm * vm - c[0];
      double sq2 = v0 * v0 - 2.0 * v1 * vm;
      double two_w = c[1] * sq1 * sq1 + c[2] * sq2 * sq2 + c[3] * v0 * v0;
      return 0.5 * two_w;
    }
    case Regime::pure_3c: {
      // c = {n, 1+a, -a, a_mult/alpha, q-b, q+b, 1/q, -}
      double sq1 = v1 * v1 + v0 * v0 + vm * vm - c[0];
      double sq2 = v0 * v0 - 2.0 * v1 * vm + c[3];
      double sq3 = c[4] * v1 - c[5] * vm;
      double two_w = c[1] * sq1 * sq1 + c[2] * sq2 * sq2 + c[6] * sq3 * sq3;
      return 0.5 * two_w;
    }
    default:
      throw Error(Errc::regime_mismatch, "uncalibrated regime");
  }
}

SpinState grad_w(const PotentialW& w, const SpinState& u) {
  const ModelParams& p = w.params;
  const double v1 = std::abs(u[0]), v0 = std::abs(u[1]), vm = std::abs(u[2]);
  const double rho = v1 * v1 + v0 * v0 + vm * vm;
  const double sg = sgn_alpha(p.alpha);
  const double diff = v1 - sg * vm;
  const double d2 = v1 * v1 - vm * vm;

  // d/dv of h_tf on the closed octant, chained through |.|, plus the
  // constraint-affine part.
  double g1 = 2.0 * rho * v1 + 2.0 * p.alpha * v0 * v0 * diff + 2.0 * p.alpha * v1 * d2 +
              2.0 * p.q * v1 + 2.0 * (w.lambda1 + w.lambda2) * v1;
  double g0 = 2.0 * rho * v0 + 2.0 * p.alpha * v0 * diff * diff + 2.0 * w.lambda1 * v0;
  double gm = 2.0 * rho * vm - 2.0 * p.alpha * sg * v0 * v0 * diff - 2.0 * p.alpha * vm * d2 +
              2.0 * p.q * vm + 2.0 * (w.lambda1 - w.lambda2) * vm;

  auto sgn = [](double x) { return x < 0.0 ? -1.0 : 1.0; };
  return SpinState(sgn(u[0]) * g1, sgn(u[1]) * g0, sgn(u[2]) * gm);
}

WellReport verify_wells(const PotentialW& w, const WellOptions& opt) {
  const ModelParams& p = w.params;
  const double sqn = std::sqrt(p.n);
  WellReport rep;

  double sep = w.has_b ? (w.well_a - w.well_b).norm() : 2.0 * sqn;
  rep.exclusion = opt.exclusion > 0.0 ? opt.exclusion
                                      : std::min(0.25 * sqn, 0.45 * sep);

  const double scale = std::max(1.0, p.n * p.n);
  rep.w_at_a = eval_w(w, w.well_a);
  rep.w_at_b = w.has_b ? eval_w(w, w.well_b) : 0.0;
  if (std::abs(rep.w_at_a) > 1e-12 * scale || std::abs(rep.w_at_b) > 1e-12 * scale)
    throw Error(Errc::well_violation, "W does not vanish at a well");

  double L = 1.5 * std::max({w.well_a.maxCoeff(),
                             w.has_b ? w.well_b.maxCoeff() : 0.0, sqn});
  rep.min_outside = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= opt.samples; ++i) {
    SpinState u(L * halton(i, 2), L * halton(i, 3), L * halton(i, 5));
    if ((u - w.well_a).norm() < rep.exclusion) continue;
    if (w.has_b && (u - w.well_b).norm() < rep.exclusion) continue;
    double val = eval_w(w, u);
    if (val < rep.min_outside) {
      rep.min_outside = val;
      rep.argmin_outside = u;
    }
  }
  if (!(rep.min_outside > 0.0))
    throw Error(Errc::well_violation, "W is not strictly positive away from the wells");

  // Quadratic well bounds: probe a shell of radius exclusion/4 around each
  // well along octant-admissible directions.
  auto shell_bounds = [&](const SpinState& well, double& lo_out, double& hi_out) {
    double r = 0.25 * rep.exclusion;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 1; i <= 512; ++i) {
      SpinState dir(halton(i, 2) - 0.5, halton(i, 3) - 0.5, halton(i, 5) - 0.5);
      if (dir.norm() < 1e-9) continue;
      dir.normalize();
      SpinState u = well + r * dir;
      if (u.minCoeff() < 0.0) continue;  // stay in the octant
      double ratio = eval_w(w, u) / (r * r);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    lo_out = lo;
    hi_out = hi;
  };
  shell_bounds(w.well_a, rep.quad_lower_a, rep.quad_upper_a);
  if (w.has_b) shell_bounds(w.well_b, rep.quad_lower_b, rep.quad_upper_b);
  if (!(rep.quad_lower_a > 0.0) || (w.has_b && !(rep.quad_lower_b > 0.0)))
    throw Error(Errc::well_violation, "no quadratic lower bound near a well");

  double R = opt.growth_radius_factor * sqn;
  rep.growth_min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 2048; ++i) {
    SpinState dir(halton(i, 2), halton(i, 3), halton(i, 5));
    if (dir.norm() < 1e-9) continue;
    dir.normalize();
    SpinState u = R * dir;
    rep.growth_min_ratio = std::min(rep.growth_min_ratio, eval_w(w, u) / (R * R));
  }
  if (!(rep.growth_min_ratio > 0.0))
    throw Error(Errc::well_violation, "no quadratic growth at large |u|");

  return rep;
}

}  // namespace spintf
