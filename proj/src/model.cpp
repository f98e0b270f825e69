#include "spintf/model.hpp"

#include <cmath>

namespace spintf {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::ns_ms: return "NS_MS";
    case Regime::ns_2c: return "NS_2C";
    case Regime::pure_2c: return "PURE_2C";
    case Regime::ms_ms: return "MS_MS";
    case Regime::pure_3c: return "PURE_3C";
    case Regime::ferro_q0_degenerate: return "FERRO_Q0_DEGENERATE";
    case Regime::alpha0_q0: return "ALPHA0_Q0";
    case Regime::alpha0_qpos: return "ALPHA0_QPOS";
    case Regime::alpha0_qneg: return "ALPHA0_QNEG";
  }
  return "UNKNOWN";
}

Regime regime_from_string(std::string_view s) {
  for (Regime r : {Regime::ns_ms, Regime::ns_2c, Regime::pure_2c, Regime::ms_ms,
                   Regime::pure_3c, Regime::ferro_q0_degenerate, Regime::alpha0_q0,
                   Regime::alpha0_qpos, Regime::alpha0_qneg}) {
    if (s == to_string(r)) return r;
  }
  throw Error(Errc::invalid_argument, "unknown regime name '" + std::string(s) + "'");
}

ModelParams normalize_params(double c_n, double c_s, double q_raw, double N, double M,
                             double volume, int dim) {
  if (!(c_n > 0.0) || std::abs(c_s) > c_n)
    throw Error(Errc::invalid_coupling, "require c_n > 0 and |c_s| <= c_n");
  if (!(N > 0.0)) throw Error(Errc::non_positive_mass, "total mass N must be positive");
  if (std::abs(M) > N)
    throw Error(Errc::magnetization_exceeds_mass, "|M| must not exceed N");
  if (!(volume > 0.0)) throw Error(Errc::invalid_argument, "domain volume must be positive");
  if (dim != 1 && dim != 2) throw Error(Errc::invalid_argument, "dim must be 1 or 2");

  ModelParams p;
  p.alpha = c_s / c_n;
  p.q = q_raw / c_n;
  p.n = N / volume;
  p.m = M / volume;
  p.omega_volume = volume;
  p.dim = dim;
  return p;
}

std::pair<ModelParams, bool> reduce_symmetry(const ModelParams& p) {
  if (p.m >= 0.0) return {p, false};
  ModelParams q = p;
  q.m = -p.m;
  return {q, true};
}

TFSolution swap_pm(const TFSolution& sol) {
  TFSolution out = sol;
  out.state_a = swap_pm(sol.state_a);
  out.state_b = swap_pm(sol.state_b);
  return out;
}

double mass_residual(const TFSolution& sol, const ModelParams& p) {
  double mix = sol.r * mass_density(sol.state_a) +
               (1.0 - sol.r) * (sol.has_b ? mass_density(sol.state_b) : 0.0);
  return mix - p.n;
}

double magnetization_residual(const TFSolution& sol, const ModelParams& p) {
  double mix = sol.r * magnetization_density(sol.state_a) +
               (1.0 - sol.r) * (sol.has_b ? magnetization_density(sol.state_b) : 0.0);
  return mix - p.m;
}

}  // namespace spintf
