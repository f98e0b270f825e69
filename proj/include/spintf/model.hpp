#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "spintf/errors.hpp"

namespace spintf {

/// Spin state (u1, u0, u-1): square-root densities, components >= 0.
using SpinState = Eigen::Vector3d;

inline double mass_density(const SpinState& u) { return u.squaredNorm(); }
inline double magnetization_density(const SpinState& u) { return u[0] * u[0] - u[2] * u[2]; }

/// Exchange the +1 and -1 components (flips the sign of the magnetization).
inline SpinState swap_pm(const SpinState& u) { return SpinState(u[2], u[1], u[0]); }

enum class Regime {
  ns_ms,
  ns_2c,
  pure_2c,
  ms_ms,
  pure_3c,
  ferro_q0_degenerate,
  alpha0_q0,
  alpha0_qpos,
  alpha0_qneg,
};

const char* to_string(Regime r);
Regime regime_from_string(std::string_view s);

/// Normalized model parameters: everything is measured in units of the
/// spin-independent coupling and per unit volume.
struct ModelParams {
  double alpha = 0.0;         // c_s / c_n, in [-1, 1]
  double q = 0.0;             // quadratic Zeeman energy / c_n
  double n = 1.0;             // mass per unit volume, > 0
  double m = 0.0;             // magnetization per unit volume, |m| <= n
  double omega_volume = 1.0;  // |Omega|, > 0
  int dim = 1;                // spatial dimension, 1 or 2
};

/// Build normalized parameters from raw couplings and totals.
ModelParams normalize_params(double c_n, double c_s, double q_raw, double N, double M,
                             double volume, int dim = 1);

/// Map to the half-plane m >= 0. Returns the reduced parameters and whether
/// the sign of m was flipped; flipped solutions must be swapped back with
/// swap_pm before reporting.
std::pair<ModelParams, bool> reduce_symmetry(const ModelParams& p);

/// Thomas-Fermi ground state: one or two constant states plus the volume
/// fraction r = |U|/|Omega| of the region where state_a lives.
struct TFSolution {
  Regime regime = Regime::pure_2c;
  SpinState state_a = SpinState::Zero();
  SpinState state_b = SpinState::Zero();
  bool has_b = false;
  double r = 1.0;
  double e0 = 0.0;
  std::map<std::string, double> calib;
  bool degenerate_family = false;  // minimizer is a continuum; states are representatives
  std::string family_note;
};

/// Apply the +1/-1 component exchange to a whole solution (undoes reduce_symmetry).
TFSolution swap_pm(const TFSolution& sol);

/// Constraint residuals of a piecewise-constant solution against (n, m).
double mass_residual(const TFSolution& sol, const ModelParams& p);
double magnetization_residual(const TFSolution& sol, const ModelParams& p);

}  // namespace spintf
