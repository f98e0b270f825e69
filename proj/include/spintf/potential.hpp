#pragma once

#include <array>

#include "spintf/model.hpp"

namespace spintf {

/// Thomas-Fermi Hamiltonian density (normalized form). sgn(0) is taken as +1;
/// the spin-exchange term vanishes at alpha = 0 either way.
double h_tf(const SpinState& u, const ModelParams& p);

/// Regime-calibrated nonnegative bulk potential. Vanishes exactly at the
/// Thomas-Fermi constant states and is evaluated on all of R^3 through the
/// componentwise even extension W(u) = W(|u1|,|u0|,|u-1|).
///
/// Pointwise, W = h_tf + lambda1 * mass + lambda2 * magnetization + offset;
/// eval_w uses the regime's sum-of-squares arrangement of the same quantity,
/// whose coefficients are cached in `c` at calibration time.
struct PotentialW {
  Regime regime = Regime::ms_ms;
  ModelParams params;
  std::map<std::string, double> calib;
  SpinState well_a = SpinState::Zero();
  SpinState well_b = SpinState::Zero();
  bool has_b = false;
  double lambda1 = 0.0, lambda2 = 0.0, offset = 0.0;
  std::array<double, 8> c{};  // regime-specific evaluation coefficients
};

/// Calibrate W for the five regimes whose minimizers are isolated wells
/// (NS_MS, PURE_2C, NS_2C, MS_MS, PURE_3C). The degenerate regimes have
/// continuum zero sets and are rejected with RegimeMismatch.
PotentialW build_w(const ModelParams& p, const TFSolution& sol);

double eval_w(const PotentialW& w, const SpinState& u);
SpinState grad_w(const PotentialW& w, const SpinState& u);

struct WellOptions {
  int samples = 100000;        // quasi-random octant samples
  double exclusion = 0.0;      // delta-ball radius around wells; 0 -> automatic
  double growth_radius_factor = 10.0;  // growth checked at factor * sqrt(n)
};

struct WellReport {
  double w_at_a = 0.0, w_at_b = 0.0;
  double min_outside = 0.0;        // min W over samples outside the delta-balls
  SpinState argmin_outside = SpinState::Zero();
  double quad_lower_a = 0.0, quad_upper_a = 0.0;  // bounds on W/|u-a|^2 near a
  double quad_lower_b = 0.0, quad_upper_b = 0.0;
  double growth_min_ratio = 0.0;   // min W/|u|^2 on the far sphere
  double exclusion = 0.0;
};

/// Sampling verification of the well structure; throws WellViolation when a
/// check fails.
WellReport verify_wells(const PotentialW& w, const WellOptions& opt = {});

}  // namespace spintf
