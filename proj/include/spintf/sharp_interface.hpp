#pragma once

#include <optional>
#include <vector>

#include "spintf/grid.hpp"

namespace spintf {

/// Sharp two-phase configuration. 1D: sorted interface positions in (0,1)
/// with the label of the leftmost segment. 2D: per-node label bitmap
/// (true = state a) on an nx-by-ny grid over the unit square.
struct SharpConfig {
  int dim = 1;
  std::vector<double> interfaces;  // 1D
  bool left_is_a = true;           // 1D
  Eigen::Array<bool, Eigen::Dynamic, 1> labels;  // 2D, flattened i + nx*j
  int nx = 0, ny = 0;
  SpinState a = SpinState::Zero();
  SpinState b = SpinState::Zero();
  double r = 0.0;  // volume fraction of the a-region
};

/// 1D helpers.
SharpConfig make_config_1d(std::vector<double> interfaces, bool left_is_a, const SpinState& a,
                           const SpinState& b);
bool label_at_1d(const SharpConfig& c, double x);  // true = a

struct G0Breakdown {
  double interior = 0.0;   // 2 g(a,b) Per(u = a)
  double contact_a = 0.0;  // 2 g(0,a) x boundary measure of the a-label
  double contact_b = 0.0;
  double total = 0.0;
};

/// Sharp-interface energy of a configuration. In 1D the perimeter is the
/// interface count and the boundary measure is the counting measure on {0,1};
/// in 2D the perimeter is the marching-squares contour length.
G0Breakdown g0_energy(const SharpConfig& c, double g_ab, double g_0a, double g_0b);

/// Enumerate 1D topologies with at most 3 interfaces and return the cheapest.
std::pair<SharpConfig, G0Breakdown> optimal_1d_config(double r, double g_ab, double g_0a,
                                                      double g_0b, const SpinState& a,
                                                      const SpinState& b);

/// Contact angle from the tension balance; nullopt when no equilibrium angle
/// exists (complete wetting/dewetting). Radians.
std::optional<double> young_angle(double g_ab, double g_0a, double g_0b);

struct ContactAngleReport {
  double theta = 0.0;               // radians, measured inside the a-region
  int n_contacts = 0;
  double curvature_mean_abs = 0.0;  // along the interior interface
  double curvature_stddev = 0.0;
};

/// Fit the interface near its intersection with the domain boundary of a 2D
/// field and report the measured contact angle plus curvature statistics.
/// `window` is the fitting window size (use ~6 epsilon).
ContactAngleReport measure_contact_angle(const GridField& f, const SpinState& a,
                                         const SpinState& b, double window);

}  // namespace spintf
