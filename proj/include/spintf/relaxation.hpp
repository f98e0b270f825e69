#pragma once

#include <cstdint>
#include <vector>

#include "spintf/geodesic.hpp"
#include "spintf/grid.hpp"
#include "spintf/potential.hpp"
#include "spintf/sharp_interface.hpp"

namespace spintf {

/// Discrete G_eps: forward-difference gradient over all links (including the
/// one-sided differences into the zero boundary) plus trapezoidal bulk term.
double discretize_energy(const GridField& f, const PotentialW& w, double eps);

/// Rescale (u1, u0, u-1) by multipliers (sigma tau, sigma, sigma / tau) so the
/// discrete mass and magnetization hit (N, M); Newton from (1, 1).
GridField project_constraints(const GridField& f, double N, double M);

struct FlowOptions {
  double eps = 0.02;
  int max_iters = 400000;
  double tol = 1e-10;          // mean relative energy decrease per step
  int tol_window = 50;
  double step_safety = 0.2;
  int trace_stride = 1;        // record energy every k accepted steps
};

struct FlowReport {
  double eps = 0.0;
  std::vector<double> energy_trace;
  double final_energy = 0.0;
  double res_mass = 0.0, res_mag = 0.0;
  std::vector<double> interface_positions;  // 1D
  double l2_distance_to_tf = 0.0;
  bool step_collapse = false;
  int iters = 0;
};

/// Constrained gradient flow on the discrete energy; `f` is advanced in place.
/// Every accepted step is reflected to the octant and reprojected, and the
/// recorded energies never increase.
FlowReport minimize_geps(GridField& f, const PotentialW& w, double N, double M,
                         const FlowOptions& opt);

/// Mollified sharp configuration (layer width ~ eps) with a small seeded
/// perturbation, reflected and projected to the constraints.
GridField make_initial_field(const SharpConfig& v0, int nodes, double eps, double N, double M,
                             double noise_amp = 0.02, std::uint64_t seed = 12345);

struct ContinuationRow {
  double eps = 0.0;
  double g_eps = 0.0;
  double g0_pred = 0.0;
  double gap = 0.0;      // g_eps - g0_pred
  double gap_rel = 0.0;  // gap / g0_pred
};

/// Warm-started minimization along a decreasing eps schedule.
std::vector<ContinuationRow> continuation_in_eps(GridField& f, const PotentialW& w, double N,
                                                 double M, const std::vector<double>& eps_list,
                                                 double g0_pred, const FlowOptions& base);

struct RecoveryOptions {
  double gamma = 2.0 / 3.0;  // cutoff exponent
  double newton_tol = 1e-13;
};

struct RecoveryResult {
  GridField field;
  double alpha1 = 0.0, alpha2 = 0.0;  // constraint-correction coefficients
};

/// Explicit near-minimizer at scale eps: glued layer profiles plus a bump
/// correction restoring the constraints exactly (to Newton tolerance).
RecoveryResult build_recovery_sequence(const SharpConfig& v0, const PotentialW& w,
                                       const LayerProfile& internal, const LayerProfile& bnd_a,
                                       const LayerProfile& bnd_b, double eps, int nodes,
                                       const RecoveryOptions& opt = {});

}  // namespace spintf
