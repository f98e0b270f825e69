#pragma once

#include <vector>

#include "spintf/potential.hpp"

namespace spintf {

struct GeodesicOptions {
  int nodes = 128;
  std::vector<double> delta_schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double rel_tol = 1e-6;
  int max_sweeps = 5000;
  bool multistart = true;
};

/// Discrete geodesic in the conformal metric sqrt(W) ds. Nodes are clamped to
/// the nonnegative octant; the final cost drops the (W + delta) regularization.
struct GeodesicPath {
  Eigen::Matrix3Xd samples;
  double cost = 0.0;
  double delta_used = 0.0;
  bool multiple_geodesics = false;
  std::vector<double> stage_costs;  // converged cost at each delta stage
};

GeodesicPath geodesic_cost(const PotentialW& w, const SpinState& xi0, const SpinState& xi1,
                           const GeodesicOptions& opt = {});

/// Independent upper-bound oracle: Dijkstra on the 26-neighbor lattice over
/// [0, 1.5 max-extent]^3 with edge weight = mean sqrt(W) at the endpoints
/// times the Euclidean edge length. Endpoints snap to the lattice.
double graph_oracle_cost(const PotentialW& w, const SpinState& xi0, const SpinState& xi1,
                         int resolution);

/// One-dimensional layer profile eta(t) traversing a geodesic with
/// |eta'| = sqrt(W(eta)).
struct LayerProfile {
  Eigen::VectorXd t;
  Eigen::Matrix3Xd values;
  double energy = 0.0;          // int |eta'|^2 + W(eta) dt
  double decay_rate = 0.0;      // fitted exponential approach rate (c1 > 0)
  double tail_r2 = 0.0;         // R^2 of the log-linear tail fit
  double equip_residual = 0.0;  // sup | |eta'|_fd - sqrt(W(eta)) |, corner-free triples
};

struct ProfileOptions {
  double well_tol = 1e-8;  // stop once this close to the terminal state
  double t_max = 50.0;
  double dt = 5e-4;        // nominal step of the profile ODE
};

/// Profile connecting well a to well b along `path`; energy = 2 g(a,b).
LayerProfile internal_profile(const PotentialW& w, const GeodesicPath& path,
                              const ProfileOptions& opt = {});

/// Half-line profile from the Dirichlet value 0 to a well; energy = 2 g(0, target).
LayerProfile boundary_profile(const PotentialW& w, const SpinState& target,
                              const GeodesicOptions& gopt = {},
                              const ProfileOptions& opt = {});

struct SurfaceTensions {
  double g_ab = 0.0;
  double g_0a = 0.0;
  double g_0b = 0.0;
};

/// The three tensions entering the sharp-interface energy.
SurfaceTensions surface_tensions(const PotentialW& w, const GeodesicOptions& opt = {});

/// Evaluate a profile at arbitrary t (linear interpolation, clamped ends).
SpinState profile_value(const LayerProfile& profile, double t);

}  // namespace spintf
