#include "spintf/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace spintf {

namespace {

double cell_volume(const GridField& f) { return f.dim == 1 ? f.h : f.h * f.h; }

void reflect(GridField& f) {
  for (auto& c : f.comp) c = c.abs();
}

struct Moments {
  double P = 0, Q = 0, Z = 0;
};

Moments moments(const GridField& f) {
  Moments m;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      int k = f.idx(i, j);
      double w = f.weight(i, j);
      m.P += w * f.comp[0][k] * f.comp[0][k];
      m.Z += w * f.comp[1][k] * f.comp[1][k];
      m.Q += w * f.comp[2][k] * f.comp[2][k];
    }
  return m;
}

std::vector<double> interface_positions_1d(const GridField& f, const SpinState& a,
                                           const SpinState& b) {
  std::vector<double> out;
  auto phi = [&](int i) {
    SpinState u = f.at(i);
    return (u - a).squaredNorm() - (u - b).squaredNorm();
  };
  double prev = phi(1);
  for (int i = 2; i + 1 < f.nx; ++i) {
    double cur = phi(i);
    if (prev == 0.0) prev = -1e-300;
    if ((prev < 0) != (cur < 0)) {
      double t = prev / (prev - cur);
      out.push_back(((i - 1) + t) * f.h);
    }
    prev = cur;
  }
  return out;
}

double l2_distance_to_sharp(const GridField& f, const SpinState& a, const SpinState& b) {
  double acc = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      SpinState u = f.at(f.idx(i, j));
      acc += f.weight(i, j) * std::min((u - a).squaredNorm(), (u - b).squaredNorm());
    }
  return std::sqrt(acc);
}

/// C^2 cutoff: 1 on |t| <= 1, 0 on |t| >= 2.
double zeta(double t) {
  double x = std::abs(t);
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  double s = x - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

SpinState bump_direction(const SpinState& well) {
  if (well[0] > 1e-12) return SpinState(1, 0, 0);
  if (well[1] > 1e-12) return SpinState(0, 1, 0);
  return SpinState(0, 0, 1);
}

}  // namespace

double discretize_energy(const GridField& f, const PotentialW& w, double eps) {
  if (!(eps > 0.0)) throw Error(Errc::invalid_argument, "eps must be positive");
  const double hd = cell_volume(f);
  double grad = 0.0;
  for (const auto& c : f.comp) {
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i + 1 < f.nx; ++i) {
        double d = c[f.idx(i + 1, j)] - c[f.idx(i, j)];
        grad += d * d;
      }
    if (f.dim == 2)
      for (int j = 0; j + 1 < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
          double d = c[f.idx(i, j + 1)] - c[f.idx(i, j)];
          grad += d * d;
        }
  }
  grad *= hd / (f.h * f.h);

  double bulk = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      bulk += f.weight(i, j) * eval_w(w, f.at(f.idx(i, j)));

  return eps * grad + bulk / eps;
}

GridField project_constraints(const GridField& f, double N, double M) {
  Moments mom = moments(f);
  const double scale = std::max(1.0, std::abs(N));

  if (M > 0.0 && mom.P <= 0.0)
    throw Error(Errc::projection_infeasible, "M > 0 but the u1 component is empty");
  if (M < 0.0 && mom.Q <= 0.0)
    throw Error(Errc::projection_infeasible, "M < 0 but the u-1 component is empty");
  if (mom.P + mom.Q + mom.Z <= 0.0)
    throw Error(Errc::projection_infeasible, "empty field cannot carry mass");
  if (std::abs(M) > N)
    throw Error(Errc::projection_infeasible, "|M| > N is never attainable");

  // multipliers (s+, s0, s-) = (sigma tau, sigma, sigma / tau); Newton in
  // log-variables keeps them positive.
  double x = 0.0, y = 0.0;  // sigma = e^x, tau = e^y
  auto residual = [&](double xx, double yy, double* F1, double* F2) {
    double s2 = std::exp(2.0 * xx), t2 = std::exp(2.0 * yy);
    *F1 = s2 * (t2 * mom.P + mom.Q / t2 + mom.Z) - N;
    *F2 = s2 * (t2 * mom.P - mom.Q / t2) - M;
  };

  double F1, F2;
  residual(x, y, &F1, &F2);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(F1) < 1e-12 * scale && std::abs(F2) < 1e-12 * scale) {
      converged = true;
      break;
    }
    double s2 = std::exp(2.0 * x), t2 = std::exp(2.0 * y);
    double a11 = 2.0 * s2 * (t2 * mom.P + mom.Q / t2 + mom.Z);
    double a12 = 2.0 * s2 * (t2 * mom.P - mom.Q / t2);
    double a21 = 2.0 * s2 * (t2 * mom.P - mom.Q / t2);
    double a22 = 2.0 * s2 * (t2 * mom.P + mom.Q / t2);
    double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-300)
      throw Error(Errc::projection_infeasible, "projection system is singular");
    double dx = -(a22 * F1 - a12 * F2) / det;
    double dy = -(-a21 * F1 + a11 * F2) / det;

    double step = 1.0;
    double base = std::abs(F1) + std::abs(F2);
    for (int k = 0; k < 40; ++k) {
      double nF1, nF2;
      residual(x + step * dx, y + step * dy, &nF1, &nF2);
      if (std::abs(nF1) + std::abs(nF2) < base) {
        x += step * dx;
        y += step * dy;
        F1 = nF1;
        F2 = nF2;
        break;
      }
      step *= 0.5;
      if (k == 39) throw Error(Errc::projection_infeasible, "projection Newton stalled");
    }
  }
  if (!converged) {
    residual(x, y, &F1, &F2);
    if (!(std::abs(F1) < 1e-12 * scale && std::abs(F2) < 1e-12 * scale))
      throw Error(Errc::projection_infeasible, "projection did not converge");
  }

  double sigma = std::exp(x), tau = std::exp(y);
  GridField out = f;
  out.comp[0] *= sigma * tau;
  out.comp[1] *= sigma;
  out.comp[2] *= sigma / tau;
  return out;
}

FlowReport minimize_geps(GridField& f, const PotentialW& w, double N, double M,
                         const FlowOptions& opt) {
  const double eps = opt.eps;
  if (!(eps > 0.0)) throw Error(Errc::invalid_argument, "eps must be positive");
  const int dim = f.dim;
  const double h = f.h;

  f.zero_boundary();
  reflect(f);
  f = project_constraints(f, N, M);

  FlowReport rep;
  rep.eps = eps;
  double E = discretize_energy(f, w, eps);
  rep.energy_trace.push_back(E);

  // Explicit stability: diffusion CFL h^2/(4 d eps) for u_t = 2 eps lap u,
  // and the 1/eps reaction scale.
  const double dt0 = opt.step_safety * std::min(h * h / (4.0 * dim * eps), eps);
  double dt = dt0;
  const double dt_cap = 16.0 * dt0;

  GridField trial = f;
  std::array<Eigen::ArrayXd, 3> grad;
  for (auto& g : grad) g = Eigen::ArrayXd::Zero(f.size());

  int iter = 0;
  int stall = 0;
  for (; iter < opt.max_iters; ++iter) {
    // flow velocity: -2 eps lap u + grad W / eps at interior nodes
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        int k = f.idx(i, j);
        if (f.is_boundary(i, j)) {
          grad[0][k] = grad[1][k] = grad[2][k] = 0.0;
          continue;
        }
        SpinState gw = grad_w(w, f.at(k));
        for (int c = 0; c < 3; ++c) {
          double lap = f.comp[c][f.idx(i - 1, j)] + f.comp[c][f.idx(i + 1, j)] -
                       2.0 * dim * f.comp[c][k];
          if (dim == 2)
            lap += f.comp[c][f.idx(i, j - 1)] + f.comp[c][f.idx(i, j + 1)];
          grad[c][k] = -2.0 * eps * lap / (h * h) + gw[c] / eps;
        }
      }

    bool accepted = false;
    double Et = E;
    for (int tries = 0; tries < 60; ++tries) {
      for (int c = 0; c < 3; ++c) trial.comp[c] = f.comp[c] - dt * grad[c];
      reflect(trial);
      trial.zero_boundary();
      trial = project_constraints(trial, N, M);
      Et = discretize_energy(trial, w, eps);
      if (Et < E) {
        accepted = true;
        break;
      }
      dt *= 0.5;
    }
    if (!accepted) {
      rep.step_collapse = true;
      break;
    }
    f = trial;
    double drop = E - Et;
    E = Et;
    if ((iter + 1) % opt.trace_stride == 0) rep.energy_trace.push_back(E);
    dt = std::min(dt * 1.2, dt_cap);

    // stop on a sustained stall of the relative decrease
    if (drop < opt.tol * std::max(std::abs(E), 1e-300)) {
      if (++stall > opt.tol_window) break;
    } else {
      stall = 0;
    }
  }

  rep.iters = iter;
  rep.final_energy = E;
  rep.res_mass = f.mass() - N;
  rep.res_mag = f.magnetization() - M;
  if (dim == 1) rep.interface_positions = interface_positions_1d(f, w.well_a, w.well_b);
  rep.l2_distance_to_tf = l2_distance_to_sharp(f, w.well_a, w.well_b);
  return rep;
}

GridField make_initial_field(const SharpConfig& v0, int nodes, double eps, double N, double M,
                             double noise_amp, std::uint64_t seed) {
  GridField f = GridField::zeros(v0.dim, nodes);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double sqn = std::sqrt(std::max(v0.a.squaredNorm(), v0.b.squaredNorm()));

  auto blend = [&](double d) {  // 0 -> state a, 1 -> state b
    return 0.5 * (1.0 + std::tanh(d / (1.5 * eps)));
  };

  if (v0.dim == 1) {
    for (int i = 0; i < f.nx; ++i) {
      double x = i * f.h;
      double d = std::numeric_limits<double>::infinity();
      for (double p : v0.interfaces) d = std::min(d, std::abs(x - p));
      if (v0.interfaces.empty()) d = 1.0;
      double sd = label_at_1d(v0, x) ? -d : d;
      double ramp = std::min(1.0, std::min(x, 1.0 - x) / (2.0 * eps));
      SpinState u = (v0.a + blend(sd) * (v0.b - v0.a)) * ramp;
      for (int c = 0; c < 3; ++c) u[c] += noise_amp * sqn * uni(rng) * ramp;
      f.set(i, u);
    }
  } else {
    if (v0.nx != nodes || v0.ny != nodes)
      throw Error(Errc::invalid_argument, "2D config resolution must match the grid");
    // signed distance from the label bitmap via the contour of +-1 values
    Eigen::ArrayXd phi(nodes * nodes);
    for (int k = 0; k < phi.size(); ++k) phi[k] = v0.labels[k] ? -1.0 : 1.0;
    std::vector<Eigen::Vector2d> pts;
    // collect midpoints of label changes as interface samples
    for (int j = 0; j < nodes; ++j)
      for (int i = 0; i + 1 < nodes; ++i)
        if (v0.labels[i + nodes * j] != v0.labels[i + 1 + nodes * j])
          pts.push_back({(i + 0.5) * f.h, j * f.h});
    for (int j = 0; j + 1 < nodes; ++j)
      for (int i = 0; i < nodes; ++i)
        if (v0.labels[i + nodes * j] != v0.labels[i + nodes * (j + 1)])
          pts.push_back({i * f.h, (j + 0.5) * f.h});

    for (int j = 0; j < nodes; ++j)
      for (int i = 0; i < nodes; ++i) {
        Eigen::Vector2d x(i * f.h, j * f.h);
        double d = 1.0;
        for (const auto& p : pts) d = std::min(d, (x - p).norm());
        double sd = v0.labels[i + nodes * j] ? -d : d;
        double db = std::min({x.x(), 1.0 - x.x(), x.y(), 1.0 - x.y()});
        double ramp = std::min(1.0, db / (2.0 * eps));
        SpinState u = (v0.a + blend(sd) * (v0.b - v0.a)) * ramp;
        for (int c = 0; c < 3; ++c) u[c] += noise_amp * sqn * uni(rng) * ramp;
        f.set(f.idx(i, j), u);
      }
  }

  reflect(f);
  f.zero_boundary();
  return project_constraints(f, N, M);
}

std::vector<ContinuationRow> continuation_in_eps(GridField& f, const PotentialW& w, double N,
                                                 double M, const std::vector<double>& eps_list,
                                                 double g0_pred, const FlowOptions& base) {
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (eps_list[i] >= eps_list[i - 1])
      throw Error(Errc::invalid_argument, "eps schedule must be strictly decreasing");
  std::vector<ContinuationRow> rows;
  for (double eps : eps_list) {
    if (eps < 2.0 * f.h)
      throw Error(Errc::invalid_argument, "eps below grid resolution (need eps >= 2h)");
    FlowOptions opt = base;
    opt.eps = eps;
    FlowReport r = minimize_geps(f, w, N, M, opt);
    ContinuationRow row;
    row.eps = eps;
    row.g_eps = r.final_energy;
    row.g0_pred = g0_pred;
    row.gap = r.final_energy - g0_pred;
    row.gap_rel = row.gap / g0_pred;
    rows.push_back(row);
  }
  return rows;
}

RecoveryResult build_recovery_sequence(const SharpConfig& v0, const PotentialW& w,
                                       const LayerProfile& internal, const LayerProfile& bnd_a,
                                       const LayerProfile& bnd_b, double eps, int nodes,
                                       const RecoveryOptions& opt) {
  if (!(eps > 0.0)) throw Error(Errc::invalid_argument, "eps must be positive");
  if ((v0.a - w.well_a).norm() > 1e-9 || (w.has_b && (v0.b - w.well_b).norm() > 1e-9))
    throw Error(Errc::invalid_argument, "sharp configuration does not match the wells of W");
  const double egamma = std::pow(eps, opt.gamma);

  GridField f = GridField::zeros(v0.dim, nodes);
  const double h = f.h;

  // signed distances d (to the interface, negative in the a-region) and d_b
  // (to the domain boundary, negative in the a-region)
  std::vector<double> d(f.size()), db(f.size());
  if (v0.dim == 1) {
    if (v0.interfaces.empty())
      throw Error(Errc::invalid_argument, "recovery needs at least one interface");
    for (double p : v0.interfaces)
      if (std::min(p, 1.0 - p) <= 4.0 * egamma)
        throw Error(Errc::geometry_too_tight,
                    "interface within 4 eps^gamma of the domain boundary");
    for (int i = 0; i < f.nx; ++i) {
      double x = i * h;
      double dist = std::numeric_limits<double>::infinity();
      for (double p : v0.interfaces) dist = std::min(dist, std::abs(x - p));
      bool isa = label_at_1d(v0, x);
      d[i] = isa ? -dist : dist;
      double dbnd = std::min(x, 1.0 - x);
      db[i] = isa ? -dbnd : dbnd;
    }
  } else {
    if (v0.nx != nodes || v0.ny != nodes)
      throw Error(Errc::invalid_argument, "2D config resolution must match the grid");
    std::vector<Eigen::Vector2d> pts;
    for (int j = 0; j < nodes; ++j)
      for (int i = 0; i + 1 < nodes; ++i)
        if (v0.labels[i + nodes * j] != v0.labels[i + 1 + nodes * j])
          pts.push_back({(i + 0.5) * h, j * h});
    for (int j = 0; j + 1 < nodes; ++j)
      for (int i = 0; i < nodes; ++i)
        if (v0.labels[i + nodes * j] != v0.labels[i + nodes * (j + 1)])
          pts.push_back({i * h, (j + 0.5) * h});
    if (pts.empty()) throw Error(Errc::invalid_argument, "recovery needs an interface");
    for (const auto& p : pts)
      if (std::min({p.x(), 1.0 - p.x(), p.y(), 1.0 - p.y()}) <= 4.0 * egamma)
        throw Error(Errc::geometry_too_tight,
                    "interface within 4 eps^gamma of the domain boundary");
    for (int j = 0; j < nodes; ++j)
      for (int i = 0; i < nodes; ++i) {
        Eigen::Vector2d x(i * h, j * h);
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) dist = std::min(dist, (x - p).norm());
        int k = i + nodes * j;
        bool isa = v0.labels[k];
        d[k] = isa ? -dist : dist;
        double dbnd = std::min({x.x(), 1.0 - x.x(), x.y(), 1.0 - x.y()});
        db[k] = isa ? -dbnd : dbnd;
      }
  }

  // layer solution: internal profile across the interface, boundary profiles
  // along the walls, glued by cutoffs at scale eps^gamma
  for (int k = 0; k < f.size(); ++k) {
    double zd = zeta(d[k] / egamma);
    double zb = zeta(db[k] / egamma);
    SpinState v0k = d[k] < 0 ? v0.a : v0.b;
    SpinState inner = zd * profile_value(internal, d[k] / eps) + (1.0 - zd) * v0k;
    SpinState bl = db[k] < 0 ? profile_value(bnd_a, -db[k] / eps)
                             : profile_value(bnd_b, db[k] / eps);
    SpinState u = (1.0 - zb) * inner + zb * (1.0 - zd) * bl;
    f.set(k, u);
  }
  f.zero_boundary();

  // bump corrections restoring the constraints: phi supported deep in the
  // a-region, psi deep in the b-region
  auto make_bump = [&](bool want_a, const SpinState& dir) {
    int best = -1;
    double best_margin = 0.0;
    for (int k = 0; k < f.size(); ++k) {
      if ((d[k] < 0) != want_a) continue;
      double margin = std::min(std::abs(d[k]), std::abs(db[k]));
      if (margin > best_margin) {
        best_margin = margin;
        best = k;
      }
    }
    double radius = 0.6 * (best_margin - 2.0 * egamma);
    if (best < 0 || radius < 2.0 * h)
      throw Error(Errc::geometry_too_tight, "no room for a constraint bump");
    Eigen::ArrayXd bump = Eigen::ArrayXd::Zero(f.size());
    int bi = best % f.nx, bj = best / f.nx;
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        double dx = (i - bi) * h;
        double dy = (j - bj) * h;
        double rr = std::sqrt(dx * dx + dy * dy) / radius;
        if (rr < 1.0) {
          double t = 1.0 - rr * rr;
          bump[f.idx(i, j)] = t * t * t;
        }
      }
    return std::pair<Eigen::ArrayXd, SpinState>(bump, dir);
  };

  auto [phi, dir_a] = make_bump(true, bump_direction(v0.a));
  auto [psi, dir_b] = make_bump(false, bump_direction(v0.b));

  // discrete integrals entering the constraint quadratics
  double c11 = 0, c11m = 0, d1 = 0, e1 = 0;
  double c22 = 0, c22m = 0, d2 = 0, e2 = 0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      int k = f.idx(i, j);
      double wq = f.weight(i, j);
      SpinState u = f.at(k);
      SpinState ph = phi[k] * dir_a, ps = psi[k] * dir_b;
      c11 += wq * ph.squaredNorm();
      c22 += wq * ps.squaredNorm();
      c11m += wq * (ph[0] * ph[0] - ph[2] * ph[2]);
      c22m += wq * (ps[0] * ps[0] - ps[2] * ps[2]);
      d1 += wq * u.dot(ph);
      d2 += wq * u.dot(ps);
      e1 += wq * (u[0] * ph[0] - u[2] * ph[2]);
      e2 += wq * (u[0] * ps[0] - u[2] * ps[2]);
    }

  const double N = v0.r * v0.a.squaredNorm() + (1.0 - v0.r) * v0.b.squaredNorm();
  const double M = v0.r * magnetization_density(v0.a) +
                   (1.0 - v0.r) * magnetization_density(v0.b);
  double n_eps = f.mass() - N;
  double m_eps = f.magnetization() - M;

  double det0 = 4.0 * (d1 * e2 - d2 * e1);
  if (std::abs(det0) < 1e-14 * std::max(1.0, N * N))
    throw Error(Errc::jacobian_singular, "constraint bumps are degenerate");

  double a1 = 0.0, a2 = 0.0;
  for (int it = 0; it < 100; ++it) {
    double f1 = a1 * a1 * c11 + 2.0 * a1 * d1 + a2 * a2 * c22 + 2.0 * a2 * d2 + n_eps;
    double f2 = a1 * a1 * c11m + 2.0 * a1 * e1 + a2 * a2 * c22m + 2.0 * a2 * e2 + m_eps;
    if (std::abs(f1) < opt.newton_tol * std::max(1.0, N) &&
        std::abs(f2) < opt.newton_tol * std::max(1.0, N))
      break;
    double j11 = 2.0 * a1 * c11 + 2.0 * d1, j12 = 2.0 * a2 * c22 + 2.0 * d2;
    double j21 = 2.0 * a1 * c11m + 2.0 * e1, j22 = 2.0 * a2 * c22m + 2.0 * e2;
    double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300)
      throw Error(Errc::jacobian_singular, "constraint Newton lost rank");
    a1 -= (j22 * f1 - j12 * f2) / det;
    a2 -= (-j21 * f1 + j11 * f2) / det;
  }

  for (int k = 0; k < f.size(); ++k) {
    SpinState u = f.at(k) + a1 * phi[k] * dir_a + a2 * psi[k] * dir_b;
    f.set(k, u);
  }
  f.zero_boundary();
  for (const auto& c : f.comp)
    if (c.minCoeff() < 0.0)
      throw Error(Errc::geometry_too_tight, "constraint correction left the octant");

  RecoveryResult out;
  out.field = std::move(f);
  out.alpha1 = a1;
  out.alpha2 = a2;
  return out;
}

}  // namespace spintf
