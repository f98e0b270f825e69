#include "spintf/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace spintf {

namespace {

using Path = Eigen::Matrix3Xd;

double path_cost(const PotentialW& w, const Path& x, double delta) {
  double cost = 0.0;
  double f_prev = std::sqrt(eval_w(w, x.col(0)) + delta);
  for (int i = 0; i + 1 < x.cols(); ++i) {
    double f_next = std::sqrt(eval_w(w, x.col(i + 1)) + delta);
    cost += 0.5 * (f_prev + f_next) * (x.col(i + 1) - x.col(i)).norm();
    f_prev = f_next;
  }
  return cost;
}

/// Exact gradient of the trapezoidal cost with respect to the interior nodes.
Path cost_gradient(const PotentialW& w, const Path& x, double delta) {
  const int n = static_cast<int>(x.cols());
  Path grad = Path::Zero(3, n);
  std::vector<double> f(n), L(n - 1);
  std::vector<SpinState> df(n);
  for (int i = 0; i < n; ++i) {
    double wi = eval_w(w, x.col(i));
    f[i] = std::sqrt(wi + delta);
    df[i] = grad_w(w, x.col(i)) / (2.0 * f[i]);
  }
  for (int i = 0; i + 1 < n; ++i) L[i] = (x.col(i + 1) - x.col(i)).norm();

  for (int j = 1; j + 1 < n; ++j) {
    SpinState tau_prev = (x.col(j) - x.col(j - 1)) / std::max(L[j - 1], 1e-300);
    SpinState tau_next = (x.col(j + 1) - x.col(j)) / std::max(L[j], 1e-300);
    grad.col(j) = 0.5 * (L[j - 1] + L[j]) * df[j] +
                  0.5 * (f[j - 1] + f[j]) * tau_prev - 0.5 * (f[j] + f[j + 1]) * tau_next;
  }
  return grad;
}

/// Resample the polyline at constant speed (same node count).
Path reparametrize(const Path& x) {
  const int n = static_cast<int>(x.cols());
  std::vector<double> s(n, 0.0);
  for (int i = 1; i < n; ++i) s[i] = s[i - 1] + (x.col(i) - x.col(i - 1)).norm();
  double total = s[n - 1];
  if (total <= 0.0) return x;
  Path out(3, n);
  out.col(0) = x.col(0);
  out.col(n - 1) = x.col(n - 1);
  int seg = 0;
  for (int i = 1; i + 1 < n; ++i) {
    double target = total * i / (n - 1.0);
    while (seg + 2 < n && s[seg + 1] < target) ++seg;
    double t = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
    out.col(i) = (1.0 - t) * x.col(seg) + t * x.col(seg + 1);
  }
  return out;
}

/// Quadratic Bezier through a control point, clamped to the octant.
Path bezier_start(const SpinState& a, const SpinState& b, const SpinState& ctrl, int nodes) {
  Path x(3, nodes);
  for (int i = 0; i < nodes; ++i) {
    double t = i / (nodes - 1.0);
    SpinState p = (1 - t) * (1 - t) * a + 2 * t * (1 - t) * ctrl + t * t * b;
    x.col(i) = p.cwiseMax(0.0);
  }
  return x;
}

/// Minimize the regularized cost for one delta by projected gradient descent
/// with backtracking; reparametrizes to constant speed every sweep.
double relax_path(const PotentialW& w, Path& x, double delta, const GeodesicOptions& opt) {
  double cost = path_cost(w, x, delta);
  double span = (x.col(x.cols() - 1) - x.col(0)).norm() + 1e-12;
  double step = 0.05 * span;
  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    Path grad = cost_gradient(w, x, delta);
    double gmax = grad.colwise().norm().maxCoeff();
    if (gmax < 1e-300) break;

    bool accepted = false;
    double trial_cost = cost;
    Path trial;
    for (int k = 0; k < 50; ++k) {
      trial = x - std::min(step, 0.2 * span / gmax) * grad;
      trial = trial.cwiseMax(0.0);
      trial.col(0) = x.col(0);
      trial.col(x.cols() - 1) = x.col(x.cols() - 1);
      trial_cost = path_cost(w, trial, delta);
      if (trial_cost < cost) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this resolution

    trial = reparametrize(trial);
    double new_cost = path_cost(w, trial, delta);
    x = trial;
    double change = std::abs(cost - new_cost) / std::max(std::abs(new_cost), 1e-300);
    cost = new_cost;
    step *= 1.3;
    if (change < opt.rel_tol) return cost;
  }
  if (sweep >= opt.max_sweeps)
    throw Error(Errc::no_convergence, "geodesic relaxation hit the sweep cap");
  return cost;
}

GeodesicPath run_schedule(const PotentialW& w, Path x, const GeodesicOptions& opt) {
  GeodesicPath out;
  if (opt.delta_schedule.empty() || opt.delta_schedule.back() < 1e-6 - 1e-15)
    throw Error(Errc::invalid_argument, "delta schedule must end at >= 1e-6");
  for (double delta : opt.delta_schedule) {
    double c = relax_path(w, x, delta, opt);
    out.stage_costs.push_back(c);
    out.delta_used = delta;
  }
  out.samples = x;
  out.cost = path_cost(w, x, 0.0);
  return out;
}

}  // namespace

GeodesicPath geodesic_cost(const PotentialW& w, const SpinState& xi0, const SpinState& xi1,
                           const GeodesicOptions& opt) {
  if (xi0.minCoeff() < 0.0 || xi1.minCoeff() < 0.0)
    throw Error(Errc::invalid_argument, "geodesic endpoints must lie in the octant");

  if ((xi0 - xi1).norm() == 0.0) {
    GeodesicPath out;
    out.samples = Path::Zero(3, opt.nodes);
    for (int i = 0; i < opt.nodes; ++i) out.samples.col(i) = xi0;
    out.cost = 0.0;
    out.delta_used = opt.delta_schedule.empty() ? 0.0 : opt.delta_schedule.back();
    return out;
  }

  SpinState mid = 0.5 * (xi0 + xi1);
  double span = (xi1 - xi0).norm();
  std::vector<Path> starts;
  starts.push_back(bezier_start(xi0, xi1, mid, opt.nodes));  // straight line
  if (opt.multistart) {
    starts.push_back(bezier_start(xi0, xi1, mid + span * SpinState(0, 0.75, 0), opt.nodes));
    starts.push_back(
        bezier_start(xi0, xi1, mid + span * SpinState(0.45, 0.45, 0.45), opt.nodes));
  }

  GeodesicPath best;
  bool have_best = false;
  std::vector<GeodesicPath> results;
  for (auto& s : starts) {
    GeodesicPath r = run_schedule(w, s, opt);
    results.push_back(r);
    if (!have_best || r.cost < best.cost) {
      best = r;
      have_best = true;
    }
  }
  // Flag distinct local geodesics: similar cost but different trajectory, or
  // clearly distinct converged costs.
  for (const auto& r : results) {
    double dpath = (r.samples - best.samples).colwise().norm().maxCoeff();
    if (dpath > 0.05 * span && std::abs(r.cost - best.cost) < 0.25 * best.cost)
      best.multiple_geodesics = true;
  }
  return best;
}

double graph_oracle_cost(const PotentialW& w, const SpinState& xi0, const SpinState& xi1,
                         int resolution) {
  if (resolution < 3) throw Error(Errc::invalid_argument, "resolution too small");
  const int R = resolution;
  double extent = std::max({w.well_a.maxCoeff(), w.has_b ? w.well_b.maxCoeff() : 0.0,
                            xi0.maxCoeff(), xi1.maxCoeff(), std::sqrt(w.params.n)});
  const double L = 1.5 * extent;
  const double h = L / (R - 1);

  auto node_pos = [&](int i, int j, int k) { return SpinState(i * h, j * h, k * h); };
  auto snap = [&](const SpinState& u) {
    auto clampi = [&](double v) {
      return std::min(R - 1, std::max(0, static_cast<int>(std::lround(v / h))));
    };
    return std::array<int, 3>{clampi(u[0]), clampi(u[1]), clampi(u[2])};
  };
  auto flat = [&](int i, int j, int k) { return (i * R + j) * R + k; };

  std::vector<float> f(static_cast<size_t>(R) * R * R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      for (int k = 0; k < R; ++k)
        f[flat(i, j, k)] = static_cast<float>(std::sqrt(eval_w(w, node_pos(i, j, k))));

  auto s0 = snap(xi0), s1 = snap(xi1);
  const int src = flat(s0[0], s0[1], s0[2]);
  const int dst = flat(s1[0], s1[1], s1[2]);
  if (src == dst) return 0.0;

  std::vector<double> dist(f.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);

  while (!pq.empty()) {
    auto [d, node] = pq.top();
    pq.pop();
    if (d > dist[node]) continue;
    if (node == dst) return d;
    int k = node % R, j = (node / R) % R, i = node / (R * R);
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj)
        for (int dk = -1; dk <= 1; ++dk) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          int ni = i + di, nj = j + dj, nk = k + dk;
          if (ni < 0 || nj < 0 || nk < 0 || ni >= R || nj >= R || nk >= R) continue;
          int nn = flat(ni, nj, nk);
          double len = h * std::sqrt(double(di * di + dj * dj + dk * dk));
          double nd = d + 0.5 * (f[node] + f[nn]) * len;
          if (nd < dist[nn]) {
            dist[nn] = nd;
            pq.emplace(nd, nn);
          }
        }
  }
  throw Error(Errc::root_not_found, "lattice target unreachable");
}

namespace {

/// Piecewise-linear constant-speed curve gamma(beta), beta in [0,1].
struct ConstantSpeedCurve {
  Path x;
  double length = 0.0;

  explicit ConstantSpeedCurve(const Path& path) : x(reparametrize(path)) {
    for (int i = 1; i < x.cols(); ++i) length += (x.col(i) - x.col(i - 1)).norm();
  }

  SpinState at(double beta) const {
    const int n = static_cast<int>(x.cols());
    double s = std::clamp(beta, 0.0, 1.0) * (n - 1);
    int seg = std::min(n - 2, static_cast<int>(s));
    double t = s - seg;
    return (1.0 - t) * x.col(seg) + t * x.col(seg + 1);
  }

  int segment_of(double beta) const {
    const int n = static_cast<int>(x.cols());
    return std::min(n - 2, static_cast<int>(std::clamp(beta, 0.0, 1.0) * (n - 1)));
  }
};

struct OdeSample {
  double t, beta, energy;
};

/// Integrate beta' = sqrt(W(gamma(beta))) / length from beta0 in direction
/// sgn until gamma(beta) is within tol of `target`, accumulating the energy
/// integral 2 W dt. Classical RK4 with a fixed nominal step.
std::vector<OdeSample> integrate_profile(const PotentialW& w, const ConstantSpeedCurve& curve,
                                         double beta0, int sgn, const SpinState& target,
                                         const ProfileOptions& opt) {
  auto rate = [&](double beta) {
    return std::sqrt(std::max(0.0, eval_w(w, curve.at(beta)))) / curve.length;
  };
  std::vector<OdeSample> out;
  double t = 0.0, beta = beta0, energy = 0.0;
  out.push_back({t, beta, energy});
  const double dt = sgn * opt.dt;
  int stall = 0;
  while (std::abs(t) < opt.t_max) {
    double k1 = rate(beta);
    double k2 = rate(beta + 0.5 * dt * k1);
    double k3 = rate(beta + 0.5 * dt * k2);
    double k4 = rate(beta + dt * k3);
    double dbeta = dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    // energy rate = 2 W = 2 (length * beta')^2
    double l2 = 2.0 * curve.length * curve.length;
    double e1 = l2 * k1 * k1, e2 = l2 * k2 * k2, e3 = l2 * k3 * k3, e4 = l2 * k4 * k4;
    energy += std::abs(dt) * (e1 + 2 * e2 + 2 * e3 + e4) / 6.0;
    beta = std::clamp(beta + dbeta, 0.0, 1.0);
    t += dt;
    out.push_back({t, beta, energy});
    if ((curve.at(beta) - target).norm() <= opt.well_tol) break;
    if (std::abs(dbeta) < 1e-16) {
      if (++stall > 50)
        throw Error(Errc::stall_detected,
                    "layer ODE stalled away from the wells (interior zero of W?)");
    } else {
      stall = 0;
    }
  }
  return out;
}

void fit_tail(const PotentialW&, const LayerProfile& p, const SpinState& terminal,
              double well_tol, double* rate, double* r2) {
  // Log-linear fit of |eta - terminal| on the approach side (largest t).
  std::vector<double> ts, ys;
  for (int i = 0; i < p.t.size(); ++i) {
    double d = (p.values.col(i) - terminal).norm();
    if (d > 10.0 * well_tol && d < 1e-2) {
      ts.push_back(p.t[i]);
      ys.push_back(std::log(d));
    }
  }
  *rate = 0.0;
  *r2 = 0.0;
  if (ts.size() < 8) return;
  double n = static_cast<double>(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-300) return;
  double slope = (n * sty - st * sy) / denom;
  *rate = -slope;  // decay toward the terminal state
  double cov = n * sty - st * sy;
  double var_t = denom, var_y = n * syy - sy * sy;
  *r2 = var_y > 0 ? cov * cov / (var_t * var_y) : 0.0;
}

LayerProfile assemble(const PotentialW& w, const ConstantSpeedCurve& curve,
                      const std::vector<OdeSample>& back, const std::vector<OdeSample>& fwd,
                      const SpinState& terminal, const ProfileOptions& opt) {
  // back is ordered from t=0 to negative times; reverse and merge with fwd.
  LayerProfile p;
  const int nb = static_cast<int>(back.size()), nf = static_cast<int>(fwd.size());
  const int n = nb - 1 + nf;
  p.t.resize(n);
  p.values.resize(3, n);
  std::vector<double> betas(n);
  for (int i = 0; i < nb - 1; ++i) {
    const auto& s = back[nb - 1 - i];
    p.t[i] = s.t;
    betas[i] = s.beta;
    p.values.col(i) = curve.at(s.beta);
  }
  for (int i = 0; i < nf; ++i) {
    const auto& s = fwd[i];
    p.t[nb - 1 + i] = s.t;
    betas[nb - 1 + i] = s.beta;
    p.values.col(nb - 1 + i) = curve.at(s.beta);
  }
  p.energy = back.back().energy + fwd.back().energy;

  // Equipartition residual by one-sided-free central differences, restricted
  // to triples inside a single polyline segment (the curve is only C^0 at
  // its nodes).
  double sup = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    if (curve.segment_of(betas[i - 1]) != curve.segment_of(betas[i + 1])) continue;
    double hm = p.t[i] - p.t[i - 1], hp = p.t[i + 1] - p.t[i];
    if (hm <= 0 || hp <= 0) continue;
    SpinState d = (hm * hm * p.values.col(i + 1) - hp * hp * p.values.col(i - 1) +
                   (hp * hp - hm * hm) * p.values.col(i)) /
                  (hm * hp * (hm + hp));
    double resid = std::abs(d.norm() - std::sqrt(std::max(0.0, eval_w(w, p.values.col(i)))));
    sup = std::max(sup, resid);
  }
  p.equip_residual = sup;

  fit_tail(w, p, terminal, opt.well_tol, &p.decay_rate, &p.tail_r2);
  return p;
}

}  // namespace

LayerProfile internal_profile(const PotentialW& w, const GeodesicPath& path,
                              const ProfileOptions& opt) {
  if (path.samples.cols() < 4)
    throw Error(Errc::invalid_argument, "path too coarse for a profile");
  ConstantSpeedCurve curve(path.samples);
  if (curve.length <= 0.0)
    throw Error(Errc::invalid_argument, "profile needs a nondegenerate path");
  SpinState a = path.samples.col(0);
  SpinState b = path.samples.col(path.samples.cols() - 1);
  auto back = integrate_profile(w, curve, 0.5, -1, a, opt);
  auto fwd = integrate_profile(w, curve, 0.5, +1, b, opt);
  return assemble(w, curve, back, fwd, b, opt);
}

LayerProfile boundary_profile(const PotentialW& w, const SpinState& target,
                              const GeodesicOptions& gopt, const ProfileOptions& opt) {
  GeodesicPath path = geodesic_cost(w, SpinState::Zero(), target, gopt);
  ConstantSpeedCurve curve(path.samples);
  if (curve.length <= 0.0)
    throw Error(Errc::invalid_argument, "boundary profile needs a nondegenerate path");
  auto fwd = integrate_profile(w, curve, 0.0, +1, target, opt);
  std::vector<OdeSample> none = {{0.0, 0.0, 0.0}};
  return assemble(w, curve, none, fwd, target, opt);
}

SurfaceTensions surface_tensions(const PotentialW& w, const GeodesicOptions& opt) {
  if (!w.has_b)
    throw Error(Errc::invalid_argument, "surface tensions need a two-well potential");
  SurfaceTensions g;
  g.g_ab = geodesic_cost(w, w.well_a, w.well_b, opt).cost;
  g.g_0a = geodesic_cost(w, SpinState::Zero(), w.well_a, opt).cost;
  g.g_0b = geodesic_cost(w, SpinState::Zero(), w.well_b, opt).cost;
  return g;
}

SpinState profile_value(const LayerProfile& p, double t) {
  const int n = static_cast<int>(p.t.size());
  if (n == 0) throw Error(Errc::invalid_argument, "empty profile");
  if (t <= p.t[0]) return p.values.col(0);
  if (t >= p.t[n - 1]) return p.values.col(n - 1);
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (p.t[mid] <= t ? lo : hi) = mid;
  }
  double u = (t - p.t[lo]) / (p.t[hi] - p.t[lo]);
  return (1.0 - u) * p.values.col(lo) + u * p.values.col(hi);
}

}  // namespace spintf
