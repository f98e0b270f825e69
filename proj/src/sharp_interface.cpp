#include "spintf/sharp_interface.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace spintf {

namespace {

struct Segment {
  Eigen::Vector2d p, q;
};

/// Marching squares: zero contour of nodal values phi on [0,1]^2-ish grids.
std::vector<Segment> marching_squares(const Eigen::ArrayXd& phi, int nx, int ny, double h) {
  std::vector<Segment> segs;
  auto val = [&](int i, int j) { return phi[i + nx * j]; };
  auto interp = [&](double xa, double ya, double fa, double xb, double yb, double fb) {
    double t = fa / (fa - fb);
    t = std::clamp(t, 0.0, 1.0);
    return Eigen::Vector2d(xa + t * (xb - xa), ya + t * (yb - ya));
  };

  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      double f00 = val(i, j), f10 = val(i + 1, j), f01 = val(i, j + 1),
             f11 = val(i + 1, j + 1);
      double x0 = i * h, y0 = j * h, x1 = (i + 1) * h, y1 = (j + 1) * h;
      int c = (f00 < 0 ? 1 : 0) | (f10 < 0 ? 2 : 0) | (f11 < 0 ? 4 : 0) | (f01 < 0 ? 8 : 0);
      if (c == 0 || c == 15) continue;

      Eigen::Vector2d bottom = interp(x0, y0, f00, x1, y0, f10);
      Eigen::Vector2d right = interp(x1, y0, f10, x1, y1, f11);
      Eigen::Vector2d top = interp(x0, y1, f01, x1, y1, f11);
      Eigen::Vector2d left = interp(x0, y0, f00, x0, y1, f01);

      switch (c) {
        case 1: case 14: segs.push_back({bottom, left}); break;
        case 2: case 13: segs.push_back({bottom, right}); break;
        case 3: case 12: segs.push_back({left, right}); break;
        case 4: case 11: segs.push_back({top, right}); break;
        case 6: case 9:  segs.push_back({bottom, top}); break;
        case 7: case 8:  segs.push_back({top, left}); break;
        case 5: case 10: {
          // saddle: disambiguate with the cell-center value
          double fc = 0.25 * (f00 + f10 + f01 + f11);
          bool center_neg = fc < 0;
          if ((c == 5) == center_neg) {
            segs.push_back({bottom, right});
            segs.push_back({top, left});
          } else {
            segs.push_back({bottom, left});
            segs.push_back({top, right});
          }
          break;
        }
        default: break;
      }
    }
  return segs;
}

std::vector<std::vector<Eigen::Vector2d>> chain_segments(const std::vector<Segment>& segs,
                                                         double snap) {
  auto key = [snap](const Eigen::Vector2d& p) {
    return std::pair<long long, long long>(std::llround(p.x() / snap),
                                           std::llround(p.y() / snap));
  };
  std::multimap<std::pair<long long, long long>, int> ends;
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    ends.emplace(key(segs[s].p), s);
    ends.emplace(key(segs[s].q), s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<std::vector<Eigen::Vector2d>> chains;

  for (int s0 = 0; s0 < static_cast<int>(segs.size()); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<Eigen::Vector2d> chain = {segs[s0].p, segs[s0].q};
    // grow at both ends
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        Eigen::Vector2d tip = dir == 0 ? chain.back() : chain.front();
        auto range = ends.equal_range(key(tip));
        int next = -1;
        for (auto it = range.first; it != range.second; ++it)
          if (!used[it->second]) next = it->second;
        if (next < 0) break;
        used[next] = true;
        const Segment& sg = segs[next];
        Eigen::Vector2d other =
            (sg.p - tip).norm() < (sg.q - tip).norm() ? sg.q : sg.p;
        if (dir == 0)
          chain.push_back(other);
        else
          chain.insert(chain.begin(), other);
      }
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace

SharpConfig make_config_1d(std::vector<double> interfaces, bool left_is_a, const SpinState& a,
                           const SpinState& b) {
  std::sort(interfaces.begin(), interfaces.end());
  for (double p : interfaces)
    if (p <= 0.0 || p >= 1.0)
      throw Error(Errc::invalid_argument, "1D interfaces must lie in (0,1)");
  SharpConfig c;
  c.dim = 1;
  c.interfaces = std::move(interfaces);
  c.left_is_a = left_is_a;
  c.a = a;
  c.b = b;
  double measure_a = 0.0, prev = 0.0;
  bool label = left_is_a;
  for (double p : c.interfaces) {
    if (label) measure_a += p - prev;
    prev = p;
    label = !label;
  }
  if (label) measure_a += 1.0 - prev;
  c.r = measure_a;
  return c;
}

bool label_at_1d(const SharpConfig& c, double x) {
  bool label = c.left_is_a;
  for (double p : c.interfaces) {
    if (x < p) break;
    label = !label;
  }
  return label;
}

G0Breakdown g0_energy(const SharpConfig& c, double g_ab, double g_0a, double g_0b) {
  if (g_ab < 0.0 || g_0a < 0.0 || g_0b < 0.0)
    throw Error(Errc::invalid_argument, "surface tensions must be nonnegative");
  G0Breakdown out;
  if (c.dim == 1) {
    int n_int = static_cast<int>(c.interfaces.size());
    bool right_is_a = c.left_is_a == (n_int % 2 == 0);
    int ends_a = (c.left_is_a ? 1 : 0) + (right_is_a ? 1 : 0);
    out.interior = 2.0 * g_ab * n_int;
    out.contact_a = 2.0 * g_0a * ends_a;
    out.contact_b = 2.0 * g_0b * (2 - ends_a);
  } else {
    if (c.nx < 2 || c.ny < 2) throw Error(Errc::invalid_argument, "empty 2D config");
    double h = 1.0 / (c.nx - 1);
    Eigen::ArrayXd phi(c.nx * c.ny);
    for (int k = 0; k < phi.size(); ++k) phi[k] = c.labels[k] ? -1.0 : 1.0;
    double per = 0.0;
    for (const auto& s : marching_squares(phi, c.nx, c.ny, h)) per += (s.p - s.q).norm();
    out.interior = 2.0 * g_ab * per;

    // boundary measure per label: split each boundary edge between its nodes
    double len_a = 0.0, len_b = 0.0;
    auto tally = [&](int k0, int k1) {
      len_a += 0.5 * h * ((c.labels[k0] ? 1 : 0) + (c.labels[k1] ? 1 : 0));
      len_b += 0.5 * h * ((c.labels[k0] ? 0 : 1) + (c.labels[k1] ? 0 : 1));
    };
    for (int i = 0; i + 1 < c.nx; ++i) {
      tally(i, i + 1);                                          // y = 0
      tally(i + c.nx * (c.ny - 1), i + 1 + c.nx * (c.ny - 1));  // y = 1
    }
    for (int j = 0; j + 1 < c.ny; ++j) {
      tally(c.nx * j, c.nx * (j + 1));                          // x = 0
      tally(c.nx - 1 + c.nx * j, c.nx - 1 + c.nx * (j + 1));    // x = 1
    }
    out.contact_a = 2.0 * g_0a * len_a;
    out.contact_b = 2.0 * g_0b * len_b;
  }
  out.total = out.interior + out.contact_a + out.contact_b;
  return out;
}

std::pair<SharpConfig, G0Breakdown> optimal_1d_config(double r, double g_ab, double g_0a,
                                                      double g_0b, const SpinState& a,
                                                      const SpinState& b) {
  if (!(r > 0.0 && r < 1.0)) throw Error(Errc::invalid_argument, "need r in (0,1)");
  if (g_ab < 0.0 || g_0a < 0.0 || g_0b < 0.0)
    throw Error(Errc::invalid_argument, "surface tensions must be nonnegative");

  auto positions = [&](int n_int, bool left_a) {
    // split the a-measure (and b-measure) evenly over its segments
    int n_seg = n_int + 1;
    int n_a = (n_seg + (left_a ? 1 : 0)) / 2;
    int n_b = n_seg - n_a;
    double la = r / n_a, lb = (1.0 - r) / n_b;
    std::vector<double> cuts;
    double x = 0.0;
    bool label = left_a;
    for (int s = 0; s + 1 < n_seg; ++s) {
      x += label ? la : lb;
      cuts.push_back(x);
      label = !label;
    }
    return cuts;
  };

  bool have = false;
  SharpConfig best_cfg;
  G0Breakdown best;
  for (int n_int = 1; n_int <= 3; ++n_int)
    for (bool left_a : {true, false}) {
      SharpConfig cfg = make_config_1d(positions(n_int, left_a), left_a, a, b);
      G0Breakdown e = g0_energy(cfg, g_ab, g_0a, g_0b);
      if (!have || e.total < best.total) {
        best_cfg = cfg;
        best = e;
        have = true;
      }
    }
  best_cfg.r = r;
  return {best_cfg, best};
}

std::optional<double> young_angle(double g_ab, double g_0a, double g_0b) {
  if (g_ab == 0.0) throw Error(Errc::zero_tension, "g(a,b) = 0 leaves the angle undefined");
  double cosine = (g_0b - g_0a) / g_ab;
  if (cosine < -1.0 || cosine > 1.0) return std::nullopt;
  return std::acos(cosine);
}

ContactAngleReport measure_contact_angle(const GridField& f, const SpinState& a,
                                         const SpinState& b, double window) {
  if (f.dim != 2) throw Error(Errc::invalid_argument, "contact angle needs a 2D field");
  const int nx = f.nx, ny = f.ny;
  const double h = f.h;

  Eigen::ArrayXd phi(nx * ny);
  for (int k = 0; k < nx * ny; ++k) {
    SpinState u = f.at(k);
    phi[k] = (u - a).norm() - (u - b).norm();  // negative in the a-region
  }
  auto segs = marching_squares(phi, nx, ny, h);
  if (segs.empty()) throw Error(Errc::no_contact, "no interface found");

  auto on_boundary = [&](const Eigen::Vector2d& p) {
    double d = std::min({p.x(), 1.0 - p.x(), p.y(), 1.0 - p.y()});
    return d < 0.51 * h;
  };

  // contact points: contour endpoints near the domain boundary
  std::vector<Eigen::Vector2d> contacts;
  auto chains = chain_segments(segs, 0.25 * h);
  for (const auto& chain : chains) {
    if (chain.size() < 3) continue;
    if (on_boundary(chain.front())) contacts.push_back(chain.front());
    if (on_boundary(chain.back())) contacts.push_back(chain.back());
  }
  if (contacts.empty()) throw Error(Errc::no_contact, "interface does not meet the boundary");

  auto label_is_a = [&](double x, double y) {
    int i = std::clamp(static_cast<int>(std::lround(x / h)), 0, nx - 1);
    int j = std::clamp(static_cast<int>(std::lround(y / h)), 0, ny - 1);
    return phi[i + nx * j] < 0.0;
  };

  ContactAngleReport rep;
  rep.n_contacts = static_cast<int>(contacts.size());
  double theta_sum = 0.0;
  for (const auto& cp : contacts) {
    // collect contour points in the window, principal-direction fit
    std::vector<Eigen::Vector2d> pts;
    for (const auto& s : segs) {
      if ((s.p - cp).norm() <= window) pts.push_back(s.p);
      if ((s.q - cp).norm() <= window) pts.push_back(s.q);
    }
    if (pts.size() < 4) {
      rep.n_contacts -= 1;
      continue;
    }
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    Eigen::Vector2d dir = eig.eigenvectors().col(1);  // dominant direction

    // orient the interface direction into the domain
    Eigen::Vector2d inward(0, 0);
    if (cp.x() < 0.51 * h) inward = {1, 0};
    else if (cp.x() > 1.0 - 0.51 * h) inward = {-1, 0};
    else if (cp.y() < 0.51 * h) inward = {0, 1};
    else inward = {0, -1};
    if (dir.dot(inward) < 0) dir = -dir;

    // boundary tangent pointing toward the a-labeled side
    Eigen::Vector2d tangent(-inward.y(), inward.x());
    Eigen::Vector2d probe = cp + (2.0 * h) * tangent + h * inward;
    if (!label_is_a(probe.x(), probe.y())) tangent = -tangent;

    theta_sum += std::acos(std::clamp(dir.dot(tangent), -1.0, 1.0));
  }
  if (rep.n_contacts <= 0) throw Error(Errc::no_contact, "contact windows too sparse");
  rep.theta = theta_sum / rep.n_contacts;

  // curvature statistics along the interior interface
  std::vector<double> kappas;
  for (const auto& chain : chains) {
    if (chain.size() < 12) continue;
    // moving-average smoothing
    std::vector<Eigen::Vector2d> sm(chain.size());
    int W = 2;
    for (int i = 0; i < static_cast<int>(chain.size()); ++i) {
      Eigen::Vector2d acc = Eigen::Vector2d::Zero();
      int cnt = 0;
      for (int k = -W; k <= W; ++k) {
        int idx = i + k;
        if (idx < 0 || idx >= static_cast<int>(chain.size())) continue;
        acc += chain[idx];
        ++cnt;
      }
      sm[i] = acc / cnt;
    }
    const int stride = 4;
    for (int i = stride; i + stride < static_cast<int>(sm.size()); ++i) {
      const Eigen::Vector2d &A = sm[i - stride], &B = sm[i], &C = sm[i + stride];
      double db = std::min({B.x(), 1.0 - B.x(), B.y(), 1.0 - B.y()});
      if (db < window) continue;  // skip the contact neighborhoods
      Eigen::Vector2d u = B - A, v = C - B;
      double cross = u.x() * v.y() - u.y() * v.x();
      double denom = u.norm() * v.norm() * (C - A).norm();
      if (denom < 1e-14) continue;
      kappas.push_back(2.0 * cross / denom);
    }
  }
  if (!kappas.empty()) {
    double mean_abs = 0.0, mean = 0.0;
    for (double k : kappas) {
      mean_abs += std::abs(k);
      mean += k;
    }
    mean_abs /= kappas.size();
    mean /= kappas.size();
    double var = 0.0;
    for (double k : kappas) var += (k - mean) * (k - mean);
    var /= kappas.size();
    rep.curvature_mean_abs = mean_abs;
    rep.curvature_stddev = std::sqrt(var);
  }
  return rep;
}

}  // namespace spintf
