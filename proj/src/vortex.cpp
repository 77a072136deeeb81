#include "gpvortex/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpvortex/errors.hpp"
#include "gpvortex/parallel.hpp"

namespace gpv {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct Pt {
  double x = 0.0, y = 0.0;
};

Pt cart(double r, double th) { return {r * std::cos(th), r * std::sin(th)}; }

double polar_angle(const Pt& p) {
  const double t = std::atan2(p.y, p.x);
  return t < 0.0 ? t + kTwoPi : t;
}

double median_modulus(const DiscField& u) {
  std::vector<double> m(u.values.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::abs(u.values[k]);
  auto mid = m.begin() + static_cast<std::ptrdiff_t>(m.size() / 2);
  std::nth_element(m.begin(), mid, m.end());
  return *mid;
}

// Connected components on a rows x Nt lattice, periodic in the second index.
std::vector<std::vector<std::size_t>> components(int rows, int Nt, const std::vector<std::uint8_t>& in, bool diag) {
  std::vector<int> seen(in.size(), 0);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (!in[s] || seen[s]) continue;
    out.emplace_back();
    stack.assign(1, s);
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      out.back().push_back(k);
      const int i = static_cast<int>(k / Nt), j = static_cast<int>(k % Nt);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (!diag && di != 0 && dj != 0) continue;
          const int ii = i + di;
          if (ii < 0 || ii >= rows) continue;
          const int jj = (j + dj + Nt) % Nt;
          const std::size_t q = static_cast<std::size_t>(ii) * Nt + jj;
          if (in[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

int ring_winding(const DiscField& f, int i) {
  const PolarGrid& G = f.grid;
  double t = 0.0;
  for (int j = 0; j < G.Nt; ++j)
    t += std::remainder(std::arg(f.at(i, (j + 1) % G.Nt)) - std::arg(f.at(i, j)), kTwoPi);
  return static_cast<int>(std::lround(t / kTwoPi));
}

// bilinear in (s, theta)
double sample(const PolarGrid& G, const std::vector<double>& f, double r, double th) {
  const double s = r * r;
  double t = (s - G.radial.s0) / G.radial.ds;
  t = std::clamp(t, 0.0, static_cast<double>(G.Nr - 1));
  const int i = std::min(static_cast<int>(t), G.Nr - 2);
  const double a = t - i;
  double u = std::fmod(th, kTwoPi);
  if (u < 0.0) u += kTwoPi;
  const double v = u / G.dtheta;
  const int j = static_cast<int>(v) % G.Nt;
  const double b = v - std::floor(v);
  const int jp = (j + 1) % G.Nt;
  auto F = [&](int ii, int jj) { return f[G.idx(ii, jj)]; };
  return (1 - a) * ((1 - b) * F(i, j) + b * F(i, jp)) + a * ((1 - b) * F(i + 1, j) + b * F(i + 1, jp));
}

double bulk_spacing(const PolarGrid& G, double r_min) {
  double h = 0.0;
  for (int i = 0; i + 1 < G.Nr; ++i) {
    if (G.radial.r[i + 1] < r_min) continue;
    h = std::max({h, G.radial.r[i + 1] - G.radial.r[i], G.radial.r[i + 1] * G.dtheta});
  }
  return h;
}

}  // namespace

long WindingGrid::total() const {
  long t = 0;
  for (int w : winding) t += w;
  return t;
}

long VortexSet::total_degree() const {
  long t = 0;
  for (const auto& b : items) t += b.degree;
  return t;
}

std::string to_string(CellLabel l) {
  switch (l) {
    case CellLabel::Pleasant: return "pleasant";
    case CellLabel::Average: return "average";
    case CellLabel::Unpleasant: return "unpleasant";
  }
  return "unknown";
}

WindingGrid winding_grid(const DiscField& u, double floor) {
  const PolarGrid& G = u.grid;
  WindingGrid W;
  W.rows = G.Nr - 1;
  W.Nt = G.Nt;
  W.floor = floor < 0.0 ? 0.1 * median_modulus(u) : floor;
  if (!(W.floor > 0.0)) throw NumericalError("winding_grid: zero modulus floor, phase undefined");
  const auto curl = plaquette_vorticity(u, false);
  const std::size_t np = static_cast<std::size_t>(W.rows) * W.Nt;
  W.winding.resize(np);
  W.mask.assign(np, 0);
  for (std::size_t k = 0; k < np; ++k) W.winding[k] = static_cast<int>(std::lround(curl[k] / kTwoPi));

  std::vector<std::uint8_t> low(G.size());
  for (std::size_t k = 0; k < G.size(); ++k) low[k] = std::abs(u.values[k]) < W.floor;
  std::size_t n_masked = 0;
  for (int i = 0; i < W.rows; ++i)
    for (int j = 0; j < W.Nt; ++j) {
      const int jp = (j + 1) % W.Nt;
      const bool m = low[G.idx(i, j)] || low[G.idx(i + 1, j)] || low[G.idx(i, jp)] || low[G.idx(i + 1, jp)];
      W.mask[static_cast<std::size_t>(i) * W.Nt + j] = m;
      n_masked += m;
    }
  if (n_masked == np) throw NumericalError("winding_grid: every plaquette is masked");

  // the component sum telescopes to the circulation along its boundary, whose
  // nodes all have |u| >= floor
  for (const auto& comp : components(W.rows, W.Nt, W.mask, false)) {
    long total = 0;
    std::size_t rep = comp.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : comp) {
      total += W.winding[k];
      const int i = static_cast<int>(k / W.Nt), j = static_cast<int>(k % W.Nt);
      const int jp = (j + 1) % W.Nt;
      const double m = std::min({std::abs(u.at(i, j)), std::abs(u.at(i + 1, j)), std::abs(u.at(i, jp)),
                                 std::abs(u.at(i + 1, jp))});
      if (m < best) {
        best = m;
        rep = k;
      }
    }
    for (std::size_t k : comp) W.winding[k] = 0;
    W.winding[rep] = static_cast<int>(total);
    ++W.masked_components;
  }
  return W;
}

int boundary_degree(const DiscField& psi, const RadialProfile& p) {
  if (psi.kind != FieldKind::Psi) throw ParameterError("boundary_degree expects a psi field");
  const PolarGrid& G = psi.grid;
  const int i = G.Nr - 1;
  std::vector<double> m(G.Nt);
  for (int j = 0; j < G.Nt; ++j) m[j] = std::abs(psi.at(i, j));
  std::vector<double> sorted = m;
  std::nth_element(sorted.begin(), sorted.begin() + G.Nt / 2, sorted.end());
  const double med = sorted[G.Nt / 2];
  for (double x : m)
    if (!(x >= 0.1 * med) || !(med > 0.0)) throw NumericalError("degree undefined: near-zero modulus on the outer ring");
  const DiscField u = decompose_u(psi, p);
  return static_cast<int>(p.hat_Omega) + ring_winding(u, u.grid.Nr - 1);
}

VortexSet detect_bulk_vortices(const DiscField& u, const Regime& reg, double floor) {
  const PolarGrid& G = u.grid;
  const WindingGrid W = winding_grid(u, floor);
  std::vector<std::uint8_t> flag(W.winding.size(), 0);
  for (int i = 0; i < W.rows; ++i) {
    const double rc = 0.5 * (G.radial.r[i] + G.radial.r[i + 1]);
    if (rc < reg.R_greater) continue;
    for (int j = 0; j < W.Nt; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * W.Nt + j;
      flag[k] = W.winding[k] != 0 || W.mask[k];
    }
  }
  VortexSet out;
  for (const auto& comp : components(W.rows, W.Nt, flag, true)) {
    // a component wrapping around theta is centred poorly by a plain mean;
    // average unit vectors weighted by radius instead
    Pt c{}, cw{};
    int nw = 0;
    long deg = 0;
    std::vector<Pt> pts;
    for (std::size_t k : comp) {
      const int i = static_cast<int>(k / W.Nt), j = static_cast<int>(k % W.Nt);
      const Pt q = cart(0.5 * (G.radial.r[i] + G.radial.r[i + 1]), G.theta[j] + 0.5 * G.dtheta);
      pts.push_back(q);
      c.x += q.x;
      c.y += q.y;
      deg += W.winding[k];
      if (W.winding[k] != 0) {
        cw.x += q.x;
        cw.y += q.y;
        ++nw;
      }
    }
    Pt centre = nw > 0 ? Pt{cw.x / nw, cw.y / nw} : Pt{c.x / comp.size(), c.y / comp.size()};
    double rad = 0.0;
    for (const Pt& q : pts) rad = std::max(rad, std::hypot(q.x - centre.x, q.y - centre.y));
    VortexBall b;
    b.r = std::hypot(centre.x, centre.y);
    b.theta = polar_angle(centre);
    b.radius = rad + 0.5 * bulk_spacing(G, b.r);
    b.degree = static_cast<int>(deg);
    out.items.push_back(b);
  }
  return out;
}

double alpha_loglog(double epsilon) {
  const double L = std::fabs(std::log(epsilon));
  return std::clamp(std::log(L) / L, 0.0, 0.49);
}

CellDecomposition cell_decomposition(const DiscField& u, const RadialProfile& p, const CellOptions& opts) {
  if (!(opts.alpha >= 0.0 && opts.alpha < 0.5)) throw ParameterError("alpha must lie in [0, 1/2)");
  if (!(opts.c > 0.0)) throw ParameterError("cell constant must be positive");
  const Regime& reg = p.reg;
  const PolarGrid& G = u.grid;
  const double L = reg.log_eps;
  const int N = static_cast<int>(std::floor(kTwoPi / (opts.c * reg.epsilon * L)));
  if (N < 8) throw ParameterError("cell_decomposition: fewer than 8 cells");
  if (N > G.Nt) throw ParameterError("cell_decomposition: more cells than angular nodes");

  CellDecomposition d;
  d.count = N;
  d.alpha = opts.alpha;
  d.threshold = L / reg.epsilon * std::pow(reg.epsilon, -opts.alpha);
  d.cell_of_column.resize(G.Nt);
  for (int j = 0; j < G.Nt; ++j) d.cell_of_column[j] = static_cast<int>((static_cast<long>(j) * N) / G.Nt);

  const LocalEnergy le = local_f_energy(u, p);
  d.energy.assign(N, 0.0);
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const std::size_t k = G.idx(i, j);
      d.energy[d.cell_of_column[j]] += le.kinetic[k] + le.quartic[k];
    }
  d.F_total = std::accumulate(d.energy.begin(), d.energy.end(), 0.0);

  d.good.resize(N);
  for (int m = 0; m < N; ++m) {
    d.good[m] = d.energy[m] <= d.threshold;
    d.n_bad += !d.good[m];
  }
  d.label.resize(N);
  for (int m = 0; m < N; ++m) {
    const int nb = !d.good[(m + N - 1) % N] + !d.good[(m + 1) % N];
    if (!d.good[m] || nb == 2)
      d.label[m] = CellLabel::Unpleasant;
    else if (nb == 1)
      d.label[m] = CellLabel::Average;
    else
      d.label[m] = CellLabel::Pleasant;
  }
  d.bad_bound = reg.epsilon / L * std::pow(reg.epsilon, opts.alpha) * d.F_total;

  const auto g = profile_on_rows(G, p);
  const auto du = angular_derivative(u);
  const int io = G.Nr - 1;
  const double ro = G.radial.r[io];
  for (int j = 0; j < G.Nt; ++j) {
    const double gg = g[io] * g[io];
    d.boundary_kinetic += gg * std::norm(du[G.idx(io, j)]) / ro * G.dtheta;
    const double q = 1.0 - std::norm(u.at(io, j));
    d.boundary_quartic += gg * gg * q * q / (reg.epsilon * reg.epsilon) * ro * G.dtheta;
  }
  return d;
}

BallResult grow_merge_balls(const DiscField& u, const RadialProfile& p, const CellDecomposition& dec,
                            const BallOptions& opts) {
  const Regime& reg = p.reg;
  const PolarGrid& G = u.grid;
  if (static_cast<int>(dec.cell_of_column.size()) != G.Nt) throw ParameterError("decomposition does not match u");
  if (!(opts.growth > 1.0)) throw ParameterError("growth factor must exceed 1");
  const double L = reg.log_eps;
  const double tol = opts.modulus_tol > 0.0 ? opts.modulus_tol : 1.0 / L;

  BallResult out;
  const double h = bulk_spacing(G, reg.R_greater);
  out.budget = opts.budget > 0.0 ? opts.budget : reg.epsilon * std::pow(L, -5.0);
  if (out.budget < 4.0 * h) {
    out.warning = "radius budget " + std::to_string(out.budget) + " below grid resolution; clamped to 4 grid cells";
    out.budget = 4.0 * h;
  }

  // sublevel set in good cells of the bulk
  std::vector<std::uint8_t> in(G.size(), 0);
  for (int i = 0; i < G.Nr; ++i) {
    if (G.radial.r[i] < reg.R_greater) continue;
    for (int j = 0; j < G.Nt; ++j)
      if (dec.good[dec.cell_of_column[j]] && std::fabs(std::abs(u.at(i, j)) - 1.0) > tol) in[G.idx(i, j)] = 1;
  }
  const WindingGrid W = winding_grid(u);

  struct Ball {
    Pt c;
    double r;
    long d;
  };
  std::vector<Ball> balls;
  std::vector<std::uint8_t> counted(W.winding.size(), 0);
  for (const auto& comp : components(G.Nr, G.Nt, in, true)) {
    Pt c{};
    std::vector<Pt> pts;
    long deg = 0;
    for (std::size_t k : comp) {
      const int i = static_cast<int>(k / G.Nt), j = static_cast<int>(k % G.Nt);
      const Pt q = cart(G.radial.r[i], G.theta[j]);
      pts.push_back(q);
      c.x += q.x;
      c.y += q.y;
      // plaquettes with this node as a corner
      for (int di = -1; di <= 0; ++di)
        for (int dj = -1; dj <= 0; ++dj) {
          const int ii = i + di;
          if (ii < 0 || ii >= W.rows) continue;
          const std::size_t pk = static_cast<std::size_t>(ii) * W.Nt + (j + dj + W.Nt) % W.Nt;
          if (!counted[pk]) {
            counted[pk] = 1;
            deg += W.winding[pk];
          }
        }
    }
    c.x /= comp.size();
    c.y /= comp.size();
    double rad = 0.0;
    for (const Pt& q : pts) rad = std::max(rad, std::hypot(q.x - c.x, q.y - c.y));
    balls.push_back({c, rad + 0.5 * h, deg});
  }
  std::sort(balls.begin(), balls.end(), [](const Ball& a, const Ball& b) {
    const double ra = std::hypot(a.c.x, a.c.y), rb = std::hypot(b.c.x, b.c.y);
    if (ra != rb) return ra < rb;
    return polar_angle(a.c) < polar_angle(b.c);
  });
  out.initial_balls = static_cast<int>(balls.size());
  for (const auto& b : balls) out.initial_degree_sum += b.d;

  const int N = dec.count;
  auto cell_of = [&](const Pt& c) {
    return std::min(N - 1, static_cast<int>(polar_angle(c) / kTwoPi * N));
  };
  auto max_cell_sum = [&](double factor) {
    std::vector<double> s(N, 0.0);
    for (const auto& b : balls) s[cell_of(b.c)] += b.r * factor;
    return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  };
  auto merge_all = [&] {
    for (bool again = true; again;) {
      again = false;
      for (std::size_t a = 0; a < balls.size() && !again; ++a)
        for (std::size_t b = a + 1; b < balls.size() && !again; ++b) {
          const double d = std::hypot(balls[b].c.x - balls[a].c.x, balls[b].c.y - balls[a].c.y);
          if (d >= balls[a].r + balls[b].r) continue;
          Ball& A = balls[a];
          const Ball& B = balls[b];
          Ball m;
          m.d = A.d + B.d;
          if (d + B.r <= A.r) {
            m.c = A.c;
            m.r = A.r;
          } else if (d + A.r <= B.r) {
            m.c = B.c;
            m.r = B.r;
          } else {
            m.r = 0.5 * (d + A.r + B.r);
            const double t = (m.r - A.r) / d;
            m.c = {A.c.x + t * (B.c.x - A.c.x), A.c.y + t * (B.c.y - A.c.y)};
          }
          A = m;
          balls.erase(balls.begin() + static_cast<std::ptrdiff_t>(b));
          ++out.merges;
          again = true;
        }
    }
  };

  merge_all();
  if (max_cell_sum(1.0) > out.budget) throw ParameterError("grow_merge_balls: budget smaller than initial covering radius");
  while (!balls.empty() && max_cell_sum(opts.growth) <= out.budget) {
    for (auto& b : balls) b.r *= opts.growth;
    ++out.growth_steps;
    merge_all();
  }

  const LocalEnergy le = local_f_energy(u, p);
  const double alpha = dec.alpha;
  const double corr = 1.0 - opts.floor_c * std::log(L) / L;
  for (const auto& b : balls) {
    VortexBall vb;
    vb.r = std::hypot(b.c.x, b.c.y);
    vb.theta = polar_angle(b.c);
    vb.radius = b.r;
    vb.degree = static_cast<int>(b.d);
    vb.cell = cell_of(b.c);
    double kin = 0.0;
    for (int i = 0; i < G.Nr; ++i) {
      if (std::fabs(G.radial.r[i] - vb.r) > b.r) continue;
      for (int j = 0; j < G.Nt; ++j) {
        const Pt q = cart(G.radial.r[i], G.theta[j]);
        if (std::hypot(q.x - b.c.x, q.y - b.c.y) <= b.r) kin += le.kinetic[G.idx(i, j)];
      }
    }
    const double g = profile_value(p, vb.r);
    out.balls.items.push_back(vb);
    out.kinetic.push_back(kin);
    out.floor.push_back(kTwoPi * (0.5 - alpha) * std::abs(vb.degree) * g * g * L * corr);
  }
  return out;
}

JacobianComparison jacobian_compare(const DiscField& u, const VortexSet& balls, const std::vector<double>& phi,
                                    const Regime& reg, double F_total, const CellDecomposition* dec) {
  const PolarGrid& G = u.grid;
  if (phi.size() != G.size()) throw ParameterError("phi does not match the grid of u");
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const double v = phi[G.idx(i, j)];
      if (v == 0.0) continue;
      if (G.radial.r[i] < reg.R_greater) throw ParameterError("phi support leaves the bulk");
      if (dec && !dec->good[dec->cell_of_column[j]]) throw ParameterError("phi support meets a bad cell");
    }

  JacobianComparison jc;
  for (const auto& b : balls.items) jc.lhs += kTwoPi * b.degree * sample(G, phi, b.r, b.theta);

  const auto curl = vorticity_density(u);
  std::vector<double> rows(G.Nr, 0.0);
  for (int i = 0; i < G.Nr; ++i) {
    double t = 0.0;
    for (int j = 0; j < G.Nt; ++j) t += phi[G.idx(i, j)] * curl[G.idx(i, j)];
    rows[i] = G.node_weight(i) * t;
  }
  jc.rhs = ordered_sum(rows);

  // plaquette circulations paired with the mean of phi over the four corners
  const auto pc = plaquette_vorticity(u, true);
  double rp = 0.0;
  for (int i = 0; i + 1 < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const int jp = (j + 1) % G.Nt;
      const double pm =
          0.25 * (phi[G.idx(i, j)] + phi[G.idx(i + 1, j)] + phi[G.idx(i, jp)] + phi[G.idx(i + 1, jp)]);
      rp += pm * pc[G.idx(i, j)];
    }
  jc.rhs_plaquette = rp;
  jc.gap = std::fabs(jc.lhs - jc.rhs);

  double gmax = 0.0;
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const int ip = std::min(i + 1, G.Nr - 1), im = std::max(i - 1, 0);
      const double dr = G.radial.r[ip] - G.radial.r[im];
      const double gr = (phi[G.idx(ip, j)] - phi[G.idx(im, j)]) / dr;
      const double gt = (phi[G.idx(i, (j + 1) % G.Nt)] - phi[G.idx(i, (j + G.Nt - 1) % G.Nt)]) /
                        (2.0 * G.dtheta * G.radial.r[i]);
      gmax = std::max(gmax, std::hypot(gr, gt));
    }
  jc.scale = gmax * reg.epsilon * reg.epsilon / (reg.log_eps * reg.log_eps) * F_total;
  jc.pass = jc.gap <= 10.0 * jc.scale;
  return jc;
}

}  // namespace gpv
