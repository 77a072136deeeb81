#include "gpvortex/profile1d.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpvortex/errors.hpp"
#include "tridiag.hpp"

namespace gpv {

std::string to_string(Domain d) { return d == Domain::Disc ? "disc" : "annulus"; }

Domain domain_from_string(const std::string& s) {
  if (s == "disc") return Domain::Disc;
  if (s == "annulus") return Domain::Annulus;
  throw ParameterError("unknown domain '" + s + "' (expected disc or annulus)");
}

double RadialGrid::area() const {
  double t = 0.0;
  for (double x : w) t += x;
  return t;
}

RadialGrid make_radial_grid(Domain domain, double r_inner, int n) {
  if (n < 8) throw ParameterError("radial grid needs at least 8 nodes");
  if (!(r_inner >= 0.0 && r_inner < 1.0)) throw ParameterError("inner radius outside [0,1)");
  RadialGrid g;
  g.domain = domain;
  g.n = n;
  g.s0 = r_inner * r_inner;
  g.ds = (1.0 - g.s0) / (n - 1);
  g.s.resize(n);
  g.r.resize(n);
  g.w.resize(n);
  g.a.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    g.s[i] = (i == n - 1) ? 1.0 : g.s0 + i * g.ds;
    g.r[i] = std::sqrt(g.s[i]);
    g.w[i] = kPi * g.ds * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
  }
  for (int e = 0; e < n - 1; ++e) g.a[e] = 4.0 * kPi * (g.s0 + (e + 0.5) * g.ds) / g.ds;
  return g;
}

RadialGrid make_disc_grid(int n, double r0) { return make_radial_grid(Domain::Disc, r0, n); }

RadialGrid make_annulus_grid(const Regime& reg, int n) {
  if (!reg.has_hole) throw ParameterError("annulus grid requires a regime with a TF hole");
  return make_radial_grid(Domain::Annulus, reg.R_less, n);
}

namespace {

struct Ops {
  const RadialGrid& grid;
  std::vector<double> V;  // hat_Omega^2/s - 2 Omega hat_Omega
  double q;               // eps^{-2}, or 0 without the quartic term
  double shift;           // -2 Omega hat_Omega, kept separately for the energy

  Ops(const Regime& reg, long n, const RadialGrid& gr, bool quartic) : grid(gr) {
    const double nd = static_cast<double>(n);
    shift = -2.0 * reg.Omega * nd;
    V.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) V[i] = nd * nd / gr.s[i] + shift;
    q = quartic ? 1.0 / (reg.epsilon * reg.epsilon) : 0.0;
  }

  // K g (stiffness), not divided by the mass weights
  void stiffness(const std::vector<double>& g, std::vector<double>& out) const {
    const int n = grid.n;
    out.assign(n, 0.0);
    for (int e = 0; e < n - 1; ++e) {
      const double f = grid.a[e] * (g[e] - g[e + 1]);
      out[e] += f;
      out[e + 1] -= f;
    }
  }

  // H g = W^{-1} K g + V g + 2 q g^3
  void apply_h(const std::vector<double>& g, std::vector<double>& out) const {
    stiffness(g, out);
    for (int i = 0; i < grid.n; ++i)
      out[i] = out[i] / grid.w[i] + V[i] * g[i] + 2.0 * q * g[i] * g[i] * g[i];
  }

  double dot(const std::vector<double>& x, const std::vector<double>& y) const {
    double t = 0.0;
    for (int i = 0; i < grid.n; ++i) t += grid.w[i] * x[i] * y[i];
    return t;
  }

  double energy(const std::vector<double>& g) const {
    double kin = 0.0;
    for (int e = 0; e < grid.n - 1; ++e) {
      const double d = g[e + 1] - g[e];
      kin += grid.a[e] * d * d;
    }
    double pot = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      const double g2 = g[i] * g[i];
      pot += grid.w[i] * ((V[i] - shift) * g2 + q * g2 * g2);
    }
    return kin + pot + shift;
  }
};

void normalize(const Ops& ops, std::vector<double>& g) {
  const double m = ops.dot(g, g);
  if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("profile normalization failed");
  const double f = 1.0 / std::sqrt(m);
  for (double& x : g) x *= f;
}

std::vector<double> initial_guess(const Regime& reg, long omega, const RadialGrid& grid) {
  std::vector<double> g(grid.n, 0.0);
  HatTfReport rep;
  bool ok = true;
  try {
    HatTfOptions o;
    o.omega_bound_c = std::numeric_limits<double>::infinity();
    rep = hat_tf_solve(reg, omega, o);
  } catch (const std::exception&) {
    ok = false;
  }
  double peak = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    g[i] = ok ? std::sqrt(hat_tf_density(reg, rep, grid.r[i])) : grid.r[i];
    peak = std::max(peak, g[i]);
  }
  if (!(peak > 0.0))
    for (int i = 0; i < grid.n; ++i) g[i] = grid.r[i];
  return g;
}

// Newton iteration on the bordered Euler-Lagrange system (g, mu).
void newton_polish(const Ops& ops, std::vector<double>& g, double& mu) {
  const RadialGrid& gr = ops.grid;
  const int n = gr.n;
  std::vector<double> Kg, res(n);

  auto residual = [&](const std::vector<double>& x, double m, std::vector<double>& out) {
    ops.stiffness(x, Kg);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      out[i] = Kg[i] + gr.w[i] * (ops.V[i] + 2.0 * ops.q * x[i] * x[i] - m) * x[i];
      acc += out[i] * out[i] / gr.w[i];
    }
    const double c = 0.5 * (ops.dot(x, x) - 1.0);
    return std::sqrt(acc) + std::fabs(c);
  };

  double rn = residual(g, mu, res);
  for (int it = 0; it < 12 && rn > 0.0; ++it) {
    Eigen::SparseMatrix<double> J(n + 1, n + 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n + 1);
    for (int i = 0; i < n; ++i) {
      double d = gr.w[i] * (ops.V[i] + 6.0 * ops.q * g[i] * g[i] - mu);
      if (i > 0) d += gr.a[i - 1];
      if (i < n - 1) d += gr.a[i];
      trip.emplace_back(i, i, d);
      if (i > 0) trip.emplace_back(i, i - 1, -gr.a[i - 1]);
      if (i < n - 1) trip.emplace_back(i, i + 1, -gr.a[i]);
      trip.emplace_back(i, n, -gr.w[i] * g[i]);
      trip.emplace_back(n, i, gr.w[i] * g[i]);
    }
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs[i] = -res[i];
    rhs[n] = -0.5 * (ops.dot(g, g) - 1.0);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return;
    Eigen::VectorXd step = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !step.allFinite()) return;

    std::vector<double> gt(n);
    for (int i = 0; i < n; ++i) gt[i] = std::fabs(g[i] + step[i]);
    const double mt = mu + step[n];
    std::vector<double> rt(n);
    const double rnt = residual(gt, mt, rt);
    if (!(rnt < rn)) return;
    g.swap(gt);
    mu = mt;
    res.swap(rt);
    rn = rnt;
  }
}

}  // namespace

double profile_energy(const Regime& reg, long hat_Omega, const RadialGrid& grid,
                      const std::vector<double>& g, bool quartic) {
  Ops ops(reg, hat_Omega, grid, quartic);
  return ops.energy(g);
}

double density_energy(const Regime& reg, long hat_Omega, const RadialGrid& grid,
                      const std::vector<double>& rho, bool quartic) {
  std::vector<double> g(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) g[i] = std::sqrt(std::max(0.0, rho[i]));
  return profile_energy(reg, hat_Omega, grid, g, quartic);
}

std::vector<double> euler_lagrange_residual(const RadialProfile& p) {
  Ops ops(p.reg, p.hat_Omega, p.grid, p.quartic);
  std::vector<double> hg;
  ops.apply_h(p.g, hg);
  for (int i = 0; i < p.grid.n; ++i) hg[i] -= p.mu_hat * p.g[i];
  return hg;
}

double euler_lagrange_norm(const RadialProfile& p) {
  Ops ops(p.reg, p.hat_Omega, p.grid, p.quartic);
  const auto r = euler_lagrange_residual(p);
  return std::sqrt(ops.dot(r, r)) / std::max(1.0, std::fabs(p.mu_hat));
}

RadialProfile minimize_profile(const Regime& reg, long omega, const RadialGrid& grid,
                               const ProfileOptions& opts) {
  const long nhat = reg.Omega_int - omega;
  if (nhat <= 0) throw ParameterError("minimize_profile: hat_Omega must be positive");
  if (grid.n < 8) throw ParameterError("minimize_profile: grid too small");

  Ops ops(reg, nhat, grid, opts.quartic);
  const int n = grid.n;

  std::vector<double> g;
  if (!opts.initial.empty()) {
    if (static_cast<int>(opts.initial.size()) != n)
      throw ParameterError("minimize_profile: warm start has the wrong size");
    g = opts.initial;
    for (double& x : g) x = std::fabs(x);
  } else {
    g = initial_guess(reg, omega, grid);
  }
  normalize(ops, g);

  RadialProfile out;
  out.reg = reg;
  out.grid = grid;
  out.omega = omega;
  out.hat_Omega = nhat;
  out.quartic = opts.quartic;

  std::vector<double> hg, R(n), x(n), y(n), d(n), gt(n), work, lower(n, 0.0), diag(n), upper(n, 0.0);
  for (int e = 0; e < n - 1; ++e) {
    lower[e + 1] = -grid.a[e];
    upper[e] = -grid.a[e];
  }

  double E = ops.energy(g);
  double mu = 0.0, rel = std::numeric_limits<double>::infinity();
  double tau = 1.0;
  out.history.push_back(E);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    ops.apply_h(g, hg);
    mu = ops.dot(g, hg);
    for (int i = 0; i < n; ++i) R[i] = hg[i] - mu * g[i];
    rel = std::sqrt(ops.dot(R, R)) / std::max(1.0, std::fabs(mu));
    if (!std::isfinite(rel)) throw NumericalError("minimize_profile: non-finite residual");
    if (rel < opts.tol) break;

    const double sigma = 1.0;
    for (int i = 0; i < n; ++i) {
      const double h = ops.V[i] + 6.0 * ops.q * g[i] * g[i] - mu;
      diag[i] = grid.w[i] * (std::max(h, 0.0) + sigma);
      if (i > 0) diag[i] += grid.a[i - 1];
      if (i < n - 1) diag[i] += grid.a[i];
      x[i] = grid.w[i] * R[i];
      y[i] = grid.w[i] * g[i];
    }
    detail::solve_tridiag(lower, diag, upper, x, work);
    detail::solve_tridiag(lower, diag, upper, y, work);
    const double c = ops.dot(g, x) / ops.dot(g, y);
    for (int i = 0; i < n; ++i) d[i] = x[i] - c * y[i];
    const double slope = ops.dot(R, d);
    if (!(slope > 0.0)) break;

    bool accepted = false;
    tau = std::min(1.0, 2.0 * tau);
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < n; ++i) gt[i] = std::fabs(g[i] - tau * d[i]);
      normalize(ops, gt);
      const double Et = ops.energy(gt);
      if (Et <= E - 1e-4 * tau * 2.0 * slope) {
        g.swap(gt);
        E = Et;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;  // rounding floor reached; Newton takes over
    out.history.push_back(E);
    const std::size_t h = out.history.size();
    if (h > 10 && out.history[h - 11] - E <= 1e-14 * std::fabs(E)) break;
  }
  out.iterations = it;
  out.grad_norm = rel;

  ops.apply_h(g, hg);
  mu = ops.dot(g, hg);
  if (opts.polish) {
    newton_polish(ops, g, mu);
    normalize(ops, g);
    ops.apply_h(g, hg);
    mu = ops.dot(g, hg);
  }
  out.g = g;
  out.energy = ops.energy(g);
  out.mu_hat = mu;
  out.el_residual = euler_lagrange_norm(out);
  out.converged = out.el_residual < std::max(opts.tol, 1e-12) || rel < opts.tol;
  if (!out.converged) {
    std::ostringstream msg;
    msg << "minimize_profile: no convergence for omega=" << omega << " (relative gradient "
        << out.el_residual << ")";
    throw NumericalError(msg.str(), out.el_residual);
  }
  return out;
}

PhaseResult optimize_phase(const Regime& reg, const RadialGrid& grid, const ProfileOptions& opts) {
  const long lim_lo = -static_cast<long>(std::floor(10.0 / reg.epsilon));
  const long lim_hi = reg.Omega_int - 1;
  const long center = std::clamp(static_cast<long>(std::lround(omega_tf(reg))), lim_lo, lim_hi);
  long lo = std::max(lim_lo, center - 3), hi = std::min(lim_hi, center + 3);

  std::vector<std::pair<long, RadialProfile>> done;
  auto find = [&](long w) -> const RadialProfile* {
    for (auto& e : done)
      if (e.first == w) return &e.second;
    return nullptr;
  };
  auto solve = [&](long w) {
    if (find(w)) return;
    ProfileOptions o = opts;
    const RadialProfile* nb = find(w - 1);
    if (!nb) nb = find(w + 1);
    if (nb && o.initial.empty()) o.initial = nb->g;
    done.emplace_back(w, minimize_profile(reg, w, grid, o));
  };

  for (;;) {
    for (long w = lo; w <= hi; ++w) solve(w);
    long best = lo;
    for (long w = lo; w <= hi; ++w)
      if (find(w)->energy < find(best)->energy) best = w;
    const bool at_lo = best == lo && lo > lim_lo;
    const bool at_hi = best == hi && hi < lim_hi;
    if (!at_lo && !at_hi) {
      PhaseResult res;
      res.omega_star = best;
      res.profile = *find(best);
      for (long w = lo; w <= hi; ++w) {
        const RadialProfile* p = find(w);
        res.table.push_back({w, p->energy, p->mu_hat});
      }
      return res;
    }
    if (at_lo) lo = std::max(lim_lo, lo - 3);
    if (at_hi) hi = std::min(lim_hi, hi + 3);
    if (hi - lo > 400) {
      std::ostringstream msg;
      msg << "optimize_phase: bracket exhausted, scanned omega in [" << lo << ", " << hi << "]";
      throw NumericalError(msg.str());
    }
  }
}

double compatibility_residual(const RadialProfile& p) {
  const double n = static_cast<double>(p.hat_Omega);
  double t = 0.0;
  for (int i = 0; i < p.grid.n; ++i) t += p.grid.w[i] * p.g[i] * p.g[i] * (p.reg.Omega - n / p.grid.s[i]);
  return t;
}

double inner_mass(const RadialProfile& p, double radius) {
  const double sr = radius * radius;
  double t = 0.0;
  for (int i = 0; i < p.grid.n - 1; ++i) {
    const double a = p.grid.s[i], b = p.grid.s[i + 1];
    if (a >= sr) break;
    // trapezoid on the (possibly partial) interval
    const double fa = p.g[i] * p.g[i];
    const double fb = p.g[i + 1] * p.g[i + 1];
    if (b <= sr) {
      t += 0.5 * kPi * (b - a) * (fa + fb);
    } else {
      const double th = (sr - a) / (b - a);
      const double fm = fa + th * (fb - fa);
      t += 0.5 * kPi * (sr - a) * (fa + fm);
    }
  }
  return t;
}

double neumann_residual_outer(const RadialProfile& p) {
  const int n = p.grid.n;
  const auto& g = p.g;
  const double dgds = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * p.grid.ds);
  return 2.0 * p.grid.r[n - 1] * dgds;
}

double neumann_residual_inner(const RadialProfile& p) {
  const auto& g = p.g;
  const double dgds = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * p.grid.ds);
  return 2.0 * p.grid.r[0] * dgds;
}

double profile_value(const RadialProfile& p, double r) {
  const double s = r * r;
  const auto& gr = p.grid;
  if (s < gr.s.front() - 1e-14 || s > 1.0 + 1e-14) return 0.0;
  double t = (s - gr.s0) / gr.ds;
  int i = std::clamp(static_cast<int>(std::floor(t)), 0, gr.n - 2);
  t -= i;
  return p.g[i] + t * (p.g[i + 1] - p.g[i]);
}

int annulus_start(const RadialGrid& grid, double R_less) {
  for (int i = 0; i < grid.n; ++i)
    if (grid.r[i] >= R_less - 1e-12) return i;
  return grid.n - 1;
}

ProfileValidation validate_profile(const RadialProfile& p, const Regime& reg) {
  ProfileValidation v;
  const auto& gr = p.grid;
  const int n = gr.n;
  const double rho1 = tf_density(reg, 1.0);
  const double r_band = reg.R_h + std::sqrt(reg.epsilon);
  double l2d = 0.0, l2 = 0.0, supg2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho = tf_density(reg, std::min(1.0, gr.r[i]));
    const double g2 = p.g[i] * p.g[i];
    supg2 = std::max(supg2, g2);
    l2d += gr.w[i] * (g2 - rho) * (g2 - rho);
    l2 += gr.w[i] * rho * rho;
    if (gr.r[i] >= r_band && rho > 0.0) v.tf_rel_error_max = std::max(v.tf_rel_error_max, std::fabs(g2 - rho) / rho);
    if (i + 1 < n && p.g[i + 1] - p.g[i] < -1e-9) ++v.monotonicity_violations;
    if (i + 1 < n) {
      const double dr = gr.r[i + 1] - gr.r[i];
      v.max_gradient = std::max(v.max_gradient, std::fabs(p.g[i + 1] - p.g[i]) / dr);
    }
  }
  const double rmid = 0.5 * (1.0 + reg.R_h);
  const double gm = profile_value(p, rmid);
  const double rhom = tf_density(reg, rmid);
  v.tf_rel_error_mid = rhom > 0.0 ? std::fabs(gm * gm - rhom) / rhom : 0.0;
  v.sup_ratio = supg2 / rho1;
  v.sup_bound = 1.0 + 3.0 * std::sqrt(reg.epsilon * reg.log_eps);
  v.sup_ok = v.sup_ratio <= v.sup_bound;
  v.gradient_scale = std::pow(reg.epsilon, -1.75) * std::pow(reg.log_eps, -0.75);
  v.l2_tf_diff = std::sqrt(l2d);
  v.l2_tf = std::sqrt(l2);
  v.neumann_outer = neumann_residual_outer(p);
  v.neumann_inner = neumann_residual_inner(p);
  v.el_residual = euler_lagrange_norm(p);
  return v;
}

}  // namespace gpv
