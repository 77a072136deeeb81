#include "gpvortex/cost.hpp"

#include <algorithm>
#include <cmath>

#include "gpvortex/errors.hpp"

namespace gpv {

namespace {

// cumulative integral of samples f on a uniform grid, exact for quadratics
std::vector<double> cumulative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece;
    if (i + 2 < n)
      piece = h * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
    else
      piece = h * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]) / 12.0;
    out[i + 1] = out[i] + piece;
  }
  return out;
}

void fill_h(const Regime& reg, CostCurve& c) {
  const std::size_t n = c.radii.size();
  c.H.resize(n);
  c.H_signed.resize(n);
  c.h_min = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const double kin = 0.5 * c.g2[i] * reg.log_eps;
    c.H[i] = kin - std::fabs(c.F[i]);
    c.H_signed[i] = kin + c.F[i];
    if (c.radii[i] >= reg.R_greater && !(c.H[i] >= c.h_min)) {
      c.h_min = c.H[i];
      c.h_min_radius = c.radii[i];
    }
  }
}

}  // namespace

CostCurve potential_F(const RadialProfile& p) {
  const Regime& reg = p.reg;
  const auto& gr = p.grid;
  const int i0 = annulus_start(gr, reg.R_less);
  const double n = static_cast<double>(p.hat_Omega);
  CostCurve c;
  c.source = "profile";
  c.omega = p.omega;
  c.hat_Omega = p.hat_Omega;
  c.first_node = i0;
  std::vector<double> f;
  for (int i = i0; i < gr.n; ++i) {
    const double r = gr.r[i];
    const double g2 = p.g[i] * p.g[i];
    c.radii.push_back(r);
    c.g2.push_back(g2);
    c.B.push_back(reg.Omega * r - n / r);
    // in s = r^2: 2 g^2 (Omega r - n/r) dr = g^2 (Omega - n/s) ds
    f.push_back(g2 * (reg.Omega - n / gr.s[i]));
  }
  c.F = cumulative(f, gr.ds);
  c.F[0] = 0.0;
  return c;
}

CostCurve cost_H(const RadialProfile& p, CostCurve curve) {
  if (curve.radii.empty() || curve.F.size() != curve.radii.size())
    throw ParameterError("cost_H: curve has no potential");
  if (curve.hat_Omega != p.hat_Omega) throw ParameterError("cost_H: curve built from a different profile");
  fill_h(p.reg, curve);
  return curve;
}

std::vector<double> dF_dr(const CostCurve& c) {
  const std::size_t n = c.radii.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  // radii are uniform in s
  const double ds = c.radii[1] * c.radii[1] - c.radii[0] * c.radii[0];
  for (std::size_t i = 0; i < n; ++i) {
    double dfds;
    if (i == 0)
      dfds = (-3.0 * c.F[0] + 4.0 * c.F[1] - c.F[2]) / (2.0 * ds);
    else if (i == n - 1)
      dfds = (3.0 * c.F[n - 1] - 4.0 * c.F[n - 2] + c.F[n - 3]) / (2.0 * ds);
    else
      dfds = (c.F[i + 1] - c.F[i - 1]) / (2.0 * ds);
    d[i] = 2.0 * c.radii[i] * dfds;
  }
  return d;
}

double tf_z(const Regime& reg, double r) { return reg.epsilon * reg.Omega * (r * r - reg.R_h * reg.R_h); }

double tf_cost(const Regime& reg, double z) {
  const double zmax = 2.0 / kSqrtPi;
  if (!(z >= 0.0 && z <= zmax * (1.0 + 1e-12))) throw ParameterError("tf_cost: z outside [0, 2/sqrt(pi)]");
  return 3.0 * reg.omega0 - 2.0 * z * (zmax - z);
}

double tf_potential_leading(const Regime& reg, double z) {
  return z * z * (z - 2.0 / kSqrtPi) / (6.0 * reg.epsilon);
}

double tf_cost_scaled(const Regime& reg, double z) { return z * tf_cost(reg, z) / (12.0 * reg.epsilon); }

double tf_cost_bulk_min(const Regime& reg) {
  const double zmax = 2.0 / kSqrtPi;
  const double zlo = reg.has_hole ? std::clamp(tf_z(reg, reg.R_greater), 0.0, zmax) : 0.0;
  // z H(z) is a cubic; compare the endpoints with its interior critical points
  auto f = [&](double z) { return tf_cost_scaled(reg, z); };
  double best = std::min(f(zlo), f(zmax));
  // d/dz [3 O0 z - (4/sqrt(pi)) z^2 + 2 z^3] = 3 O0 - (8/sqrt(pi)) z + 6 z^2
  const double a = 6.0, b = -8.0 / kSqrtPi, c = 3.0 * reg.omega0;
  const double disc = b * b - 4.0 * a * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double z : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
      if (z > zlo && z < zmax) best = std::min(best, f(z));
  }
  return best;
}

CostCurve tf_cost_curve(const Regime& reg, long omega, int nodes) {
  if (!reg.has_hole) throw ParameterError("tf_cost_curve: requires a TF hole");
  const RadialGrid gr = make_annulus_grid(reg, nodes);
  const long nh = reg.Omega_int - omega;
  if (nh <= 0) throw ParameterError("tf_cost_curve: hat_Omega must be positive");
  const double n = static_cast<double>(nh);
  const double sh = reg.R_h * reg.R_h;
  const double k = 0.5 * reg.epsilon * reg.epsilon * reg.Omega * reg.Omega;
  // primitive of k (s - s_h)(Omega - n/s)
  auto prim = [&](double s) {
    return k * (reg.Omega * (0.5 * s * s - sh * s) - n * (s - sh * std::log(s)));
  };
  CostCurve c;
  c.source = "tf";
  c.omega = omega;
  c.hat_Omega = nh;
  for (int i = 0; i < gr.n; ++i) {
    const double r = gr.r[i], s = gr.s[i];
    c.radii.push_back(r);
    c.g2.push_back(tf_density(reg, std::min(r, 1.0)));
    c.B.push_back(reg.Omega * r - n / r);
    c.F.push_back(s > sh ? prim(s) - prim(sh) : 0.0);
  }
  fill_h(reg, c);
  return c;
}

std::vector<CriticalRow> critical_scan(const std::vector<std::pair<double, double>>& family, int nodes) {
  std::vector<CriticalRow> rows;
  for (const auto& [eps, om0] : family) {
    const Regime reg = make_regime(eps, om0, HolePolicy::Allow);
    CriticalRow row;
    row.epsilon = eps;
    row.omega0 = om0;
    row.has_hole = reg.has_hole;
    row.predicted = 3.0 * om0 - 2.0 / kPi;
    row.near_critical = std::fabs(row.predicted) < kCriticalMargin;
    row.min_H_tf = tf_cost_bulk_min(reg);
    if (reg.has_hole) {
      const PhaseResult ph = optimize_phase(reg, make_annulus_grid(reg, nodes));
      row.omega_star = ph.omega_star;
      const CostCurve c = cost_H(ph.profile, potential_F(ph.profile));
      row.min_H = c.h_min;
    }
    if (!row.near_critical) {
      const bool pos = row.predicted > 0.0;
      row.agree = (row.min_H_tf > 0.0) == pos;
      if (std::isfinite(row.min_H)) row.agree = row.agree && ((row.min_H > 0.0) == pos);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gpv
