#include "gpvortex/field2d.hpp"

#include <algorithm>
#include <cmath>

#include "angular_fft.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/parallel.hpp"

namespace gpv {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_phase(double x) { return std::remainder(x, kTwoPi); }

// c_k = (1/Nt) sum_j f_j exp(-i k theta_j) for every row
std::vector<cplx> row_coefficients(const DiscField& f) {
  const PolarGrid& g = f.grid;
  std::vector<cplx> c(g.size());
  detail::angular_fft(g.Nr, g.Nt)->forward(f.values.data(), c.data());
  const double inv = 1.0 / g.Nt;
  for (auto& x : c) x *= inv;
  return c;
}

void check_same_regime(const Regime& a, const Regime& b) {
  if (a.epsilon != b.epsilon || a.omega0 != b.omega0)
    throw ParameterError("regime does not match the profile's regime");
}

// radial + angular pieces of the integral of g^2 |grad u|^2
double weighted_kinetic(const DiscField& u, const std::vector<double>& g, const std::vector<cplx>& du_t) {
  const PolarGrid& G = u.grid;
  std::vector<double> rows(G.Nr, 0.0);
  parallel_for(G.Nr, [&](int i) {
    double acc = 0.0;
    const double ang = G.node_weight(i) * g[i] * g[i] / G.radial.s[i];
    for (int j = 0; j < G.Nt; ++j) acc += ang * std::norm(du_t[G.idx(i, j)]);
    if (i + 1 < G.Nr) {
      const double ge = 0.5 * (g[i] * g[i] + g[i + 1] * g[i + 1]);
      const double ce = G.radial.a[i] / G.Nt * ge;
      for (int j = 0; j < G.Nt; ++j) acc += ce * std::norm(u.values[G.idx(i + 1, j)] - u.values[G.idx(i, j)]);
    }
    rows[i] = acc;
  });
  return ordered_sum(rows);
}

double weighted_quartic(const DiscField& u, const std::vector<double>& g, double eps) {
  const PolarGrid& G = u.grid;
  const double q = 1.0 / (eps * eps);
  std::vector<double> rows(G.Nr, 0.0);
  parallel_for(G.Nr, [&](int i) {
    double acc = 0.0;
    const double g4 = g[i] * g[i] * g[i] * g[i];
    for (int j = 0; j < G.Nt; ++j) {
      const double d = 1.0 - std::norm(u.values[G.idx(i, j)]);
      acc += d * d;
    }
    rows[i] = G.node_weight(i) * q * g4 * acc;
  });
  return ordered_sum(rows);
}

void edge_currents(const DiscField& u, bool regularized, std::vector<double>& er, std::vector<double>& et) {
  const PolarGrid& G = u.grid;
  std::vector<double> ph(G.size()), m(G.size());
  for (std::size_t k = 0; k < G.size(); ++k) {
    ph[k] = std::arg(u.values[k]);
    m[k] = regularized ? std::min(2.0 * std::abs(u.values[k]), 1.0) : 1.0;
  }
  er.assign(G.size(), 0.0);
  et.assign(G.size(), 0.0);
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const std::size_t a = G.idx(i, j);
      const std::size_t b = G.idx(i, (j + 1) % G.Nt);
      et[a] = m[a] * m[b] * wrap_phase(ph[b] - ph[a]);
      if (i + 1 < G.Nr) {
        const std::size_t c = G.idx(i + 1, j);
        er[a] = m[a] * m[c] * wrap_phase(ph[c] - ph[a]);
      }
    }
}

}  // namespace

double field_dot(const PolarGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<double> rows(g.Nr, 0.0);
  parallel_for(g.Nr, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < g.Nt; ++j) {
      const std::size_t k = g.idx(i, j);
      acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    }
    rows[i] = g.node_weight(i) * acc;
  });
  return ordered_sum(rows);
}

double field_norm2(const DiscField& f) { return field_dot(f.grid, f.values, f.values); }

void normalize_field(DiscField& f) {
  const double n2 = field_norm2(f);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalError("cannot normalize field");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& x : f.values) x *= s;
}

std::vector<cplx> angular_derivative(const DiscField& f, AngularDiff mode) {
  const PolarGrid& g = f.grid;
  std::vector<cplx> out(g.size());
  if (mode == AngularDiff::Central) {
    const double inv = 1.0 / (2.0 * g.dtheta);
    for (int i = 0; i < g.Nr; ++i)
      for (int j = 0; j < g.Nt; ++j)
        out[g.idx(i, j)] = (f.values[g.idx(i, (j + 1) % g.Nt)] - f.values[g.idx(i, (j + g.Nt - 1) % g.Nt)]) * inv;
    return out;
  }
  auto c = row_coefficients(f);
  for (int i = 0; i < g.Nr; ++i)
    for (int k = 0; k < g.Nt; ++k) c[g.idx(i, k)] *= cplx(0.0, detail::wavenumber(k, g.Nt));
  detail::angular_fft(g.Nr, g.Nt)->backward(c.data(), out.data());
  return out;
}

std::vector<cplx> radial_derivative_s(const DiscField& f) {
  const PolarGrid& g = f.grid;
  const double h = g.radial.ds;
  const int n = g.Nr;
  std::vector<cplx> out(g.size());
  for (int j = 0; j < g.Nt; ++j)
    for (int i = 0; i < n; ++i) {
      cplx d;
      if (i == 0)
        d = (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) / (2.0 * h);
      else if (i == n - 1)
        d = (3.0 * f.at(n - 1, j) - 4.0 * f.at(n - 2, j) + f.at(n - 3, j)) / (2.0 * h);
      else
        d = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
      out[g.idx(i, j)] = d;
    }
  return out;
}

GpEnergyParts gp_energy_parts(const DiscField& psi, const Regime& reg, AngularDiff mode) {
  const PolarGrid& g = psi.grid;
  const double q = 1.0 / (reg.epsilon * reg.epsilon);
  std::vector<double> rad(g.Nr, 0.0), ang(g.Nr, 0.0), rot(g.Nr, 0.0), qua(g.Nr, 0.0);

  std::vector<cplx> c, dt;
  if (mode == AngularDiff::Spectral)
    c = row_coefficients(psi);
  else
    dt = angular_derivative(psi, AngularDiff::Central);

  parallel_for(g.Nr, [&](int i) {
    const double wi = g.radial.w[i];
    const double si = g.radial.s[i];
    double a = 0.0, m = 0.0, qq = 0.0, rr = 0.0;
    if (mode == AngularDiff::Spectral) {
      for (int k = 0; k < g.Nt; ++k) {
        const double kk = detail::wavenumber(k, g.Nt);
        const double p = std::norm(c[g.idx(i, k)]);
        a += kk * kk * p;
        m += kk * p;
      }
      ang[i] = wi * a / si;
      rot[i] = -2.0 * reg.Omega * wi * m;
    } else {
      for (int j = 0; j < g.Nt; ++j) {
        const std::size_t k = g.idx(i, j);
        a += std::norm(dt[k]);
        m += std::imag(std::conj(psi.values[k]) * dt[k]);
      }
      ang[i] = wi / g.Nt * a / si;
      rot[i] = -2.0 * reg.Omega * wi / g.Nt * m;
    }
    for (int j = 0; j < g.Nt; ++j) {
      const double p = std::norm(psi.values[g.idx(i, j)]);
      qq += p * p;
    }
    qua[i] = q * wi / g.Nt * qq;
    if (i + 1 < g.Nr) {
      for (int j = 0; j < g.Nt; ++j) rr += std::norm(psi.values[g.idx(i + 1, j)] - psi.values[g.idx(i, j)]);
      rad[i] = g.radial.a[i] / g.Nt * rr;
    }
  });
  GpEnergyParts e;
  e.radial = ordered_sum(rad);
  e.angular = ordered_sum(ang);
  e.rotation = ordered_sum(rot);
  e.quartic = ordered_sum(qua);
  e.total = e.radial + e.angular + e.rotation + e.quartic;
  return e;
}

double gp_energy(const DiscField& psi, const Regime& reg, AngularDiff mode) {
  if (psi.kind != FieldKind::Psi) throw ParameterError("gp_energy expects a psi field");
  const double n2 = field_norm2(psi);
  if (!(std::fabs(n2 - 1.0) <= 1e-10)) throw ParameterError("gp_energy: field is not normalized");
  return gp_energy_parts(psi, reg, mode).total;
}

void gp_apply_h(const DiscField& psi, const Regime& reg, std::vector<cplx>& out) {
  const PolarGrid& g = psi.grid;
  auto fft = detail::angular_fft(g.Nr, g.Nt);
  std::vector<cplx> c(g.size());
  fft->forward(psi.values.data(), c.data());
  const double inv = 1.0 / g.Nt;
  for (int i = 0; i < g.Nr; ++i) {
    const double si = g.radial.s[i];
    for (int k = 0; k < g.Nt; ++k) {
      const double kk = detail::wavenumber(k, g.Nt);
      c[g.idx(i, k)] *= (kk * kk / si - 2.0 * reg.Omega * kk) * inv;
    }
  }
  out.resize(g.size());
  fft->backward(c.data(), out.data());
  const double q2 = 2.0 / (reg.epsilon * reg.epsilon);
  parallel_for(g.Nr, [&](int i) {
    const double wi = g.radial.w[i];
    for (int j = 0; j < g.Nt; ++j) {
      const std::size_t k = g.idx(i, j);
      cplx kin = 0.0;
      if (i > 0) kin += g.radial.a[i - 1] * (psi.values[k] - psi.values[g.idx(i - 1, j)]);
      if (i + 1 < g.Nr) kin += g.radial.a[i] * (psi.values[k] - psi.values[g.idx(i + 1, j)]);
      out[k] += kin / wi + q2 * std::norm(psi.values[k]) * psi.values[k];
    }
  });
}

std::vector<double> profile_on_rows(const PolarGrid& grid, const RadialProfile& p) {
  const RadialGrid& pr = p.grid;
  std::vector<double> g(grid.Nr);
  for (int i = 0; i < grid.Nr; ++i) {
    const double s = grid.radial.s[i];
    if (s < pr.s.front() - 1e-12 || s > 1.0 + 1e-12)
      throw ParameterError("grid mismatch: row outside the profile domain");
    const double t = (s - pr.s0) / pr.ds;
    const int k = std::clamp(static_cast<int>(std::lround(t)), 0, pr.n - 1);
    if (std::fabs(pr.s[k] - s) <= 1e-12) {
      g[i] = p.g[k];
    } else {
      const int l = std::clamp(static_cast<int>(std::floor(t)), 0, pr.n - 2);
      const double th = (s - pr.s[l]) / pr.ds;
      g[i] = p.g[l] + th * (p.g[l + 1] - p.g[l]);
    }
  }
  return g;
}

DiscField decompose_u(const DiscField& psi, const RadialProfile& p) {
  const int i0 = std::max(annulus_start(psi.grid.radial, p.reg.R_less),
                          annulus_start(psi.grid.radial, p.grid.r_inner()));
  DiscField u;
  u.grid = sub_grid(psi.grid, i0);
  u.kind = FieldKind::U;
  const auto g = profile_on_rows(u.grid, p);
  for (double x : g)
    if (!(x > 1e-300)) throw ParameterError("decompose_u: degenerate profile (g vanishes on the annulus)");
  const double n = static_cast<double>(p.hat_Omega);
  u.values.resize(u.grid.size());
  for (int i = 0; i < u.grid.Nr; ++i)
    for (int j = 0; j < u.grid.Nt; ++j) {
      const cplx ph = std::polar(1.0, -n * u.grid.theta[j]);
      u.at(i, j) = psi.at(i0 + i, j) * ph / g[i];
    }
  return u;
}

DiscField recompose_psi(const DiscField& u, const RadialProfile& p) {
  DiscField psi;
  psi.grid = u.grid;
  psi.kind = FieldKind::Psi;
  const auto g = profile_on_rows(u.grid, p);
  const double n = static_cast<double>(p.hat_Omega);
  psi.values.resize(u.grid.size());
  for (int i = 0; i < u.grid.Nr; ++i)
    for (int j = 0; j < u.grid.Nt; ++j) psi.at(i, j) = g[i] * u.at(i, j) * std::polar(1.0, n * u.grid.theta[j]);
  return psi;
}

ReducedParts reduced_energy_parts(const DiscField& u, const RadialProfile& p, AngularDiff mode) {
  const PolarGrid& G = u.grid;
  const auto g = profile_on_rows(G, p);
  const auto du = angular_derivative(u, mode);
  const double n = static_cast<double>(p.hat_Omega);
  ReducedParts e;
  e.kinetic = weighted_kinetic(u, g, du);
  std::vector<double> rows(G.Nr, 0.0);
  for (int i = 0; i < G.Nr; ++i) {
    double acc = 0.0;
    for (int j = 0; j < G.Nt; ++j) {
      const std::size_t k = G.idx(i, j);
      acc += std::imag(std::conj(u.values[k]) * du[k]);
    }
    rows[i] = -2.0 * G.node_weight(i) * g[i] * g[i] * (p.reg.Omega - n / G.radial.s[i]) * acc;
  }
  e.rotation = ordered_sum(rows);
  e.quartic = weighted_quartic(u, g, p.reg.epsilon);
  e.total = e.kinetic + e.rotation + e.quartic;
  return e;
}

double reduced_energy(const DiscField& u, const RadialProfile& p, const Regime& reg, AngularDiff mode) {
  check_same_regime(reg, p.reg);
  return reduced_energy_parts(u, p, mode).total;
}

std::vector<double> vorticity_density(const DiscField& u) {
  const PolarGrid& G = u.grid;
  const auto dt = angular_derivative(u);
  const auto ds = radial_derivative_s(u);
  DiscField J, K;
  J.grid = K.grid = G;
  J.values.resize(G.size());
  K.values.resize(G.size());
  for (std::size_t k = 0; k < G.size(); ++k) {
    J.values[k] = std::imag(std::conj(u.values[k]) * dt[k]);
    K.values[k] = std::imag(std::conj(u.values[k]) * ds[k]);
  }
  const auto dJ = radial_derivative_s(J);
  const auto dK = angular_derivative(K);
  std::vector<double> out(G.size());
  for (std::size_t k = 0; k < G.size(); ++k) out[k] = 2.0 * (dJ[k].real() - dK[k].real());
  return out;
}

std::vector<double> plaquette_vorticity(const DiscField& u, bool regularized) {
  const PolarGrid& G = u.grid;
  std::vector<double> er, et;
  edge_currents(u, regularized, er, et);
  std::vector<double> out(static_cast<std::size_t>(G.Nr - 1) * G.Nt);
  for (int i = 0; i + 1 < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const int jp = (j + 1) % G.Nt;
      out[G.idx(i, j)] = er[G.idx(i, j)] + et[G.idx(i + 1, j)] - er[G.idx(i, jp)] - et[G.idx(i, j)];
    }
  return out;
}

double ring_phase_circulation(const DiscField& u, int i, bool regularized) {
  const PolarGrid& G = u.grid;
  std::vector<double> er, et;
  edge_currents(u, regularized, er, et);
  double t = 0.0;
  for (int j = 0; j < G.Nt; ++j) t += et[G.idx(i, j)];
  return t;
}

double ring_circulation(const DiscField& u, int i) {
  const PolarGrid& G = u.grid;
  const auto dt = angular_derivative(u);
  double t = 0.0;
  for (int j = 0; j < G.Nt; ++j) {
    const std::size_t k = G.idx(i, j);
    t += std::imag(std::conj(u.values[k]) * dt[k]);
  }
  return t * G.dtheta;
}

FFormParts f_form_energy(const DiscField& u, const CostCurve& curve, const RadialProfile& p) {
  const PolarGrid& G = u.grid;
  if (static_cast<int>(curve.radii.size()) != G.Nr) throw ParameterError("f_form_energy: curve does not match grid");
  for (int i = 0; i < G.Nr; ++i)
    if (std::fabs(curve.radii[i] - G.radial.r[i]) > 1e-12)
      throw ParameterError("f_form_energy: curve radii do not match grid rows");
  if (curve.hat_Omega != p.hat_Omega) throw ParameterError("f_form_energy: curve built from another profile");

  const auto g = profile_on_rows(G, p);
  const auto du = angular_derivative(u);
  FFormParts e;
  e.kinetic = weighted_kinetic(u, g, du);
  const auto curl = vorticity_density(u);
  std::vector<double> rows(G.Nr, 0.0);
  for (int i = 0; i < G.Nr; ++i) {
    double acc = 0.0;
    for (int j = 0; j < G.Nt; ++j) acc += curl[G.idx(i, j)];
    rows[i] = G.node_weight(i) * curve.F[i] * acc;
  }
  e.vorticity = ordered_sum(rows);
  e.bulk = e.kinetic + e.vorticity;
  e.boundary = -curve.F.back() * ring_circulation(u, G.Nr - 1);
  e.quartic = weighted_quartic(u, g, p.reg.epsilon);
  e.total = e.bulk + e.boundary + e.quartic;
  return e;
}

LocalEnergy local_f_energy(const DiscField& u, const RadialProfile& p) {
  const PolarGrid& G = u.grid;
  const auto g = profile_on_rows(G, p);
  const auto du = angular_derivative(u);
  const double q = 1.0 / (p.reg.epsilon * p.reg.epsilon);
  LocalEnergy le;
  le.kinetic.assign(G.size(), 0.0);
  le.quartic.assign(G.size(), 0.0);
  for (int i = 0; i < G.Nr; ++i) {
    const double wi = G.node_weight(i);
    const double ang = wi * g[i] * g[i] / G.radial.s[i];
    const double g4 = g[i] * g[i] * g[i] * g[i];
    for (int j = 0; j < G.Nt; ++j) {
      const std::size_t k = G.idx(i, j);
      le.kinetic[k] += ang * std::norm(du[k]);
      const double d = 1.0 - std::norm(u.values[k]);
      le.quartic[k] = wi * q * g4 * d * d;
    }
    if (i + 1 < G.Nr) {
      const double ce = G.radial.a[i] / G.Nt * 0.5 * (g[i] * g[i] + g[i + 1] * g[i + 1]);
      for (int j = 0; j < G.Nt; ++j) {
        const double eij = ce * std::norm(u.at(i + 1, j) - u.at(i, j));
        le.kinetic[G.idx(i, j)] += 0.5 * eij;
        le.kinetic[G.idx(i + 1, j)] += 0.5 * eij;
      }
    }
  }
  return le;
}

}  // namespace gpv
