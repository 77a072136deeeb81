#include "doctest.h"

#include <cmath>
#include <random>

#include "gpvortex/cost.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/field2d.hpp"
#include "synthetic.hpp"

using namespace gpv;

namespace {

struct DiscSetup {
  Regime reg;
  RadialProfile p;
  PolarGrid G;
};

DiscSetup disc_setup(double eps, double w0, int Nr, int Nt) {
  DiscSetup s;
  s.reg = make_regime(eps, w0);
  const RadialGrid rg = make_disc_grid(Nr);
  s.p = optimize_phase(s.reg, rg).profile;
  s.G = make_polar_grid(rg, Nt);
  return s;
}

// Smooth nonvanishing test field with a few low angular modes.
DiscField smooth_u(const PolarGrid& G, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.2);
  double c[6];
  for (double& x : c) x = nd(rng);
  return make_field(G, FieldKind::U, [&](double r, double t) {
    return cplx(1.0 + c[0] * r * r * std::cos(t) + c[1] * std::sin(2 * t) * r * r,
                c[2] * r * r * r * std::cos(3 * t) + c[3] * r * r + c[4] * std::sin(t) * r + c[5] * std::cos(2 * t));
  });
}

// |gp_energy(g u e^{i n theta}) - E_hat - reduced_energy(u)| / |E_hat| with u rescaled so psi has unit norm.
double splitting_error(const DiscSetup& s, DiscField u) {
  DiscField psi = recompose_psi(u, s.p);
  const double sc = 1.0 / std::sqrt(field_norm2(psi));
  for (auto& x : psi.values) x *= sc;
  for (auto& x : u.values) x *= sc;
  const double E = gp_energy(psi, s.reg);
  return std::fabs(E - s.p.energy - reduced_energy(u, s.p, s.reg)) / std::fabs(s.p.energy);
}

}  // namespace

TEST_CASE("polar grid invariants") {
  const PolarGrid G = make_disc_polar_grid(64, 128, 1e-3);
  CHECK(G.Nr == 64);
  CHECK(G.Nt == 128);
  CHECK(G.dtheta == doctest::Approx(2 * kPi / 128).epsilon(1e-15));
  CHECK(std::fabs(G.total_weight() - kPi * (1.0 - 1e-6)) < 1e-12);
  CHECK(G.r0() == doctest::Approx(1e-3));
  CHECK_THROWS_AS(make_disc_polar_grid(64, 127), ParameterError);
  CHECK_THROWS_AS(make_disc_polar_grid(64, 6), ParameterError);
  const PolarGrid S = sub_grid(G, 40);
  CHECK(S.Nr == 24);
  CHECK(S.radial.r.front() == G.radial.r[40]);
  CHECK_THROWS_AS(sub_grid(G, 60), ParameterError);
}

TEST_CASE("GP energy of a constant field") {
  const Regime reg = make_regime(0.05, 0.3);
  const PolarGrid G = make_disc_polar_grid(128, 64, 1e-3);
  const double A = kPi * (1.0 - 1e-6);
  const DiscField psi = make_field(G, FieldKind::Psi, [&](double, double) { return cplx(1.0 / std::sqrt(A), 0.0); });
  const GpEnergyParts e = gp_energy_parts(psi, reg);
  CHECK(e.radial == 0.0);
  CHECK(e.angular == 0.0);
  CHECK(e.rotation == 0.0);
  CHECK(gp_energy(psi, reg) == doctest::Approx(1.0 / (0.05 * 0.05 * A)).epsilon(1e-12));
  CHECK(gp_energy(psi, reg) == doctest::Approx(1.0 / (0.05 * 0.05 * kPi)).epsilon(2e-6));
}

TEST_CASE("GP energy rejects unnormalized or non-psi fields") {
  const Regime reg = make_regime(0.05, 0.3);
  const PolarGrid G = make_disc_polar_grid(32, 16);
  DiscField f = make_field(G, FieldKind::Psi, [](double, double) { return cplx(1.0, 0.0); });
  CHECK_THROWS_AS(gp_energy(f, reg), ParameterError);
  normalize_field(f);
  CHECK_NOTHROW(gp_energy(f, reg));
  f.kind = FieldKind::U;
  CHECK_THROWS_AS(gp_energy(f, reg), ParameterError);
  DiscField z = make_field(G, FieldKind::Psi, [](double, double) { return cplx(0.0, 0.0); });
  CHECK_THROWS_AS(normalize_field(z), NumericalError);
}

TEST_CASE("giant-vortex ansatz reproduces the radial energy") {
  const DiscSetup s = disc_setup(0.05, 0.3, 256, 256);
  const double n = static_cast<double>(s.p.hat_Omega);
  DiscField psi = make_field(s.G, FieldKind::Psi, [&](double r, double t) {
    return profile_value(s.p, r) * std::polar(1.0, n * t);
  });
  CHECK(field_norm2(psi) == doctest::Approx(1.0).epsilon(1e-10));
  const double E = gp_energy(psi, s.reg);
  CHECK(std::fabs(E - s.p.energy) <= 1e-6 * std::fabs(s.p.energy));

  // a global phase leaves the energy unchanged
  DiscField rot = psi;
  for (auto& x : rot.values) x *= std::polar(1.0, 0.7);
  CHECK(gp_energy(rot, s.reg) == doctest::Approx(E).epsilon(1e-14));
}

TEST_CASE("GP energy converges under refinement for the giant-vortex ansatz") {
  // energy of the ansatz on the finest profile grid, evaluated on coarser 2-D grids
  const Regime reg = make_regime(0.05, 0.3);
  const RadialProfile ref = minimize_profile(reg, 8, make_disc_grid(4097));
  const double n = static_cast<double>(ref.hat_Omega);
  std::vector<double> err;
  for (int Nr : {129, 257, 513}) {
    const PolarGrid G = make_disc_polar_grid(Nr, 256);
    DiscField psi = make_field(G, FieldKind::Psi, [&](double r, double t) {
      return profile_value(ref, r) * std::polar(1.0, n * t);
    });
    normalize_field(psi);
    err.push_back(std::fabs(gp_energy(psi, reg) - ref.energy));
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.8);
}

TEST_CASE("decomposition and recomposition") {
  const DiscSetup s = disc_setup(0.05, 0.3, 128, 256);
  const double n = static_cast<double>(s.p.hat_Omega);
  const DiscField psi = make_field(s.G, FieldKind::Psi, [&](double r, double t) {
    return profile_value(s.p, r) * std::polar(1.0, n * t);
  });
  const DiscField u = decompose_u(psi, s.p);
  CHECK(u.kind == FieldKind::U);
  CHECK(u.grid.radial.r.front() >= s.reg.R_less - 1e-12);
  double dev = 0.0;
  for (const auto& x : u.values) dev = std::max(dev, std::abs(x - cplx(1.0, 0.0)));
  CHECK(dev <= 1e-13);

  const DiscField back = recompose_psi(u, s.p);
  const int i0 = s.G.Nr - u.grid.Nr;
  double err = 0.0;
  for (int i = 0; i < u.grid.Nr; ++i)
    for (int j = 0; j < s.G.Nt; ++j) err = std::max(err, std::abs(back.at(i, j) - psi.at(i0 + i, j)));
  CHECK(err <= 1e-14);

  RadialProfile dead = s.p;
  for (double& x : dead.g) x = 0.0;
  CHECK_THROWS_AS(decompose_u(psi, dead), ParameterError);
}

TEST_CASE("planted vortex shows up as a unit plaquette winding of u") {
  const DiscSetup s = disc_setup(0.05, 0.3, 256, 512);
  const double n = static_cast<double>(s.p.hat_Omega);
  const std::vector<synth::Planted> v{{0.92, 0.3, 1}};
  const DiscField psi = make_field(s.G, FieldKind::Psi, [&](double r, double t) {
    return profile_value(s.p, r) * synth::vortex_product(v, 0.02, r, t) * std::polar(1.0, n * t);
  });
  const DiscField u = decompose_u(psi, s.p);
  const auto w = plaquette_vorticity(u, false);
  int ones = 0, others = 0;
  for (double x : w) {
    const long k = std::lround(x / (2 * kPi));
    CHECK(std::fabs(x - 2 * kPi * k) < 1e-9);
    if (k == 1) ++ones;
    else if (k != 0) ++others;
  }
  CHECK(ones == 1);
  CHECK(others == 0);
}

TEST_CASE("reduced energy: trivial and single-winding fields") {
  const DiscSetup s = disc_setup(0.05, 0.3, 256, 128);
  const PolarGrid A = sub_grid(s.G, annulus_start(s.G.radial, s.reg.R_less));
  const DiscField one = make_field(A, FieldKind::U, [](double, double) { return cplx(1.0, 0.0); });
  CHECK(reduced_energy(one, s.p, s.reg) == 0.0);

  const DiscField e1 = make_field(A, FieldKind::U, [](double, double t) { return std::polar(1.0, t); });
  const auto g = profile_on_rows(A, s.p);
  const double n = static_cast<double>(s.p.hat_Omega);
  double ref = 0.0;
  for (int i = 0; i < A.Nr; ++i) {
    const double si = A.radial.s[i];
    ref += A.radial.w[i] * g[i] * g[i] * (1.0 / si - 2.0 * (s.reg.Omega - n / si));
  }
  CHECK(reduced_energy(e1, s.p, s.reg) == doctest::Approx(ref).epsilon(1e-10));

  const Regime other = make_regime(0.05, 0.35);
  CHECK_THROWS_AS(reduced_energy(one, s.p, other), ParameterError);
}

TEST_CASE("energy splitting identity converges at second order") {
  std::vector<double> err;
  for (int Nr : {64, 128, 256}) {
    const DiscSetup s = disc_setup(0.05, 0.3, Nr, 2 * Nr);
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) worst = std::max(worst, splitting_error(s, smooth_u(s.G, seed)));
    err.push_back(worst);
  }
  CHECK(err.back() < 1e-6);
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.8);
}

TEST_CASE("all evaluators are invariant under a global phase") {
  const DiscSetup s = disc_setup(0.05, 0.3, 128, 128);
  const CostCurve c = cost_H(s.p, potential_F(s.p));
  const PolarGrid A = sub_grid(s.G, c.first_node);
  const DiscField u = smooth_u(A, 9);
  DiscField v = u;
  for (auto& x : v.values) x *= std::polar(1.0, -1.3);
  CHECK(reduced_energy(v, s.p, s.reg) == doctest::Approx(reduced_energy(u, s.p, s.reg)).epsilon(1e-13));
  CHECK(f_form_energy(v, c, s.p).total == doctest::Approx(f_form_energy(u, c, s.p).total).epsilon(1e-13));
}

TEST_CASE("F-form energy") {
  std::vector<double> err_one_winding, err_smooth;
  for (int Nr : {64, 128, 256}) {
    const DiscSetup s = disc_setup(0.05, 0.3, Nr, 2 * Nr);
    const CostCurve c = cost_H(s.p, potential_F(s.p));
    CHECK(c.F.front() == 0.0);
    const PolarGrid A = sub_grid(s.G, c.first_node);

    const DiscField one = make_field(A, FieldKind::U, [](double, double) { return cplx(1.0, 0.0); });
    const FFormParts z = f_form_energy(one, c, s.p);
    CHECK(z.bulk == 0.0);
    CHECK(z.boundary == 0.0);
    CHECK(z.quartic == 0.0);

    const DiscField e1 = make_field(A, FieldKind::U, [](double, double t) { return std::polar(1.0, t); });
    CHECK(std::fabs(ring_circulation(e1, A.Nr - 1) - 2 * kPi) <= 1e-12);
    const double red1 = reduced_energy(e1, s.p, s.reg);
    err_one_winding.push_back(std::fabs(f_form_energy(e1, c, s.p).total - red1) / std::fabs(red1));

    const DiscField u = smooth_u(A, 4);
    const double red = reduced_energy(u, s.p, s.reg);
    err_smooth.push_back(std::fabs(f_form_energy(u, c, s.p).total - red) / std::fabs(red));
  }
  for (std::size_t k = 1; k < err_smooth.size(); ++k) {
    CHECK(std::log2(err_one_winding[k - 1] / err_one_winding[k]) >= 1.8);
    CHECK(std::log2(err_smooth[k - 1] / err_smooth[k]) >= 1.8);
  }
}

TEST_CASE("F-form rejects mismatched curves") {
  const DiscSetup s = disc_setup(0.05, 0.3, 64, 32);
  const CostCurve c = potential_F(s.p);
  const DiscField u = make_field(s.G, FieldKind::U, [](double, double) { return cplx(1.0, 0.0); });
  CHECK_THROWS_AS(f_form_energy(u, c, s.p), ParameterError);
}

TEST_CASE("vorticity of a planted vortex weights F at its centre") {
  const DiscSetup s = disc_setup(0.05, 0.3, 512, 1024);
  const CostCurve c = cost_H(s.p, potential_F(s.p));
  const PolarGrid A = sub_grid(s.G, c.first_node);
  const double a = 0.93;
  const DiscField u = synth::planted_u(A, {{a, 1.0, 1}}, 0.005);
  const FFormParts f = f_form_energy(u, c, s.p);
  // F at the vortex centre by linear interpolation in s
  std::size_t k = 0;
  while (c.radii[k + 1] < a) ++k;
  const double t = (a * a - c.radii[k] * c.radii[k]) / (c.radii[k + 1] * c.radii[k + 1] - c.radii[k] * c.radii[k]);
  const double Fa = c.F[k] + t * (c.F[k + 1] - c.F[k]);
  CHECK(f.vorticity == doctest::Approx(2 * kPi * Fa).epsilon(0.1));
}

TEST_CASE("discrete Stokes: plaquette vorticity telescopes to ring circulations") {
  const PolarGrid G = sub_grid(make_disc_polar_grid(96, 128), 40);
  const DiscField u = synth::planted_u(G, {{0.7, 0.5, 1}, {0.85, 2.5, -1}, {0.6, 4.0, 2}}, 0.03);
  for (bool reg : {false, true}) {
    const auto w = plaquette_vorticity(u, reg);
    for (int i0 : {0, 10}) {
      for (int i1 : {20, G.Nr - 1}) {
        double sum = 0.0;
        for (int i = i0; i < i1; ++i)
          for (int j = 0; j < G.Nt; ++j) sum += w[G.idx(i, j)];
        CHECK(sum == doctest::Approx(ring_phase_circulation(u, i1, reg) - ring_phase_circulation(u, i0, reg)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("ring circulation of a pure winding") {
  const PolarGrid G = make_disc_polar_grid(32, 64);
  for (int d : {-3, 1, 5}) {
    const DiscField u = make_field(G, FieldKind::U, [d](double, double t) { return std::polar(1.0, d * t); });
    CHECK(std::fabs(ring_circulation(u, G.Nr - 1) - 2 * kPi * d) <= 1e-12);
    CHECK(std::fabs(ring_phase_circulation(u, G.Nr - 1) - 2 * kPi * d) <= 1e-12);
  }
}

TEST_CASE("local energy densities sum to the global terms") {
  const DiscSetup s = disc_setup(0.05, 0.3, 128, 128);
  const PolarGrid A = sub_grid(s.G, annulus_start(s.G.radial, s.reg.R_less));
  const DiscField u = synth::planted_u(A, {{0.9, 0.0, 1}}, 0.02);
  const LocalEnergy le = local_f_energy(u, s.p);
  double kin = 0.0, quart = 0.0;
  for (std::size_t k = 0; k < le.kinetic.size(); ++k) {
    kin += le.kinetic[k];
    quart += le.quartic[k];
  }
  const ReducedParts r = reduced_energy_parts(u, s.p);
  CHECK(kin == doctest::Approx(r.kinetic).epsilon(1e-12));
  CHECK(quart == doctest::Approx(r.quartic).epsilon(1e-12));
}

TEST_CASE("central angular differences are a consistent fallback") {
  const DiscSetup s = disc_setup(0.05, 0.3, 128, 1024);
  const double n = static_cast<double>(s.p.hat_Omega);
  const DiscField psi = make_field(s.G, FieldKind::Psi, [&](double r, double t) {
    return profile_value(s.p, r) * std::polar(1.0, n * t);
  });
  const double spectral = gp_energy(psi, s.reg, AngularDiff::Spectral);
  const double cent = gp_energy(psi, s.reg, AngularDiff::Central);
  CHECK(std::fabs(cent - spectral) / std::fabs(spectral) < 1e-2);
}
