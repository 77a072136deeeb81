// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../quad_oracle.hpp"
#include "../synthetic.hpp"
#include "gpvortex/cost.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/field2d.hpp"
#include "gpvortex/io/commands.hpp"
#include "gpvortex/io/manifest.hpp"
#include "gpvortex/profile1d.hpp"
#include "gpvortex/regime_tf.hpp"
#include "gpvortex/solver2d.hpp"
#include "gpvortex/vortex.hpp"

using namespace gpv;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, one block per criterion.
constexpr double kTfRel = 1e-9;               // 1
constexpr double kTfRuntime = 1.0;
constexpr double kNewtonResidual = 1e-12;     // 2
constexpr double kExpansionGain = 8.0;
constexpr long kArgminBand = 2;               // 3
constexpr double kPhaseBandC = 3.0;
constexpr double kPhaseRuntime = 60.0;
constexpr double kNeumannOrder = 1.8;         // 5
constexpr double kHoleMass = 1e-8;
constexpr double kSplitRel = 1e-6;            // 6
constexpr double kSplitOrder = 1.8;
constexpr double kSplitRuntime = 300.0;
constexpr double kFFormOrder = 1.8;           // 7
constexpr double kDfOrder = 1.8;
constexpr double kScanAbs = 1e-12;            // 8
constexpr double kSweepRuntime = 1800.0;      // 9
constexpr long kDegreeBand = 2;               // 10
constexpr double kJacobianOrder = 1.5;        // 11
constexpr double kVortexRuntime = 120.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1
// Independent TF solution: mu from the normalization of
// eps^2 (mu + Omega^2 r^2)_+ / 2 by bisection, every integral by adaptive quadrature.
struct TfOracle {
  double mu, R_h, e;
};

TfOracle tf_oracle(double eps, double Omega) {
  const double e2 = eps * eps, O2 = Omega * Omega;
  auto rho = [&](double mu, double r) { return std::max(0.0, 0.5 * e2 * (mu + O2 * r * r)); };
  auto edge = [&](double mu) { return mu < 0.0 ? std::min(1.0, std::sqrt(-mu / O2)) : 0.0; };
  auto mass = [&](double mu) {
    const double R = edge(mu);
    return oracle::disc([&](double r) { return rho(mu, r); }, R > 0.0 && R < 1.0 ? std::vector<double>{R} : std::vector<double>{});
  };
  double lo = -O2, hi = 2.0 / (kPi * e2);  // mass(lo) = 0, mass(hi) >= 1
  for (int k = 0; k < 200 && hi - lo > 1e-15 * std::fabs(hi); ++k) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < 1.0 ? lo : hi) = mid;
  }
  TfOracle o;
  o.mu = 0.5 * (lo + hi);
  o.R_h = edge(o.mu);
  const std::vector<double> br = o.R_h > 0.0 ? std::vector<double>{o.R_h} : std::vector<double>{};
  o.e = oracle::disc([&](double r) {
    const double p = rho(o.mu, r);
    return p * p / e2 - O2 * r * r * p;
  }, br);
  return o;
}

const std::vector<double> kEps1{0.01, 0.02, 0.05, 0.08};
const std::vector<double> kW1{0.15, 0.2122, 0.25, 0.35};

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string where;
  auto track = [&](double err, const std::string& what) {
    if (!(err <= worst)) {
      worst = err;
      where = what;
    }
  };
  for (double eps : kEps1)
    for (double w0 : kW1) {
      const Regime reg = make_regime(eps, w0, HolePolicy::Allow);
      const TfReport rep = tf_report(reg);
      const TfOracle o = tf_oracle(eps, reg.Omega);
      const std::string tag = "(" + sci(eps) + "," + sci(w0) + ")";
      track(oracle::rel_err(rep.e_tf, o.e), "E_TF " + tag);
      track(oracle::rel_err(rep.mu_tf, o.mu), "mu_TF " + tag);
      track(o.R_h == 0.0 ? std::fabs(reg.R_h) : oracle::rel_err(reg.R_h, o.R_h), "R_h " + tag);
      const std::vector<double> br = reg.R_h > 0.0 ? std::vector<double>{reg.R_h} : std::vector<double>{};
      track(std::fabs(oracle::disc([&](double r) { return tf_density(reg, r); }, br) - 1.0), "rho_TF mass " + tag);

      const HatTfReport h = hat_tf_solve(reg, std::lround(omega_tf(reg)));
      const double n = static_cast<double>(h.hat_Omega), e2 = eps * eps;
      const double hat_e = oracle::disc(
          [&](double r) {
            if (r <= 0.0) return 0.0;
            const double p = hat_tf_density(reg, h, r);
            return (n * n / (r * r) - 2.0 * reg.Omega * n) * p + p * p / e2;
          },
          {h.hat_R});
      track(oracle::rel_err(h.hat_e, hat_e), "hat E_TF " + tag);
    }
  const double t = seconds_since(t0);
  return {worst <= kTfRel && t < kTfRuntime,
          "max rel err " + sci(worst) + " at " + where + " (tol " + sci(kTfRel) + "), " + sci(t) + " s (limit 1 s)"};
}

// ---------------------------------------------------------------- 2
Outcome criterion2() {
  double worst_res = 0.0;
  std::size_t scanned = 0;
  for (double eps : kEps1)
    for (double w0 : kW1) {
      const Regime reg = make_regime(eps, w0, HolePolicy::Allow);
      const auto [lo, hi] = default_omega_bracket(reg);
      for (const auto& row : hat_tf_scan(reg, lo, hi).rows) {
        worst_res = std::max(worst_res, row.residual);
        ++scanned;
      }
    }
  std::vector<double> err;
  for (double eps : {0.002, 0.001, 0.0005}) {
    const Regime reg = make_regime(eps, 0.25);
    const HatTfReport rep = hat_tf_solve(reg, std::lround(omega_tf(reg)));
    err.push_back(oracle::rel_err(hat_tf_delta_expansion(eps, rep.hat_Omega), rep.delta));
  }
  const double g1 = err[0] / err[1], g2 = err[1] / err[2];
  const bool ok = worst_res <= kNewtonResidual && g1 >= kExpansionGain && g2 >= kExpansionGain;
  return {ok, "Newton residual max " + sci(worst_res) + " over " + std::to_string(scanned) +
                  " roots (tol 1e-12); expansion rel err " + sci(err[0]) + " / " + sci(err[1]) + " / " + sci(err[2]) +
                  " at eps 0.002/0.001/0.0005, gains " + sci(g1) + ", " + sci(g2) + " (need >= 8)"};
}

// ---------------------------------------------------------------- 3
Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  long worst_argmin = 0;
  for (double eps : {0.05, 0.03, 0.02, 0.01, 0.005})
    for (double w0 : {0.25, 0.3, 0.35}) {
      const Regime reg = make_regime(eps, w0);
      const auto [lo, hi] = default_omega_bracket(reg);
      worst_argmin = std::max(worst_argmin, std::labs(hat_tf_scan(reg, lo, hi).argmin - std::lround(omega_tf(reg))));
    }
  bool band = true;
  std::ostringstream d;
  for (double eps : {0.05, 0.02}) {
    const Regime reg = make_regime(eps, 0.3);
    const PhaseResult ph = optimize_phase(reg, make_annulus_grid(reg, 2048));
    const double wtf = omega_tf(reg), width = kPhaseBandC * wtf / std::sqrt(reg.log_eps);
    band = band && std::fabs(ph.omega_star - wtf) <= width;
    d << "; eps " << eps << ": omega* " << ph.omega_star << " vs " << sci(wtf) << " +- " << sci(width);
  }
  const double t = seconds_since(t0);
  return {worst_argmin <= kArgminBand && band && t < kPhaseRuntime,
          "hat-TF argmin off by at most " + std::to_string(worst_argmin) + " (band 2)" + d.str() + ", " + sci(t) + " s"};
}

// ---------------------------------------------------------------- 4
Outcome criterion4() {
  const Regime reg = make_regime(0.02, 0.25);
  const double e_tf = tf_report(reg).e_tf;
  const RadialGrid gr = make_disc_grid(4096);
  const auto [lo, hi] = default_omega_bracket(reg);
  const HatTfScan scan = hat_tf_scan(reg, lo, hi);
  int violations = 0;
  double min_gap = 1e300;
  for (const auto& row : scan.rows) {
    const double gp = minimize_profile(reg, row.omega, gr).energy;
    if (!(e_tf <= row.hat_e && row.hat_e <= gp)) ++violations;
    min_gap = std::min(min_gap, gp - row.hat_e);
  }
  std::vector<double> rel;
  for (double eps : {0.05, 0.02, 0.01}) {
    const Regime r = make_regime(eps, 0.25);
    const long w = std::lround(omega_tf(r));
    const double gap = minimize_profile(r, w, make_disc_grid(4096)).energy - hat_tf_solve(r, w).hat_e;
    rel.push_back(gap / std::fabs(tf_report(r).e_tf));
  }
  const bool shrinking = rel[0] > 0 && rel[1] > 0 && rel[2] > 0 && rel[1] < rel[0] && rel[2] < rel[1];
  return {violations == 0 && shrinking,
          std::to_string(scan.rows.size()) + " omegas [" + std::to_string(lo) + "," + std::to_string(hi) +
              "], sandwich violations " + std::to_string(violations) + ", min gap " + sci(min_gap) +
              "; (E_GP - E_TF_hat)/|E_TF| at eps 0.05/0.02/0.01: " + sci(rel[0]) + " / " + sci(rel[1]) + " / " +
              sci(rel[2])};
}

// ---------------------------------------------------------------- 5
Outcome criterion5() {
  const Regime reg = make_regime(0.02, 0.25);
  const PhaseResult ph = optimize_phase(reg, make_disc_grid(4096));
  const ProfileValidation v = validate_profile(ph.profile, reg);
  const double hole = inner_mass(ph.profile, reg.R_h - std::pow(reg.epsilon, 7.0 / 6.0));

  const Regime r5 = make_regime(0.05, 0.3);
  std::vector<double> outer, inner;
  for (int n : {256, 512, 1024, 2048}) {
    const RadialProfile p = minimize_profile(r5, 8, make_annulus_grid(r5, n));
    outer.push_back(std::fabs(neumann_residual_outer(p)));
    inner.push_back(std::fabs(neumann_residual_inner(p)));
  }
  double order = 1e300;
  for (std::size_t k = 1; k < outer.size(); ++k)
    order = std::min({order, std::log2(outer[k - 1] / outer[k]), std::log2(inner[k - 1] / inner[k])});
  const bool ok = v.monotonicity_violations == 0 && order >= kNeumannOrder && hole <= kHoleMass;
  return {ok, "monotonicity violations " + std::to_string(v.monotonicity_violations) + "; Neumann order min " +
                  sci(order) + " (need 1.8); hole mass " + sci(hole) + " (tol 1e-8) at omega* " +
                  std::to_string(ph.omega_star)};
}

// ---------------------------------------------------------------- 6, 7
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

double splitting_error(const DiscSetup& s, DiscField u) {
  DiscField psi = recompose_psi(u, s.p);
  const double sc = 1.0 / std::sqrt(field_norm2(psi));
  for (auto& x : psi.values) x *= sc;
  for (auto& x : u.values) x *= sc;
  return std::fabs(gp_energy(psi, s.reg) - s.p.energy - reduced_energy(u, s.p, s.reg)) / std::fabs(s.p.energy);
}

double min_order(const std::vector<double>& e) {
  double o = 1e300;
  for (std::size_t k = 1; k < e.size(); ++k) o = std::min(o, std::log2(e[k - 1] / e[k]));
  return o;
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> worst;
  for (int Nr : {128, 256, 512}) {
    const DiscSetup s = disc_setup(0.05, 0.3, Nr, 2 * Nr);
    double w = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) w = std::max(w, splitting_error(s, smooth_u(s.G, seed)));
    worst.push_back(w);
  }
  const double order = min_order(worst), t = seconds_since(t0);
  return {worst.back() <= kSplitRel && order >= kSplitOrder && t < kSplitRuntime,
          "max rel err over 5 fields " + sci(worst[0]) + " / " + sci(worst[1]) + " / " + sci(worst.back()) +
              " at 128x256/256x512/512x1024 (tol 1e-6), order " + sci(order) + " (need 1.8), " + sci(t) + " s"};
}

Outcome criterion7() {
  std::vector<double> e_wind, e_smooth;
  bool f_zero = true;
  double split = 0.0;
  for (int Nr : {64, 128, 256}) {
    const DiscSetup s = disc_setup(0.05, 0.3, Nr, 2 * Nr);
    const CostCurve c = cost_H(s.p, potential_F(s.p));
    f_zero = f_zero && c.F.front() == 0.0;
    const PolarGrid A = sub_grid(s.G, c.first_node);
    const DiscField e1 = make_field(A, FieldKind::U, [](double, double t) { return std::polar(1.0, t); });
    const DiscField u = smooth_u(A, 4);
    for (const auto* f : {&e1, &u}) {
      const FFormParts parts = f_form_energy(*f, c, s.p);
      split = std::max(split, std::fabs(parts.bulk + parts.boundary + parts.quartic - parts.total) /
                                  std::max(1.0, std::fabs(parts.total)));
      const double red = reduced_energy(*f, s.p, s.reg);
      (f == &e1 ? e_wind : e_smooth).push_back(std::fabs(parts.total - red) / std::fabs(red));
    }
  }
  const Regime reg = make_regime(0.05, 0.3);
  std::vector<double> e_df;
  for (int n : {512, 1024, 2048, 4096}) {
    const CostCurve c = potential_F(minimize_profile(reg, 8, make_annulus_grid(reg, n)));
    const auto d = dF_dr(c);
    double e = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double ref = 2.0 * c.g2[i] * c.B[i];
      e = std::max(e, std::fabs(d[i] - ref));
      scale = std::max(scale, std::fabs(ref));
    }
    e_df.push_back(e / scale);
  }
  const double o1 = min_order(e_wind), o2 = min_order(e_smooth), o3 = min_order(e_df);
  const bool ok = f_zero && o1 >= kFFormOrder && o2 >= kFFormOrder && o3 >= kDfOrder && split <= 1e-12;
  return {ok, "F-form vs reduced order " + sci(o1) + " (e^{i theta}), " + sci(o2) + " (smooth u), finest rel err " +
                  sci(std::max(e_wind.back(), e_smooth.back())) + "; F(R_<) = 0 " + (f_zero ? "exactly" : "NOT exactly") +
                  "; dF/dr order " + sci(o3) + " (need 1.8)"};
}

// ---------------------------------------------------------------- 8
Outcome criterion8() {
  double worst = 0.0;
  for (double w0 : {0.15, 0.2122, 0.25, 0.35}) {
    const Regime reg = make_regime(0.01, w0, HolePolicy::Allow);
    const int N = 1 << 22;
    const double zmax = 2.0 / kSqrtPi;
    double best = 1e300;
    for (int k = 0; k <= N; ++k) best = std::min(best, tf_cost(reg, zmax * k / N));
    worst = std::max(worst, std::fabs(best - (3.0 * w0 - 2.0 / kPi)));
  }
  const Regime hi = make_regime(0.05, 0.30);
  const PhaseResult ph = optimize_phase(hi, make_annulus_grid(hi, 2048));
  const double h_min = cost_H(ph.profile, potential_F(ph.profile)).h_min;
  const double tf_low = tf_cost_bulk_min(make_regime(0.05, 0.10, HolePolicy::Allow));

  std::vector<std::pair<double, double>> family;
  for (double eps : {0.05, 0.02})
    for (double w0 : {0.08, 0.10, 0.12, 0.15, 0.2122, 0.25, 0.30, 0.35}) family.emplace_back(eps, w0);
  int checked = 0, disagree = 0;
  for (const auto& row : critical_scan(family, 1024)) {
    if (std::fabs(3.0 * row.omega0 - 2.0 / kPi) < kCriticalMargin) continue;
    ++checked;
    disagree += !row.agree;
  }
  const bool ok = worst <= kScanAbs && h_min > 0.0 && tf_low < 0.0 && disagree == 0;
  return {ok, "dense-scan error " + sci(worst) + " (tol 1e-12); min bulk H at (0.05,0.30) " + sci(h_min) +
                  "; min H_TF at (0.05,0.10) " + sci(tf_low) + "; sign disagreements " + std::to_string(disagree) +
                  "/" + std::to_string(checked)};
}

// ---------------------------------------------------------------- 9, 10
struct SweepShared {
  std::optional<SolveResult> at_035;
};

long bulk_count(const DiscField& psi, const Regime& reg) {
  const RadialProfile p = optimize_phase(reg, psi.grid.radial).profile;
  return static_cast<long>(detect_bulk_vortices(decompose_u(psi, p), reg).size());
}

Outcome criterion9(SweepShared& shared) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> w0s{0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
  std::vector<std::pair<double, double>> family;
  for (double w : w0s) family.emplace_back(0.05, w);
  SweepOptions so;
  so.Nr = 256;
  so.Nt = 512;
  so.solve.init = InitKind::RandomPhase;
  so.solve.seed = 1;
  const auto pts = sweep(family, so);
  std::vector<long> counts;
  std::ostringstream d;
  bool all_ok = true;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!pts[k].ok) {
      all_ok = false;
      counts.push_back(-1);
      d << " " << w0s[k] << ":fail(" << pts[k].error << ")";
      continue;
    }
    const Regime reg = make_regime(0.05, w0s[k], HolePolicy::Allow);
    counts.push_back(bulk_count(pts[k].result.field, reg));
    d << " " << w0s[k] << ":" << counts.back();
    if (w0s[k] == 0.35) shared.at_035 = pts[k].result;
  }
  std::optional<std::pair<double, double>> bracket;
  for (std::size_t k = counts.size(); k-- > 1;) {
    if (counts[k] != 0) break;
    if (counts[k - 1] > 0) {
      bracket = {w0s[k - 1], w0s[k]};
      break;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = all_ok && counts.back() == 0 && counts.front() >= 1 && bracket && t <= kSweepRuntime;
  return {ok, "bulk vortices by Omega0:" + d.str() + "; bracket " +
                  (bracket ? "[" + sci(bracket->first) + ", " + sci(bracket->second) + "]" : std::string("none")) +
                  ", 2/(3 pi) = " + sci(2.0 / (3.0 * kPi)) + ", " + sci(t) + " s"};
}

Outcome criterion10(const SweepShared& shared) {
  const Regime reg = make_regime(0.05, 0.35);
  SolveResult r;
  if (shared.at_035) {
    r = *shared.at_035;
  } else {
    SolveOptions o;
    o.init = InitKind::RandomPhase;
    r = minimize_gp(reg, make_disc_polar_grid(256, 512), o);
  }
  const PhaseResult ph = optimize_phase(reg, r.field.grid.radial);
  const int deg = boundary_degree(r.field, ph.profile);
  const long expect = reg.Omega_int - ph.omega_star;
  DiscField shifted = r.field;
  const PolarGrid& G = shifted.grid;
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) shifted.at(i, j) *= std::polar(1.0, 3.0 * G.theta[j]);
  const int deg3 = boundary_degree(shifted, ph.profile);
  const bool ok = std::labs(deg - expect) <= kDegreeBand && deg3 - deg == 3;
  return {ok, "boundary degree " + std::to_string(deg) + " vs floor(Omega) - omega_opt = " + std::to_string(expect) +
                  " (band 2); after e^{3i theta}: " + std::to_string(deg3)};
}

// ---------------------------------------------------------------- 11
struct Annulus {
  Regime reg;
  RadialProfile p;
  PolarGrid A;
};

Annulus annulus(int Nr, int Nt) {
  Annulus s;
  s.reg = make_regime(0.05, 0.35);
  const RadialGrid rg = make_disc_grid(Nr);
  s.p = optimize_phase(s.reg, rg).profile;
  s.A = sub_grid(make_polar_grid(rg, Nt), annulus_start(rg, s.reg.R_less));
  return s;
}

std::vector<double> bump(const PolarGrid& G, double a, double ta, double r1, double r2) {
  std::vector<double> phi(G.size());
  for (int i = 0; i < G.Nr; ++i)
    for (int j = 0; j < G.Nt; ++j) {
      const double rho = std::abs(std::polar(G.radial.r[i], G.theta[j]) - std::polar(a, ta));
      const double x = std::clamp((rho - r1) / (r2 - r1), 0.0, 1.0);
      phi[G.idx(i, j)] = 1.0 - x * x * (3.0 - 2.0 * x);
    }
  return phi;
}

std::vector<synth::Planted> random_config(std::mt19937_64& rng, int k, double min_sep) {
  std::uniform_real_distribution<double> ur(0.8, 0.95), ut(0.0, 2 * kPi);
  std::vector<synth::Planted> vs;
  while (static_cast<int>(vs.size()) < k) {
    const synth::Planted p{ur(rng), ut(rng), rng() % 2 ? 1 : -1};
    bool far = true;
    for (const auto& q : vs) far = far && std::abs(std::polar(p.r, p.theta) - std::polar(q.r, q.theta)) >= min_sep;
    if (far) vs.push_back(p);
  }
  return vs;
}

Outcome criterion11() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const Annulus s = annulus(256, 1024);

  int recovered = 0, trials = 0;
  for (int k = 1; k <= 5; ++k)
    for (int rep = 0; rep < 4; ++rep) {
      const auto vs = random_config(rng, k, 0.08);
      const VortexSet found = detect_bulk_vortices(synth::planted_u(s.A, vs, 0.01, synth::Core::Compact), s.reg);
      std::vector<int> want, got;
      for (const auto& v : vs) want.push_back(v.degree);
      for (const auto& b : found.items) got.push_back(b.degree);
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      recovered += want == got;
      ++trials;
    }

  int conserved = 0, merge_trials = 0, merges = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto vs = random_config(rng, 3 + rep % 5, 0.04);
    const DiscField u = synth::planted_u(s.A, vs, 0.015, synth::Core::Compact);
    const CellDecomposition d = cell_decomposition(u, s.p);
    BallOptions bo;
    bo.budget = 0.1;
    const BallResult b = grow_merge_balls(u, s.p, d, bo);
    long planted = 0;
    for (const auto& v : vs) planted += v.degree;
    conserved += b.balls.total_degree() == b.initial_degree_sum && b.initial_degree_sum == planted;
    merges += b.merges;
    ++merge_trials;
  }

  std::vector<double> gaps;
  bool within = true;
  for (int Nr : {256, 512, 1024}) {
    const Annulus a = annulus(Nr, 2 * Nr);
    const DiscField u = synth::planted_u(a.A, {{0.9, 0.4, 1}}, 0.02, synth::Core::Compact);
    const CellDecomposition d = cell_decomposition(u, a.p);
    const BallResult b = grow_merge_balls(u, a.p, d);
    const JacobianComparison jc = jacobian_compare(u, b.balls, bump(a.A, 0.9, 0.4, 0.03, 0.06), a.reg, d.F_total, &d);
    within = within && jc.pass;
    gaps.push_back(jc.gap);
  }
  const double order = min_order(gaps), t = seconds_since(t0);
  const bool ok = recovered == trials && conserved == merge_trials && within && order >= kJacobianOrder &&
                  t < kVortexRuntime;
  return {ok, "recovered " + std::to_string(recovered) + "/" + std::to_string(trials) + " configurations; degree sum conserved " +
                  std::to_string(conserved) + "/" + std::to_string(merge_trials) + " (" + std::to_string(merges) +
                  " merges); jacobian gap " + sci(gaps[0]) + " / " + sci(gaps[1]) + " / " + sci(gaps[2]) +
                  (within ? " within" : " NOT within") + " 10x scale, order " + sci(order) + " (need 1.5), " + sci(t) + " s"};
}

// ---------------------------------------------------------------- 12
Outcome criterion12() {
  const fs::path base = fs::temp_directory_path() / "gpv_acceptance_determinism";
  fs::remove_all(base);
  std::vector<io::RunManifest> runs;
  for (const char* name : {"a", "b"}) {
    const std::string dir = (base / name).string();
    std::ostringstream out, err;
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"gpvortex", "minimize", "--epsilon", "0.05", "--omega0", "0.35", "--Nr", "256", "--Nt", "512", "--init",
              "random-phase", "--seed", "7", "--run", dir},
             {"gpvortex", "vortices", "--run", dir}}) {
      const int code = io::run_cli(args, out, err);
      if (code != io::kExitOk) return {false, args[1] + " exited " + std::to_string(code) + ": " + err.str()};
    }
    runs.push_back(io::read_manifest(dir));
  }
  const bool same = io::reproducible_view(runs[0]) == io::reproducible_view(runs[1]);
  const auto bad = io::verify_manifest((base / "a").string(), runs[0]);
  fs::remove_all(base);
  return {same && bad.empty(), std::string("manifests ") + (same ? "identical" : "DIFFER") +
                                   " excluding timestamps and wallclock (" + std::to_string(runs[0].outputs.size()) +
                                   " checksummed outputs), checksum mismatches " + std::to_string(bad.size())};
}

}  // namespace

int main() {
  SweepShared shared;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form TF quantities vs adaptive quadrature", criterion1},
      {"normalization root residual and expansion order", criterion2},
      {"phase optimality bands", criterion3},
      {"sandwich of TF, hat-TF and discrete radial energies", criterion4},
      {"radial profile properties", criterion5},
      {"energy splitting identity", criterion6},
      {"F-form identity and dF/dr", criterion7},
      {"critical-velocity cost suite", criterion8},
      {"rotation sweep transition", [&] { return criterion9(shared); }},
      {"boundary degree", [&] { return criterion10(shared); }},
      {"vortex balls and jacobian on synthetic fields", criterion11},
      {"determinism of run manifests", criterion12},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
