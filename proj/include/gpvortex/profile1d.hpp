#pragma once

#include <string>
#include <vector>

#include "gpvortex/regime_tf.hpp"

namespace gpv {

enum class Domain { Disc, Annulus };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

// Nodes uniform in s = r^2 on [s0, 1]. Mass weights are the trapezoid rule
// in s (times pi) so that sum(w f) approximates the integral of f 2 pi r dr;
// edge coefficients a[e] = 4 pi s_{e+1/2} / ds give the radial kinetic term
// sum a[e] (g[e+1] - g[e])^2. The boundary rows produced by this energy are
// the ghost-reflection Neumann closure.
struct RadialGrid {
  Domain domain = Domain::Disc;
  double s0 = 0.0;
  double ds = 0.0;
  int n = 0;
  std::vector<double> s, r, w, a;

  double r_inner() const { return r.front(); }
  double area() const;
};

RadialGrid make_radial_grid(Domain domain, double r_inner, int n);
RadialGrid make_disc_grid(int n, double r0 = 1e-3);
RadialGrid make_annulus_grid(const Regime& reg, int n);

struct ProfileOptions {
  double tol = 1e-10;      // relative projected-gradient norm for the descent phase
  int max_iter = 20000;
  bool quartic = true;     // false drops the eps^{-2} g^4 term
  bool polish = true;      // Newton polish of the Euler-Lagrange system after descent
  std::vector<double> initial;  // optional warm start on the same grid
};

struct RadialProfile {
  Regime reg;
  RadialGrid grid;
  std::vector<double> g;
  long omega = 0;
  long hat_Omega = 0;
  bool quartic = true;
  double energy = 0.0;
  double mu_hat = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;     // relative, after descent
  double el_residual = 0.0;   // relative, final
  std::vector<double> history;
};

// Discrete energy of an amplitude profile (assumed normalized).
double profile_energy(const Regime& reg, long hat_Omega, const RadialGrid& grid,
                      const std::vector<double>& g, bool quartic = true);

// Same functional written in terms of rho = g^2 (convex in rho).
double density_energy(const Regime& reg, long hat_Omega, const RadialGrid& grid,
                      const std::vector<double>& rho, bool quartic = true);

// Pointwise residual of -Lap g + V g + 2 eps^{-2} g^3 - mu g with
// V = hat_Omega^2/r^2 - 2 Omega hat_Omega.
std::vector<double> euler_lagrange_residual(const RadialProfile& p);

// Weighted L2 norm of the residual, divided by max(1, |mu_hat|).
double euler_lagrange_norm(const RadialProfile& p);

RadialProfile minimize_profile(const Regime& reg, long omega, const RadialGrid& grid,
                               const ProfileOptions& opts = {});

struct PhaseRow {
  long omega = 0;
  double energy = 0.0;
  double mu_hat = 0.0;
};

struct PhaseResult {
  long omega_star = 0;
  RadialProfile profile;
  std::vector<PhaseRow> table;
};

// Integer argmin of the profile energy around round(omega_tf), widening the
// window until the minimum is interior.
PhaseResult optimize_phase(const Regime& reg, const RadialGrid& grid, const ProfileOptions& opts = {});

// Integral of g^2 (Omega - hat_Omega / r^2) with measure 2 pi r dr.
double compatibility_residual(const RadialProfile& p);

// Integral of g^2 over r < radius.
double inner_mass(const RadialProfile& p, double radius);

// Second-order one-sided derivative dg/dr at the outer (and inner) boundary.
double neumann_residual_outer(const RadialProfile& p);
double neumann_residual_inner(const RadialProfile& p);

// Linear interpolation of g in s at radius r; zero outside the grid.
double profile_value(const RadialProfile& p, double r);

// Index of the first node with r >= R_less.
int annulus_start(const RadialGrid& grid, double R_less);

struct ProfileValidation {
  double tf_rel_error_max = 0.0;  // max over r >= R_h + sqrt(eps) of |g^2 - rho_TF| / rho_TF
  double tf_rel_error_mid = 0.0;  // same at r = (1 + R_h)/2
  double sup_ratio = 0.0;         // max g^2 / rho_TF(1)
  double sup_bound = 0.0;         // 1 + 3 sqrt(eps |log eps|)
  bool sup_ok = false;
  int monotonicity_violations = 0;
  double max_gradient = 0.0;      // sup |g'|
  double gradient_scale = 0.0;    // eps^{-7/4} |log eps|^{-3/4}
  double l2_tf_diff = 0.0;        // || g^2 - rho_TF ||_2
  double l2_tf = 0.0;             // || rho_TF ||_2
  double neumann_outer = 0.0;
  double neumann_inner = 0.0;
  double el_residual = 0.0;
};

ProfileValidation validate_profile(const RadialProfile& p, const Regime& reg);

}  // namespace gpv
