#pragma once

#include <utility>
#include <vector>

namespace gpv {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;

// Parameter bundle for the fast-rotation regime on the unit disc.
struct Regime {
  double epsilon = 0.0;
  double omega0 = 0.0;
  double Omega = 0.0;     // omega0 / (epsilon^2 |log epsilon|)
  double log_eps = 0.0;   // |log epsilon|
  long Omega_int = 0;     // floor(Omega)
  bool has_hole = false;  // epsilon * Omega >= 2/sqrt(pi)
  double R_h = 0.0;       // TF hole radius, 0 when has_hole is false
  double R_less = 0.0;    // R_h - epsilon^{8/7}
  double R_greater = 0.0; // R_h + epsilon / |log epsilon|
};

enum class HolePolicy { Require, Allow };

// Throws ParameterError for epsilon outside (0,1), omega0 <= 0 and, under
// HolePolicy::Require, for parameters below the hole threshold.
Regime make_regime(double epsilon, double omega0, HolePolicy policy = HolePolicy::Require);

// TF density. Without a hole the density is (eps^2/2)(mu + Omega^2 r^2).
double tf_density(const Regime& reg, double r);

struct TfReport {
  double mu_tf = 0.0;
  double e_tf = 0.0;
  double rho_sup = 0.0;
  double hole_radius = 0.0;
};

TfReport tf_report(const Regime& reg);

struct HatTfOptions {
  double omega_bound_c = 10.0;  // |omega| <= c / epsilon
  int max_iter = 200;
};

struct HatTfReport {
  long omega = 0;
  long hat_Omega = 0;
  double delta = 0.0;  // hat_R^{-2} - 1
  double hat_R = 0.0;
  double hat_mu = 0.0;
  double hat_e = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

HatTfReport hat_tf_solve(const Regime& reg, long omega, const HatTfOptions& opts = {});

// (eps^2/2) [hat_mu - hat_Omega^2 / r^2]_+
double hat_tf_density(const Regime& reg, const HatTfReport& rep, double r);

// Three-term small-parameter expansion of delta for a given hat_Omega.
double hat_tf_delta_expansion(double epsilon, long hat_Omega);

// delta - log(1 + delta), accurate for small delta.
double delta_minus_log1p(double delta);

double omega_tf(const Regime& reg);

// Integer bracket [0, ceil(4 omega_tf)] clipped so that hat_Omega stays positive.
std::pair<long, long> default_omega_bracket(const Regime& reg);

struct HatTfScan {
  std::vector<HatTfReport> rows;
  long argmin = 0;
};

HatTfScan hat_tf_scan(const Regime& reg, long omega_lo, long omega_hi, const HatTfOptions& opts = {});

}  // namespace gpv
