#include "gpvortex/regime_tf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpvortex/errors.hpp"

namespace gpv {

Regime make_regime(double epsilon, double omega0, HolePolicy policy) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("epsilon must lie in (0,1), got " + std::to_string(epsilon));
  if (!(omega0 > 0.0)) throw ParameterError("omega0 must be positive");

  Regime reg;
  reg.epsilon = epsilon;
  reg.omega0 = omega0;
  reg.log_eps = std::fabs(std::log(epsilon));
  reg.Omega = omega0 / (epsilon * epsilon * reg.log_eps);
  reg.Omega_int = static_cast<long>(std::floor(reg.Omega));

  const double eO = epsilon * reg.Omega;
  reg.has_hole = eO >= 2.0 / kSqrtPi;
  if (!reg.has_hole && policy == HolePolicy::Require)
    throw ParameterError("no hole: below TF hole threshold (epsilon*Omega = " + std::to_string(eO) +
                         " < 2/sqrt(pi))");

  if (reg.has_hole) {
    reg.R_h = std::sqrt(std::max(0.0, 1.0 - 2.0 / (kSqrtPi * eO)));
    reg.R_less = std::max(0.0, reg.R_h - std::pow(epsilon, 8.0 / 7.0));
  } else {
    reg.R_h = 0.0;
    reg.R_less = 0.0;
  }
  reg.R_greater = reg.R_h + epsilon / reg.log_eps;
  if (reg.R_greater >= 1.0)
    throw ParameterError("bulk annulus is empty: R_h + eps/|log eps| >= 1");
  return reg;
}

namespace {

double no_hole_mu(const Regime& reg) {
  const double e2 = reg.epsilon * reg.epsilon;
  return 2.0 / (kPi * e2) - 0.5 * reg.Omega * reg.Omega;
}

}  // namespace

double tf_density(const Regime& reg, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("tf_density: r outside [0,1]");
  const double e2 = reg.epsilon * reg.epsilon;
  const double O2 = reg.Omega * reg.Omega;
  if (reg.has_hole) return 0.5 * e2 * O2 * std::max(0.0, r * r - reg.R_h * reg.R_h);
  return 0.5 * e2 * (no_hole_mu(reg) + O2 * r * r);
}

TfReport tf_report(const Regime& reg) {
  TfReport rep;
  const double O2 = reg.Omega * reg.Omega;
  const double e2 = reg.epsilon * reg.epsilon;
  if (reg.has_hole) {
    rep.mu_tf = -O2 * reg.R_h * reg.R_h;
    rep.e_tf = -O2 * (1.0 - 4.0 / (3.0 * kSqrtPi * reg.epsilon * reg.Omega));
  } else {
    const double mu = no_hole_mu(reg);
    const double top = mu + O2;
    rep.mu_tf = mu;
    rep.e_tf = mu - kPi * e2 / (12.0 * O2) * (top * top * top - mu * mu * mu);
  }
  rep.rho_sup = tf_density(reg, 1.0);
  rep.hole_radius = reg.R_h;
  return rep;
}

double delta_minus_log1p(double d) {
  if (std::fabs(d) < 0.1) {
    // alternating series sum_{k>=2} (-1)^k d^k / k
    double term = d * d;
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / k;
      term *= d;
    }
    return sum;
  }
  return d - std::log1p(d);
}

double hat_tf_delta_expansion(double epsilon, long hat_Omega) {
  const double s = 2.0 / (kSqrtPi * epsilon * static_cast<double>(hat_Omega));
  return s * (1.0 + s / 3.0 + s * s / 36.0);
}

HatTfReport hat_tf_solve(const Regime& reg, long omega, const HatTfOptions& opts) {
  const double eps = reg.epsilon;
  if (std::fabs(static_cast<double>(omega)) > opts.omega_bound_c / eps)
    throw ParameterError("hat_tf_solve: |omega| exceeds c/epsilon");
  const long n = reg.Omega_int - omega;
  if (n <= 0) throw ParameterError("hat_tf_solve: hat_Omega = floor(Omega) - omega must be positive");

  const double nd = static_cast<double>(n);
  const double K = 2.0 / (kPi * eps * eps * nd * nd);
  auto f = [K](double d) { return delta_minus_log1p(d) - K; };

  double lo = 0.0, hi = 10.0;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("hat_tf_solve: cannot bracket root");
  }

  double x = std::clamp(hat_tf_delta_expansion(eps, n), lo, hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  double fx = f(x);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (fx == 0.0) break;
    if (fx < 0.0) lo = x; else hi = x;
    const double dfx = x / (1.0 + x);
    double xn = x - fx / dfx;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    const double step = std::fabs(xn - x);
    x = xn;
    fx = f(x);
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * x) break;
  }

  HatTfReport rep;
  rep.omega = omega;
  rep.hat_Omega = n;
  rep.delta = x;
  rep.hat_R = 1.0 / std::sqrt(1.0 + x);
  rep.hat_mu = nd * nd * (1.0 + x);
  rep.hat_e = -2.0 * reg.Omega * nd + 0.25 * kPi * eps * eps * nd * nd * nd * nd * x * x;
  rep.residual = std::fabs(f(x));
  rep.iterations = it;
  if (!(rep.residual <= 1e-12))
    throw NumericalError("hat_tf_solve: Newton did not converge", rep.residual);
  return rep;
}

double hat_tf_density(const Regime& reg, const HatTfReport& rep, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("hat_tf_density: r outside (0,1]");
  const double n = static_cast<double>(rep.hat_Omega);
  return 0.5 * reg.epsilon * reg.epsilon * std::max(0.0, rep.hat_mu - n * n / (r * r));
}

double omega_tf(const Regime& reg) { return 2.0 / (3.0 * kSqrtPi * reg.epsilon); }

std::pair<long, long> default_omega_bracket(const Regime& reg) {
  long hi = static_cast<long>(std::ceil(4.0 * omega_tf(reg)));
  hi = std::min(hi, reg.Omega_int - 1);
  return {0, std::max(0L, hi)};
}

HatTfScan hat_tf_scan(const Regime& reg, long omega_lo, long omega_hi, const HatTfOptions& opts) {
  if (omega_hi < omega_lo) throw ParameterError("hat_tf_scan: empty omega range");
  HatTfScan scan;
  double best = std::numeric_limits<double>::infinity();
  for (long w = omega_lo; w <= omega_hi; ++w) {
    scan.rows.push_back(hat_tf_solve(reg, w, opts));
    if (scan.rows.back().hat_e < best) {
      best = scan.rows.back().hat_e;
      scan.argmin = w;
    }
  }
  return scan;
}

}  // namespace gpv
