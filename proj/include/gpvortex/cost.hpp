#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gpvortex/profile1d.hpp"

namespace gpv {

struct CostCurve {
  std::vector<double> radii;
  std::vector<double> g2;
  std::vector<double> B;         // Omega r - hat_Omega / r
  std::vector<double> F;         // F(R_<) = 0
  std::vector<double> H;         // g^2 |log eps| / 2 - |F|
  std::vector<double> H_signed;  // g^2 |log eps| / 2 + F
  std::string source;            // "profile" or "tf"
  long omega = 0;
  long hat_Omega = 0;
  int first_node = 0;            // index of radii[0] in the source grid
  double h_min = std::numeric_limits<double>::quiet_NaN();
  double h_min_radius = std::numeric_limits<double>::quiet_NaN();
};

// F(r) = 2 int_{R_<}^r g^2 (Omega s - hat_Omega/s) ds by cumulative third-order
// quadrature on the profile nodes with r >= R_<.
CostCurve potential_F(const RadialProfile& p);

// Fills H and H_signed and the minimum of H over r >= R_>.
CostCurve cost_H(const RadialProfile& p, CostCurve curve);

// Central-difference dF/dr on interior nodes (endpoints use one-sided stencils).
std::vector<double> dF_dr(const CostCurve& c);

// F and H evaluated with the TF density in place of g^2 (closed-form primitive).
CostCurve tf_cost_curve(const Regime& reg, long omega, int nodes);

// z = eps Omega (r^2 - R_h^2)
double tf_z(const Regime& reg, double r);

// 3 Omega0 - 2 z (2/sqrt(pi) - z); the O(eps |log eps|) correction is omitted.
double tf_cost(const Regime& reg, double z);

// z^2 (z - 2/sqrt(pi)) / (6 eps)
double tf_potential_leading(const Regime& reg, double z);

// z * tf_cost(z) / (12 eps)
double tf_cost_scaled(const Regime& reg, double z);

// Minimum of tf_cost_scaled over the bulk z range (over (0, 2/sqrt(pi)] without a hole).
double tf_cost_bulk_min(const Regime& reg);

struct CriticalRow {
  double epsilon = 0.0;
  double omega0 = 0.0;
  bool has_hole = false;
  long omega_star = 0;
  double min_H = std::numeric_limits<double>::quiet_NaN();
  double min_H_tf = 0.0;
  double predicted = 0.0;   // 3 Omega0 - 2/pi
  bool near_critical = false;
  bool agree = true;
};

inline constexpr double kCriticalMargin = 0.05;

std::vector<CriticalRow> critical_scan(const std::vector<std::pair<double, double>>& family, int nodes = 1024);

}  // namespace gpv
