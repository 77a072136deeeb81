#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpvortex/field2d.hpp"

namespace gpv {

// Integer winding per plaquette (i, j)-(i+1, j+1), indexed i * Nt + j.
// Plaquettes touching a node with |u| < floor are masked; every connected
// masked component carries the circulation of its (unmasked) boundary,
// stored on its lowest-modulus plaquette, with zeros on the rest.
struct WindingGrid {
  int rows = 0;  // Nr - 1
  int Nt = 0;
  double floor = 0.0;
  std::vector<int> winding;
  std::vector<std::uint8_t> mask;
  int masked_components = 0;

  int at(int i, int j) const { return winding[static_cast<std::size_t>(i) * Nt + j]; }
  long total() const;
};

// floor < 0 selects the default 0.1 * median |u|.
WindingGrid winding_grid(const DiscField& u, double floor = -1.0);

// Winding of psi along the outer ring, computed as hat_Omega + deg(u).
int boundary_degree(const DiscField& psi, const RadialProfile& p);

struct VortexBall {
  double r = 0.0;
  double theta = 0.0;
  double radius = 0.0;
  int degree = 0;
  int cell = -1;
};

struct VortexSet {
  std::vector<VortexBall> items;
  long total_degree() const;
  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

// Components (8-connected, periodic in theta) of plaquettes with nonzero
// winding or masked, whose centre lies at r >= R_>.
VortexSet detect_bulk_vortices(const DiscField& u, const Regime& reg, double floor = -1.0);

enum class CellLabel : std::uint8_t { Pleasant, Average, Unpleasant };
std::string to_string(CellLabel l);

struct CellOptions {
  double alpha = 0.25;
  double c = 1.0;  // cell side c eps |log eps|
};

struct CellDecomposition {
  int count = 0;
  double alpha = 0.0;
  double threshold = 0.0;  // eps^{-1} |log eps| eps^{-alpha}
  std::vector<double> energy;
  std::vector<std::uint8_t> good;
  std::vector<CellLabel> label;
  std::vector<int> cell_of_column;  // angular column j -> cell
  double F_total = 0.0;
  int n_bad = 0;
  double bad_bound = 0.0;           // (eps / |log eps|) eps^alpha F_total
  double boundary_kinetic = 0.0;    // ring integral of g^2 |d_tau u|^2 at r = 1
  double boundary_quartic = 0.0;    // ring integral of eps^{-2} g^4 (1 - |u|^2)^2 at r = 1
};

// alpha in [0, 1/2); the alpha preset of the log-log choice is alpha_loglog().
CellDecomposition cell_decomposition(const DiscField& u, const RadialProfile& p, const CellOptions& opts = {});
double alpha_loglog(double epsilon);

struct BallOptions {
  double modulus_tol = -1.0;  // default 1/|log eps|
  double budget = -1.0;       // default eps |log eps|^{-5}
  double growth = 1.2;
  double floor_c = 1.0;       // c in 1 - c loglog/|log|
};

struct BallResult {
  VortexSet balls;
  std::vector<double> kinetic;  // integral of g^2 |grad u|^2 over each final ball
  std::vector<double> floor;    // 2 pi (1/2 - alpha) |d| g^2(center) |log eps| (1 - c loglog/|log|)
  double budget = 0.0;          // radius budget actually used
  std::string warning;
  int initial_balls = 0;
  long initial_degree_sum = 0;
  int merges = 0;
  int growth_steps = 0;
};

BallResult grow_merge_balls(const DiscField& u, const RadialProfile& p, const CellDecomposition& dec,
                            const BallOptions& opts = {});

struct JacobianComparison {
  double lhs = 0.0;        // sum 2 pi d_i phi(a_i)
  double rhs = 0.0;        // integral of phi curl(iu, grad u), nodal vorticity
  double rhs_plaquette = 0.0;
  double gap = 0.0;
  double scale = 0.0;      // ||grad phi||_inf eps^2 |log eps|^{-2} F_total
  bool pass = false;       // gap <= 10 scale
};

// phi is sampled on the grid of u. Nonzero values at r < R_> or in bad cells
// are rejected when dec is given.
JacobianComparison jacobian_compare(const DiscField& u, const VortexSet& balls, const std::vector<double>& phi,
                                    const Regime& reg, double F_total, const CellDecomposition* dec = nullptr);

}  // namespace gpv
