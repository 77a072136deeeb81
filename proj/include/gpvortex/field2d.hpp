#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpvortex/cost.hpp"
#include "gpvortex/profile1d.hpp"
#include "gpvortex/regime_tf.hpp"

namespace gpv {

using cplx = std::complex<double>;

enum class FieldKind : std::uint8_t { Psi = 0, U = 1, V = 2 };
enum class AngularDiff { Spectral, Central };

std::string to_string(FieldKind k);

// Tensor grid: radial nodes of a RadialGrid times Nt equispaced angles.
// Node (i, j) carries the weight radial.w[i] / Nt for the integral of f r dr dtheta.
struct PolarGrid {
  int Nr = 0;
  int Nt = 0;
  RadialGrid radial;
  double dtheta = 0.0;
  std::vector<double> theta;

  std::size_t size() const { return static_cast<std::size_t>(Nr) * Nt; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * Nt + j; }
  double node_weight(int i) const { return radial.w[i] / Nt; }
  double total_weight() const;
  double r0() const { return radial.r.front(); }
};

PolarGrid make_polar_grid(const RadialGrid& radial, int Nt);
PolarGrid make_disc_polar_grid(int Nr, int Nt, double r0 = 1e-3);
// Rows i0 .. Nr-1 of g as a grid of its own.
PolarGrid sub_grid(const PolarGrid& g, int i0);

struct DiscField {
  PolarGrid grid;
  std::vector<cplx> values;  // r-major: values[i * Nt + j]
  FieldKind kind = FieldKind::Psi;

  cplx& at(int i, int j) { return values[grid.idx(i, j)]; }
  const cplx& at(int i, int j) const { return values[grid.idx(i, j)]; }
};

DiscField make_field(const PolarGrid& grid, FieldKind kind, const std::function<cplx(double r, double theta)>& f);
double field_norm2(const DiscField& f);  // integral of |f|^2
void normalize_field(DiscField& f);

// d/dtheta of every row; spectral derivative zeroes the Nyquist mode.
std::vector<cplx> angular_derivative(const DiscField& f, AngularDiff mode = AngularDiff::Spectral);
// d/ds (s = r^2) by second-order differences, one-sided at the end rows.
std::vector<cplx> radial_derivative_s(const DiscField& f);

struct GpEnergyParts {
  double radial = 0.0;
  double angular = 0.0;
  double rotation = 0.0;
  double quartic = 0.0;
  double total = 0.0;
};

GpEnergyParts gp_energy_parts(const DiscField& psi, const Regime& reg, AngularDiff mode = AngularDiff::Spectral);
// Rejects fields that are not kind Psi with unit norm (tolerance 1e-10).
double gp_energy(const DiscField& psi, const Regime& reg, AngularDiff mode = AngularDiff::Spectral);

// H psi = -Lap_r psi + (kappa^2/r^2 - 2 Omega kappa) psi + 2 eps^{-2} |psi|^2 psi,
// the half-gradient of the energy with respect to the weighted inner product.
void gp_apply_h(const DiscField& psi, const Regime& reg, std::vector<cplx>& out);

// Weighted inner product sum w Re(conj(a) b).
double field_dot(const PolarGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b);

// Profile amplitude on each radial row of grid (exact on coinciding nodes,
// linear in s otherwise). Rows outside the profile domain are rejected.
std::vector<double> profile_on_rows(const PolarGrid& grid, const RadialProfile& p);

// u = psi exp(-i hat_Omega theta) / g on the rows with r >= R_<.
DiscField decompose_u(const DiscField& psi, const RadialProfile& p);

// psi = g u exp(i hat_Omega theta) on the grid of u.
DiscField recompose_psi(const DiscField& u, const RadialProfile& p);

struct ReducedParts {
  double kinetic = 0.0;
  double rotation = 0.0;
  double quartic = 0.0;
  double total = 0.0;
};

ReducedParts reduced_energy_parts(const DiscField& u, const RadialProfile& p,
                                  AngularDiff mode = AngularDiff::Spectral);
double reduced_energy(const DiscField& u, const RadialProfile& p, const Regime& reg,
                      AngularDiff mode = AngularDiff::Spectral);

struct FFormParts {
  double kinetic = 0.0;    // integral of g^2 |grad u|^2
  double vorticity = 0.0;  // integral of F curl(iu, grad u)
  double bulk = 0.0;       // kinetic + vorticity
  double boundary = 0.0;   // -F(1) times the outer circulation
  double quartic = 0.0;
  double total = 0.0;
};

FFormParts f_form_energy(const DiscField& u, const CostCurve& curve, const RadialProfile& p);

// Nodal curl(iu, grad u) from derivatives of u.
std::vector<double> vorticity_density(const DiscField& u);

// Circulation of (iw, grad w) around each plaquette (i, j)-(i+1, j+1), indexed
// i * Nt + j for i < Nr - 1. Edge currents are |w_a||w_b| times the wrapped phase
// difference of u; regularized uses |w| = min(2|u|, 1), otherwise |w| = 1.
std::vector<double> plaquette_vorticity(const DiscField& u, bool regularized = true);

// Counter-clockwise sum of edge currents along ring i, consistent with plaquette_vorticity.
double ring_phase_circulation(const DiscField& u, int i, bool regularized = true);

// Integral over ring i of (iu, d_tau u) d sigma using the spectral derivative.
double ring_circulation(const DiscField& u, int i);

// Per-node weighted contributions to the integral of g^2 |grad u|^2 and
// eps^{-2} g^4 (1 - |u|^2)^2 on the grid of u.
struct LocalEnergy {
  std::vector<double> kinetic;
  std::vector<double> quartic;
};

LocalEnergy local_f_energy(const DiscField& u, const RadialProfile& p);

}  // namespace gpv
