#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpvortex/field2d.hpp"

namespace gpv {

enum class StepPolicy { Fixed, Backtracking };
enum class Preconditioner { None, InverseLaplacian };
enum class InitKind { GiantVortex, PlantedLattice, RandomPhase };

std::string to_string(StepPolicy p);
std::string to_string(Preconditioner p);
std::string to_string(InitKind k);
StepPolicy step_policy_from_string(const std::string& s);
Preconditioner preconditioner_from_string(const std::string& s);
InitKind init_from_string(const std::string& s);

struct SolveOptions {
  int max_iters = 5000;
  double tol = 1e-12;           // relative energy decrease over a 10-iteration window
  double residual_tol = 1e-4;   // GP residual / |mu|
  StepPolicy step = StepPolicy::Backtracking;
  double fixed_step = 0.5;
  Preconditioner precond = Preconditioner::InverseLaplacian;
  std::uint64_t seed = 1;
  InitKind init = InitKind::GiantVortex;
  int lattice_vortices = 6;
  std::optional<long> omega;    // giant-vortex phase; default is the 1-D optimum
  std::optional<DiscField> initial;  // overrides init when set
  std::string failure_dump;          // GPVF path for the last iterate on a numerical failure
};

struct SolveResult {
  DiscField field;
  double energy = 0.0;
  std::vector<double> history;
  bool converged = false;
  double wallclock = 0.0;
  int iterations = 0;
  double residual = 0.0;     // ||H psi - mu psi|| / |mu|
  double mu = 0.0;
  long init_omega = 0;
  std::string stop_reason;
};

// Starting field for the given options on grid (normalized, kind Psi).
DiscField initial_field(const Regime& reg, const PolarGrid& grid, const SolveOptions& opts, long* omega_used = nullptr);

// Preconditioned nonlinear conjugate gradient on the unit sphere with
// Armijo backtracking; every recorded iterate is normalized and the
// energy history is nonincreasing.
SolveResult minimize_gp(const Regime& reg, const PolarGrid& grid, const SolveOptions& opts = {});

struct ChemicalPotential {
  double mu = 0.0;        // E + eps^{-2} int |psi|^4
  double residual = 0.0;  // ||H psi - mu psi|| / |mu|
};

ChemicalPotential chemical_potential_gp(const SolveResult& res, const Regime& reg);
ChemicalPotential chemical_potential_gp(const DiscField& psi, const Regime& reg);

struct SweepPoint {
  double epsilon = 0.0;
  double omega0 = 0.0;
  bool ok = false;
  std::string error;
  SolveResult result;
};

struct SweepOptions {
  int Nr = 256;
  int Nt = 512;
  double r0 = 1e-3;
  SolveOptions solve;
  bool warm_start = false;  // start from the previous point's field, rephased to the new optimal winding
};

// Runs minimize_gp per point in order. Failures are recorded per point and the
// sweep continues. Cold-started points run concurrently.
std::vector<SweepPoint> sweep(const std::vector<std::pair<double, double>>& family, const SweepOptions& opts);

}  // namespace gpv
