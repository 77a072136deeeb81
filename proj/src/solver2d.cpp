#include "gpvortex/solver2d.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "angular_fft.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/gpvf.hpp"
#include "gpvortex/parallel.hpp"
#include "tridiag.hpp"

namespace gpv {

std::string to_string(StepPolicy p) { return p == StepPolicy::Fixed ? "fixed" : "backtracking"; }
std::string to_string(Preconditioner p) { return p == Preconditioner::None ? "none" : "inverse-laplacian"; }
std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::GiantVortex: return "giant-vortex";
    case InitKind::PlantedLattice: return "planted-lattice";
    case InitKind::RandomPhase: return "random-phase";
  }
  return "unknown";
}

StepPolicy step_policy_from_string(const std::string& s) {
  if (s == "fixed") return StepPolicy::Fixed;
  if (s == "backtracking") return StepPolicy::Backtracking;
  throw ParameterError("unknown step policy '" + s + "'");
}

Preconditioner preconditioner_from_string(const std::string& s) {
  if (s == "none") return Preconditioner::None;
  if (s == "inverse-laplacian") return Preconditioner::InverseLaplacian;
  throw ParameterError("unknown preconditioner '" + s + "'");
}

InitKind init_from_string(const std::string& s) {
  if (s == "giant-vortex") return InitKind::GiantVortex;
  if (s == "planted-lattice") return InitKind::PlantedLattice;
  if (s == "random-phase") return InitKind::RandomPhase;
  throw ParameterError("unknown init '" + s + "'");
}

namespace {

using Vec = std::vector<cplx>;

void axpy(Vec& y, double a, const Vec& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

RadialProfile giant_vortex_profile(const Regime& reg, const PolarGrid& grid, const SolveOptions& opts) {
  if (grid.radial.domain != Domain::Disc) throw ParameterError("minimize_gp needs a disc grid");
  if (opts.omega) return minimize_profile(reg, *opts.omega, grid.radial);
  return optimize_phase(reg, grid.radial).profile;
}

// Mode-diagonal preconditioner: for angular mode kappa solve
// (K + W diag(max(kappa^2/s - 2 Omega kappa + 2 eps^{-2} rho_i - mu, 0) + sigma)) x = W r
// where rho_i is the ring mean of |psi|^2.
class ModePreconditioner {
public:
  ModePreconditioner(const PolarGrid& g, const Regime& reg) : g_(g), reg_(reg), fft_(detail::angular_fft(g.Nr, g.Nt)) {}

  void update(const Vec& psi, double mu) {
    rho_.assign(g_.Nr, 0.0);
    double rmax = 0.0;
    for (int i = 0; i < g_.Nr; ++i) {
      double t = 0.0;
      for (int j = 0; j < g_.Nt; ++j) t += std::norm(psi[g_.idx(i, j)]);
      rho_[i] = t / g_.Nt;
      rmax = std::max(rmax, rho_[i]);
    }
    mu_ = mu;
    sigma_ = std::max(1.0, rmax / (reg_.epsilon * reg_.epsilon));
  }

  void apply(const Vec& in, Vec& out) const {
    const int Nr = g_.Nr, Nt = g_.Nt;
    Vec c(g_.size());
    fft_->forward(in.data(), c.data());
    const double q2 = 2.0 / (reg_.epsilon * reg_.epsilon);
    const auto& R = g_.radial;
    parallel_for(Nt, [&](int k) {
      const double kk = detail::wavenumber(k, Nt);
      std::vector<double> lo(Nr, 0.0), di(Nr), up(Nr, 0.0), work;
      Vec x(Nr);
      for (int i = 0; i < Nr; ++i) {
        const double v = kk * kk / R.s[i] - 2.0 * reg_.Omega * kk + q2 * rho_[i] - mu_;
        di[i] = R.w[i] * (std::max(v, 0.0) + sigma_);
        if (i > 0) {
          di[i] += R.a[i - 1];
          lo[i] = -R.a[i - 1];
        }
        if (i + 1 < Nr) {
          di[i] += R.a[i];
          up[i] = -R.a[i];
        }
        x[i] = R.w[i] * c[g_.idx(i, k)];
      }
      detail::solve_tridiag(lo, di, up, x, work);
      for (int i = 0; i < Nr; ++i) c[g_.idx(i, k)] = x[i];
    });
    out.resize(g_.size());
    fft_->backward(c.data(), out.data());
    const double inv = 1.0 / Nt;
    for (auto& v : out) v *= inv;
  }

private:
  const PolarGrid& g_;
  const Regime& reg_;
  std::shared_ptr<const detail::AngularFFT> fft_;
  std::vector<double> rho_;
  double mu_ = 0.0;
  double sigma_ = 1.0;
};

void dump_iterate(const SolveOptions& opts, const DiscField& f, const Regime& reg) {
  if (opts.failure_dump.empty()) return;
  try {
    write_gpvf(opts.failure_dump, f, reg.epsilon, reg.omega0);
  } catch (...) {
  }
}

}  // namespace

DiscField initial_field(const Regime& reg, const PolarGrid& grid, const SolveOptions& opts, long* omega_used) {
  if (opts.initial) {
    const DiscField& f = *opts.initial;
    if (f.grid.Nr != grid.Nr || f.grid.Nt != grid.Nt) throw ParameterError("initial field does not match the grid");
    DiscField out = f;
    out.grid = grid;
    out.kind = FieldKind::Psi;
    normalize_field(out);
    if (omega_used) *omega_used = opts.omega.value_or(0);
    return out;
  }

  const RadialProfile p = giant_vortex_profile(reg, grid, opts);
  if (omega_used) *omega_used = p.omega;
  const auto g = profile_on_rows(grid, p);
  const double n = static_cast<double>(p.hat_Omega);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);

  DiscField psi;
  psi.grid = grid;
  psi.kind = FieldKind::Psi;
  psi.values.resize(grid.size());

  switch (opts.init) {
    case InitKind::GiantVortex:
      for (int i = 0; i < grid.Nr; ++i)
        for (int j = 0; j < grid.Nt; ++j) psi.at(i, j) = g[i] * std::polar(1.0, n * grid.theta[j]);
      break;

    case InitKind::PlantedLattice: {
      const int N = opts.lattice_vortices;
      if (N < 0) throw ParameterError("lattice_vortices must be >= 0");
      // ring where the TF vortex cost is most favourable: eps Omega (r^2 - R_h^2) = 1/sqrt(pi)
      double rv2 = reg.R_h * reg.R_h + 1.0 / (kSqrtPi * reg.epsilon * reg.Omega);
      rv2 = std::clamp(rv2, 0.0625, 0.81);
      const double rv = std::sqrt(rv2);
      const double core = std::sqrt(reg.epsilon / reg.Omega);
      const double th0 = ud(rng);
      std::vector<cplx> centers;
      for (int v = 0; v < N; ++v) centers.push_back(std::polar(rv, th0 + 2.0 * kPi * v / N));
      for (int i = 0; i < grid.Nr; ++i)
        for (int j = 0; j < grid.Nt; ++j) {
          const cplx z = std::polar(grid.radial.r[i], grid.theta[j]);
          cplx f = std::polar(1.0, (n - N) * grid.theta[j]);
          for (const cplx& a : centers) f *= (z - a) / std::sqrt(std::norm(z - a) + core * core);
          psi.at(i, j) = g[i] * f * (1.0 + 1e-3 * nd(rng));
        }
      break;
    }

    case InitKind::RandomPhase: {
      // smooth random complex modulation; its zeros seed a random vortex configuration
      constexpr int K = 6, M = 4;
      std::vector<cplx> coef((2 * K + 1) * M);
      for (auto& c : coef) c = cplx(nd(rng), nd(rng));
      const double r_in = grid.radial.r.front();
      std::vector<cplx> eta(grid.size());
      double ms = 0.0;
      for (int i = 0; i < grid.Nr; ++i) {
        const double x = (grid.radial.r[i] - r_in) / (1.0 - r_in);
        for (int j = 0; j < grid.Nt; ++j) {
          cplx t = 0.0;
          for (int k = -K; k <= K; ++k)
            for (int m = 0; m < M; ++m)
              t += coef[(k + K) * M + m] * std::cos(m * kPi * x) * std::polar(1.0, k * grid.theta[j]);
          eta[grid.idx(i, j)] = t;
          ms += std::norm(t);
        }
      }
      const double scale = 1.5 / std::sqrt(ms / grid.size());
      for (int i = 0; i < grid.Nr; ++i)
        for (int j = 0; j < grid.Nt; ++j) {
          const std::size_t k = grid.idx(i, j);
          psi.values[k] = g[i] * std::polar(1.0, n * grid.theta[j]) * (1.0 + scale * eta[k]);
        }
      break;
    }
  }
  normalize_field(psi);
  return psi;
}

SolveResult minimize_gp(const Regime& reg, const PolarGrid& grid, const SolveOptions& opts) {
  if (opts.max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(opts.tol > 0.0)) throw ParameterError("tol must be positive");
  if (!(opts.residual_tol > 0.0)) throw ParameterError("residual_tol must be positive");
  {
    // core diameter 2 sqrt(eps/Omega) and the annulus width must each span 4 spacings
    const double core = 2.0 * std::sqrt(reg.epsilon / reg.Omega);
    const double rb = std::max(reg.R_h, 0.25);
    const double dr = std::sqrt(rb * rb + grid.radial.ds) - rb;
    if (core < 4.0 * dr || core < 4.0 * grid.dtheta || (1.0 - reg.R_h) < 4.0 * dr)
      throw ParameterError("grid does not resolve the vortex core scale and annulus width with 4 nodes");
  }

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  DiscField psi = initial_field(reg, grid, opts, &res.init_omega);
  DiscField trial = psi;

  const bool precond = opts.precond == Preconditioner::InverseLaplacian;
  ModePreconditioner P(grid, reg);

  auto energy_of = [&](const DiscField& f) { return gp_energy_parts(f, reg).total; };

  Vec h, r, z, zpsi, dir, prev_dir, prev_z, prev_r;
  double E = energy_of(psi);
  if (!std::isfinite(E)) throw NumericalError("non-finite initial energy");
  res.history.push_back(E);

  double tau = precond ? 1.0 : 1e-4;
  bool have_prev = false;
  double mu = 0.0, rel_res = 0.0;

  auto residual = [&]() {
    gp_apply_h(psi, reg, h);
    mu = field_dot(grid, psi.values, h);
    r = h;
    axpy(r, -mu, psi.values);
    rel_res = std::sqrt(field_dot(grid, r, r)) / std::max(1.0, std::fabs(mu));
  };

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    residual();
    if (!std::isfinite(rel_res)) {
      dump_iterate(opts, psi, reg);
      throw NumericalError("NaN detected in the GP residual at iteration " + std::to_string(it), rel_res);
    }

    const std::size_t m = res.history.size();
    if (m > 10) {
      const double drop = res.history[m - 11] - res.history[m - 1];
      if (drop <= opts.tol * std::fabs(E) && rel_res <= opts.residual_tol) {
        res.converged = true;
        res.stop_reason = "converged";
        break;
      }
      if (drop <= 0.0) {
        res.stop_reason = "stalled: no decrease over 10 iterations";
        break;
      }
    }

    // preconditioned tangent direction
    if (precond) {
      P.update(psi.values, mu);
      P.apply(r, z);
      P.apply(psi.values, zpsi);
      const double a = field_dot(grid, psi.values, z) / field_dot(grid, psi.values, zpsi);
      axpy(z, -a, zpsi);
    } else {
      z = r;
    }

    dir = z;
    if (have_prev && opts.step == StepPolicy::Backtracking) {
      // Polak-Ribiere+ with the previous direction moved to the current tangent space
      Vec dz = z;
      axpy(dz, -1.0, prev_z);
      const double beta = std::max(0.0, field_dot(grid, r, dz) / field_dot(grid, prev_r, prev_z));
      if (beta > 0.0) {
        const double pr = field_dot(grid, psi.values, prev_dir);
        axpy(prev_dir, -pr, psi.values);
        axpy(dir, beta, prev_dir);
      }
    }
    double slope = 2.0 * field_dot(grid, r, dir);
    if (!(slope > 0.0)) {
      dir = z;
      slope = 2.0 * field_dot(grid, r, dir);
    }
    if (!(slope > 0.0)) {
      res.stop_reason = "zero tangent gradient";
      res.converged = rel_res <= opts.residual_tol;
      break;
    }
    const double pnorm2 = field_dot(grid, dir, dir);

    auto eval = [&](double t) {
      const double s = 1.0 / std::sqrt(1.0 + t * t * pnorm2);
      for (std::size_t k = 0; k < psi.values.size(); ++k) trial.values[k] = (psi.values[k] - t * dir[k]) * s;
      return energy_of(trial);
    };

    double accepted = -1.0, E_new = E;
    if (opts.step == StepPolicy::Fixed) {
      E_new = eval(opts.fixed_step);
      if (!std::isfinite(E_new)) {
        dump_iterate(opts, psi, reg);
        throw NumericalError("NaN energy with fixed step", rel_res);
      }
      if (E_new > E) {
        dump_iterate(opts, psi, reg);
        throw NumericalError("divergence: fixed step increased the energy at iteration " + std::to_string(it), rel_res);
      }
      accepted = opts.fixed_step;
    } else {
      double t = tau;
      for (int ls = 0; ls < 60; ++ls) {
        const double Et = eval(t);
        if (std::isfinite(Et) && Et <= E - 1e-4 * t * slope) {
          accepted = t;
          E_new = Et;
          // try the minimizer of the interpolating parabola if it lies further out
          const double curv = Et - E + slope * t;
          if (curv > 0.0) {
            const double tq = std::min(slope * t * t / (2.0 * curv), 4.0 * t);
            if (tq > 1.5 * t) {
              const double Eq = eval(tq);
              if (std::isfinite(Eq) && Eq < E_new) {
                accepted = tq;
                E_new = Eq;
              }
            }
          }
          break;
        }
        double tn = 0.5 * t;
        if (std::isfinite(Et)) {
          const double curv = Et - E + slope * t;
          if (curv > 0.0) tn = std::clamp(slope * t * t / (2.0 * curv), 0.1 * t, 0.5 * t);
        }
        t = tn;
        if (t < 1e-18) break;
      }
    }

    if (accepted < 0.0) {
      if (have_prev) {
        have_prev = false;  // restart from the plain preconditioned gradient
        continue;
      }
      res.stop_reason = "line search stalled";
      res.converged = rel_res <= opts.residual_tol;
      break;
    }

    const double s = 1.0 / std::sqrt(1.0 + accepted * accepted * pnorm2);
    for (std::size_t k = 0; k < psi.values.size(); ++k) trial.values[k] = (psi.values[k] - accepted * dir[k]) * s;
    normalize_field(trial);  // removes rounding drift of the norm
    const double E_acc = energy_of(trial);
    if (!std::isfinite(E_acc)) {
      dump_iterate(opts, psi, reg);
      throw NumericalError("NaN energy at iteration " + std::to_string(it), rel_res);
    }
    if (E_acc > E) {
      // renormalization undid a decrease at the rounding floor
      res.stop_reason = "stalled at rounding level";
      res.converged = rel_res <= opts.residual_tol;
      break;
    }
    std::swap(psi.values, trial.values);
    E = E_acc;
    res.history.push_back(E);
    tau = std::max(accepted, 1e-12) * 1.5;
    prev_dir = dir;
    prev_z = z;
    prev_r = r;
    have_prev = true;
  }
  if (it == opts.max_iters) {
    residual();
    res.stop_reason = "max_iters reached";
  }
  res.iterations = it;
  res.field = psi;
  res.energy = energy_of(psi);
  res.mu = mu;
  res.residual = rel_res;
  res.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

ChemicalPotential chemical_potential_gp(const DiscField& psi, const Regime& reg) {
  const auto parts = gp_energy_parts(psi, reg);
  ChemicalPotential cp;
  cp.mu = parts.total + parts.quartic;
  std::vector<cplx> h;
  gp_apply_h(psi, reg, h);
  axpy(h, -cp.mu, psi.values);
  cp.residual = std::sqrt(field_dot(psi.grid, h, h)) / std::max(1.0, std::fabs(cp.mu));
  return cp;
}

ChemicalPotential chemical_potential_gp(const SolveResult& res, const Regime& reg) {
  return chemical_potential_gp(res.field, reg);
}

std::vector<SweepPoint> sweep(const std::vector<std::pair<double, double>>& family, const SweepOptions& opts) {
  std::vector<SweepPoint> out(family.size());
  if (family.empty()) return out;

  // Giant-vortex winding of the 1-D optimum; warm starts are shifted by the
  // change in this winding so the carried-over field keeps its vortex pattern
  // relative to the new rotation instead of being trapped at the old degree.
  std::vector<long> winding(family.size(), 0);

  auto run = [&](std::size_t k, std::optional<std::size_t> warm) {
    SweepPoint& pt = out[k];
    pt.epsilon = family[k].first;
    pt.omega0 = family[k].second;
    try {
      const Regime reg = make_regime(pt.epsilon, pt.omega0, HolePolicy::Allow);
      const PolarGrid grid = make_disc_polar_grid(opts.Nr, opts.Nt, opts.r0);
      SolveOptions so = opts.solve;
      if (warm) {
        winding[k] = reg.Omega_int - optimize_phase(reg, grid.radial).omega_star;
        DiscField f = out[*warm].result.field;
        const double dn = static_cast<double>(winding[k] - winding[*warm]);
        for (int i = 0; i < grid.Nr; ++i)
          for (int j = 0; j < grid.Nt; ++j) f.at(i, j) *= std::polar(1.0, dn * grid.theta[j]);
        so.initial = std::move(f);
      }
      pt.result = minimize_gp(reg, grid, so);
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  };

  if (opts.warm_start) {
    std::optional<std::size_t> warm;
    for (std::size_t k = 0; k < family.size(); ++k) {
      run(k, warm);
      if (!out[k].ok) continue;
      if (!warm) {
        const Regime reg = make_regime(out[k].epsilon, out[k].omega0, HolePolicy::Allow);
        winding[k] = reg.Omega_int - optimize_phase(reg, out[k].result.field.grid.radial).omega_star;
      }
      warm = k;
    }
    return out;
  }

  const int workers = std::min<int>(thread_count(), static_cast<int>(family.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < family.size(); ++k) run(k, std::nullopt);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < family.size();) run(k, std::nullopt);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace gpv
