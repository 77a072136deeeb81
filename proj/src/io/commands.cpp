#include "gpvortex/io/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gpvortex/cost.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/gpvf.hpp"
#include "gpvortex/io/config.hpp"
#include "gpvortex/io/manifest.hpp"
#include "gpvortex/io/tables.hpp"
#include "gpvortex/parallel.hpp"
#include "gpvortex/solver2d.hpp"
#include "gpvortex/vortex.hpp"
#include "json.hpp"

namespace gpv::io {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Flags that override the config file when given.
struct Flags {
  std::string config;
  std::string run;
  std::optional<double> epsilon, omega0, r0, tol, residual_tol, fixed_step, alpha, cell_c;
  std::optional<int> nodes, Nr, Nt, max_iters, lattice;
  std::optional<long> omega;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> domain, init, step, precond, omega_scan, omega0_list, csv;
  std::optional<bool> warm;
  int threads = 0;
};

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.omega0) c.omega0 = *f.omega0;
  if (f.r0) c.r0 = *f.r0;
  if (f.nodes) c.nodes = *f.nodes;
  if (f.Nr) c.Nr = *f.Nr;
  if (f.Nt) c.Nt = *f.Nt;
  if (f.domain) c.domain = domain_from_string(*f.domain);
  if (f.tol) c.solve.tol = *f.tol;
  if (f.residual_tol) c.solve.residual_tol = *f.residual_tol;
  if (f.fixed_step) c.solve.fixed_step = *f.fixed_step;
  if (f.max_iters) c.solve.max_iters = *f.max_iters;
  if (f.lattice) c.solve.lattice_vortices = *f.lattice;
  if (f.omega) c.solve.omega = *f.omega;
  if (f.seed) c.solve.seed = *f.seed;
  if (f.init) c.solve.init = init_from_string(*f.init);
  if (f.step) c.solve.step = step_policy_from_string(*f.step);
  if (f.precond) c.solve.precond = preconditioner_from_string(*f.precond);
  if (f.alpha) c.cells.alpha = *f.alpha;
  if (f.cell_c) c.cells.c = *f.cell_c;
  if (f.warm) c.warm_start = *f.warm;
  if (f.omega0_list) {
    c.sweep_omega0.clear();
    std::stringstream ss(*f.omega0_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) c.sweep_omega0.push_back(std::stod(tok));
  }
  // re-validate through the schema so flags obey the same rules as files
  return parse_config(config_to_json(c));
}

ordered_json regime_json(const Regime& r) {
  ordered_json j;
  j["epsilon"] = r.epsilon;
  j["omega0"] = r.omega0;
  j["Omega"] = r.Omega;
  j["has_hole"] = r.has_hole;
  j["R_h"] = r.R_h;
  j["R_less"] = r.R_less;
  j["R_greater"] = r.R_greater;
  return j;
}

ordered_json grid_json(const RunConfig& c) {
  ordered_json j;
  j["Nr"] = c.Nr;
  j["Nt"] = c.Nt;
  j["r0"] = c.r0;
  j["profile_nodes"] = c.nodes;
  j["profile_domain"] = to_string(c.domain);
  return j;
}

ordered_json options_json(const RunConfig& c) { return ordered_json::parse(config_to_json(c)); }

void ensure_run_dir(const std::string& run) {
  if (run.empty()) throw ParameterError("--run <dir> is required for this command");
  fs::create_directories(fs::path(run) / "fields");
  fs::create_directories(fs::path(run) / "tables");
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw ParameterError("cannot write " + p.string());
  os << s;
}

RadialGrid profile_grid(const RunConfig& c, const Regime& reg) {
  return c.domain == Domain::Disc ? make_disc_grid(c.nodes, c.r0) : make_annulus_grid(reg, c.nodes);
}

RunManifest new_manifest(const std::string& command, const RunConfig& c, const Regime* reg) {
  RunManifest m;
  m.command = command;
  m.timestamp = utc_timestamp();
  if (reg) m.regime = regime_json(*reg);
  m.grid = grid_json(c);
  m.options = options_json(c);
  return m;
}

std::pair<long, long> parse_range(const std::string& s) {
  const auto p = s.find("..");
  if (p == std::string::npos) throw ParameterError("--omega-scan expects a..b");
  try {
    return {std::stol(s.substr(0, p)), std::stol(s.substr(p + 2))};
  } catch (const std::exception&) {
    throw ParameterError("--omega-scan expects integers a..b");
  }
}

// ---------------------------------------------------------------- tf
int cmd_tf(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  const Regime reg = make_regime(c.epsilon, c.omega0);
  const TfReport tf = tf_report(reg);
  Table t;
  t.header = {"quantity", "value"};
  t.rows = {{"epsilon", fmt_human(reg.epsilon)},
            {"omega0", fmt_human(reg.omega0)},
            {"Omega", fmt_human(reg.Omega)},
            {"R_h", fmt_human(reg.R_h)},
            {"R_<", fmt_human(reg.R_less)},
            {"R_>", fmt_human(reg.R_greater)},
            {"E_TF", fmt_human(tf.e_tf)},
            {"mu_TF", fmt_human(tf.mu_tf)},
            {"omega_TF", fmt_human(omega_tf(reg))}};
  if (!f.omega_scan) {
    print_table(out, t);
    return kExitOk;
  }
  const auto [lo, hi] = parse_range(*f.omega_scan);
  const HatTfScan scan = hat_tf_scan(reg, lo, hi);
  Table s;
  s.header = {"omega", "hat_Omega", "delta", "hat_R", "hat_mu", "hat_e", "residual"};
  for (const auto& r : scan.rows)
    s.rows.push_back({std::to_string(r.omega), std::to_string(r.hat_Omega), fmt_machine(r.delta), fmt_machine(r.hat_R),
                      fmt_machine(r.hat_mu), fmt_machine(r.hat_e), fmt_machine(r.residual)});
  if (f.csv) {
    write_csv(*f.csv, s);
    print_table(out, t);
    out << "argmin omega = " << scan.argmin << "\n";
  } else {
    write_csv(out, s);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- profile / phase / cost
int cmd_profile(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  const Regime reg = make_regime(c.epsilon, c.omega0, HolePolicy::Allow);
  const RadialGrid grid = profile_grid(c, reg);
  const RadialProfile p = c.solve.omega ? minimize_profile(reg, *c.solve.omega, grid)
                                        : optimize_phase(reg, grid).profile;
  Table t;
  t.header = {"quantity", "value"};
  t.rows = {{"omega", std::to_string(p.omega)},
            {"hat_Omega", std::to_string(p.hat_Omega)},
            {"energy", fmt_human(p.energy)},
            {"mu_hat", fmt_human(p.mu_hat)},
            {"el_residual", fmt_human(p.el_residual)},
            {"compatibility", fmt_human(compatibility_residual(p))},
            {"converged", p.converged ? "yes" : "no"}};
  print_table(out, t);
  if (!f.run.empty()) {
    ensure_run_dir(f.run);
    Table csv;
    csv.header = {"r", "g", "g2", "rho_tf"};
    for (int i = 0; i < grid.n; ++i)
      csv.rows.push_back({fmt_machine(grid.r[i]), fmt_machine(p.g[i]), fmt_machine(p.g[i] * p.g[i]),
                          fmt_machine(tf_density(reg, grid.r[i]))});
    write_csv((fs::path(f.run) / "tables/profile.csv").string(), csv);
    write_text(fs::path(f.run) / "config.json", config_to_json(c));
    RunManifest m = new_manifest("profile", c, &reg);
    add_output(m, f.run, "config.json");
    add_output(m, f.run, "tables/profile.csv");
    m.summary["omega"] = p.omega;
    m.summary["hat_Omega"] = p.hat_Omega;
    m.summary["energy"] = p.energy;
    m.summary["mu_hat"] = p.mu_hat;
    m.summary["el_residual"] = p.el_residual;
    write_manifest(f.run, m);
  }
  return kExitOk;
}

int cmd_phase(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  const Regime reg = make_regime(c.epsilon, c.omega0, c.domain == Domain::Annulus ? HolePolicy::Require : HolePolicy::Allow);
  const RadialGrid grid = profile_grid(c, reg);
  const PhaseResult ph = optimize_phase(reg, grid);
  out << "omega* = " << ph.omega_star << "  (hat_Omega = " << ph.profile.hat_Omega << ", omega_TF = "
      << fmt_human(omega_tf(reg)) << ")\n";
  Table t;
  t.header = {"omega", "energy", "mu_hat"};
  for (const auto& r : ph.table) t.rows.push_back({std::to_string(r.omega), fmt_human(r.energy), fmt_human(r.mu_hat)});
  print_table(out, t);
  if (!f.run.empty()) {
    ensure_run_dir(f.run);
    Table csv;
    csv.header = t.header;
    for (const auto& r : ph.table) csv.rows.push_back({std::to_string(r.omega), fmt_machine(r.energy), fmt_machine(r.mu_hat)});
    write_csv((fs::path(f.run) / "tables/phase.csv").string(), csv);
    write_text(fs::path(f.run) / "config.json", config_to_json(c));
    RunManifest m = new_manifest("phase", c, &reg);
    add_output(m, f.run, "config.json");
    add_output(m, f.run, "tables/phase.csv");
    m.summary["omega_star"] = ph.omega_star;
    m.summary["hat_Omega"] = ph.profile.hat_Omega;
    m.summary["energy"] = ph.profile.energy;
    m.summary["compatibility"] = compatibility_residual(ph.profile);
    write_manifest(f.run, m);
  }
  return kExitOk;
}

Table cost_table(const CostCurve& cc) {
  Table t;
  t.header = {"r", "g2", "B", "F", "H", "H_signed"};
  for (std::size_t k = 0; k < cc.radii.size(); ++k)
    t.rows.push_back({fmt_machine(cc.radii[k]), fmt_machine(cc.g2[k]), fmt_machine(cc.B[k]), fmt_machine(cc.F[k]),
                      fmt_machine(cc.H[k]), fmt_machine(cc.H_signed[k])});
  return t;
}

int cmd_cost(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  const Regime reg = make_regime(c.epsilon, c.omega0);
  const RadialGrid grid = profile_grid(c, reg);
  const PhaseResult ph = optimize_phase(reg, grid);
  const CostCurve cc = cost_H(ph.profile, potential_F(ph.profile));
  const CostCurve tc = tf_cost_curve(reg, ph.omega_star, c.nodes);
  Table t;
  t.header = {"quantity", "value"};
  t.rows = {{"omega*", std::to_string(ph.omega_star)},
            {"min_bulk_H", fmt_human(cc.h_min)},
            {"argmin_r", fmt_human(cc.h_min_radius)},
            {"min_bulk_H_tf", fmt_human(tc.h_min)},
            {"F(1)", fmt_human(cc.F.back())},
            {"3*omega0-2/pi", fmt_human(3.0 * reg.omega0 - 2.0 / kPi)}};
  print_table(out, t);
  if (!f.run.empty()) {
    ensure_run_dir(f.run);
    write_csv((fs::path(f.run) / "tables/cost.csv").string(), cost_table(cc));
    write_csv((fs::path(f.run) / "tables/cost_tf.csv").string(), cost_table(tc));
    write_text(fs::path(f.run) / "config.json", config_to_json(c));
    RunManifest m = new_manifest("cost", c, &reg);
    add_output(m, f.run, "config.json");
    add_output(m, f.run, "tables/cost.csv");
    add_output(m, f.run, "tables/cost_tf.csv");
    m.summary["omega_star"] = ph.omega_star;
    m.summary["H_min"] = cc.h_min;
    m.summary["H_min_radius"] = cc.h_min_radius;
    m.summary["H_min_tf"] = tc.h_min;
    write_manifest(f.run, m);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- 2-D
struct VortexSummary {
  ordered_json json;
  long bulk_count = 0;
  std::optional<int> degree;
  long hat_Omega = 0;
  long omega_star = 0;
};

VortexSummary analyse_field(const DiscField& psi, const Regime& reg, const RunConfig& c, bool full) {
  VortexSummary s;
  const PhaseResult ph = optimize_phase(reg, psi.grid.radial);
  s.hat_Omega = ph.profile.hat_Omega;
  s.omega_star = ph.omega_star;
  const DiscField u = decompose_u(psi, ph.profile);
  const VortexSet vs = detect_bulk_vortices(u, reg);
  s.bulk_count = static_cast<long>(vs.size());
  ordered_json arr = ordered_json::array();
  for (const auto& b : vs.items)
    arr.push_back({{"r", b.r}, {"theta", b.theta}, {"radius", b.radius}, {"degree", b.degree}, {"cell", b.cell}});
  s.json["omega_star"] = ph.omega_star;
  s.json["hat_Omega"] = ph.profile.hat_Omega;
  s.json["bulk_vortices"] = arr;
  s.json["bulk_vortex_count"] = s.bulk_count;
  s.json["bulk_total_degree"] = vs.total_degree();
  try {
    s.degree = boundary_degree(psi, ph.profile);
    s.json["boundary_degree"] = *s.degree;
  } catch (const NumericalError& e) {
    s.json["boundary_degree"] = nullptr;
    s.json["boundary_degree_error"] = e.what();
  }
  if (!full) return s;
  try {
    const CellDecomposition d = cell_decomposition(u, ph.profile, c.cells);
    int counts[3] = {0, 0, 0};
    for (auto l : d.label) ++counts[static_cast<int>(l)];
    s.json["cells"] = {{"count", d.count},
                       {"alpha", d.alpha},
                       {"threshold", d.threshold},
                       {"n_bad", d.n_bad},
                       {"bad_bound", d.bad_bound},
                       {"F_total", d.F_total},
                       {"pleasant", counts[0]},
                       {"average", counts[1]},
                       {"unpleasant", counts[2]},
                       {"boundary_kinetic", d.boundary_kinetic},
                       {"boundary_quartic", d.boundary_quartic}};
    const BallResult br = grow_merge_balls(u, ph.profile, d);
    ordered_json balls = ordered_json::array();
    for (std::size_t k = 0; k < br.balls.items.size(); ++k) {
      const auto& b = br.balls.items[k];
      balls.push_back({{"r", b.r},
                       {"theta", b.theta},
                       {"radius", b.radius},
                       {"degree", b.degree},
                       {"cell", b.cell},
                       {"kinetic", br.kinetic[k]},
                       {"kinetic_floor", br.floor[k]}});
    }
    s.json["balls"] = balls;
    s.json["ball_budget"] = br.budget;
    if (!br.warning.empty()) s.json["ball_warning"] = br.warning;
  } catch (const ParameterError& e) {
    s.json["cells_error"] = e.what();
  }
  return s;
}

Table winding_table(const DiscField& u) {
  const WindingGrid W = winding_grid(u);
  Table t;
  t.header = {"i", "j", "r", "theta", "winding", "masked"};
  const PolarGrid& G = u.grid;
  for (int i = 0; i < W.rows; ++i)
    for (int j = 0; j < W.Nt; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * W.Nt + j;
      if (W.winding[k] == 0 && !W.mask[k]) continue;
      t.rows.push_back({std::to_string(i), std::to_string(j), fmt_machine(0.5 * (G.radial.r[i] + G.radial.r[i + 1])),
                        fmt_machine(G.theta[j] + 0.5 * G.dtheta), std::to_string(W.winding[k]),
                        std::to_string(static_cast<int>(W.mask[k]))});
    }
  return t;
}

int cmd_minimize(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  ensure_run_dir(f.run);
  const fs::path run(f.run);
  const Regime reg = make_regime(c.epsilon, c.omega0, HolePolicy::Allow);
  const PolarGrid grid = make_disc_polar_grid(c.Nr, c.Nt, c.r0);
  write_text(run / "config.json", config_to_json(c));
  SolveOptions so = c.solve;
  so.failure_dump = (run / "fields/failed_iterate.gpvf").string();
  const SolveResult res = minimize_gp(reg, grid, so);
  write_gpvf((run / "fields/psi.gpvf").string(), res.field, reg.epsilon, reg.omega0);
  Table h;
  h.header = {"iteration", "energy"};
  for (std::size_t k = 0; k < res.history.size(); ++k) h.rows.push_back({std::to_string(k), fmt_machine(res.history[k])});
  write_csv((run / "tables/history.csv").string(), h);

  RunManifest m = new_manifest("minimize", c, &reg);
  add_output(m, f.run, "config.json");
  add_output(m, f.run, "fields/psi.gpvf");
  add_output(m, f.run, "tables/history.csv");
  const ChemicalPotential cp = chemical_potential_gp(res, reg);
  m.summary["energy"] = res.energy;
  m.summary["mu"] = cp.mu;
  m.summary["residual"] = cp.residual;
  m.summary["converged"] = res.converged;
  m.summary["iterations"] = res.iterations;
  m.summary["stop_reason"] = res.stop_reason;
  m.summary["init_omega"] = res.init_omega;
  m.summary["wallclock_s"] = res.wallclock;
  write_manifest(f.run, m);
  out << "energy " << fmt_human(res.energy) << "  residual " << fmt_human(cp.residual) << "  iterations "
      << res.iterations << "  " << res.stop_reason << "\n";
  return kExitOk;
}

int cmd_vortices(const Flags& f, std::ostream& out) {
  if (f.run.empty()) throw ParameterError("--run <dir> is required for this command");
  const fs::path run(f.run);
  RunManifest m = read_manifest(f.run);
  if (!fs::exists(run / "fields/psi.gpvf"))
    throw ParameterError("missing input artifact: fields/psi.gpvf (run `minimize` first)");
  Flags ff = f;
  if (ff.config.empty()) ff.config = (run / "config.json").string();
  const RunConfig c = resolve(ff);
  const GpvfFile file = read_gpvf((run / "fields/psi.gpvf").string());
  const Regime reg = make_regime(file.epsilon, file.omega0, HolePolicy::Allow);
  DiscField psi = file.field;
  normalize_field(psi);  // stored as float32
  const VortexSummary s = analyse_field(psi, reg, c, true);
  write_text(run / "vortices.json", s.json.dump(2) + "\n");
  const PhaseResult ph = optimize_phase(reg, psi.grid.radial);
  write_csv((run / "tables/winding.csv").string(), winding_table(decompose_u(psi, ph.profile)));
  add_output(m, f.run, "vortices.json");
  add_output(m, f.run, "tables/winding.csv");
  m.summary["bulk_vortex_count"] = s.bulk_count;
  m.summary["boundary_degree"] = s.json["boundary_degree"];
  m.summary["omega_star"] = s.omega_star;
  m.summary["hat_Omega"] = s.hat_Omega;
  write_manifest(f.run, m);
  out << s.json.dump(2) << "\n";
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  const RunConfig c = resolve(f);
  ensure_run_dir(f.run);
  const fs::path run(f.run);
  write_text(run / "config.json", config_to_json(c));

  std::vector<std::pair<double, double>> family;
  for (double w : c.sweep_omega0) family.emplace_back(c.epsilon, w);
  SweepOptions so;
  so.Nr = c.Nr;
  so.Nt = c.Nt;
  so.r0 = c.r0;
  so.solve = c.solve;
  so.warm_start = c.warm_start;
  const auto pts = sweep(family, so);

  RunManifest m = new_manifest("sweep", c, nullptr);
  m.regime = {{"epsilon", c.epsilon}, {"omega0", c.sweep_omega0}};
  add_output(m, f.run, "config.json");
  Table t;
  t.header = {"epsilon", "omega0", "ok", "energy", "residual", "converged", "iterations", "bulk_vortices",
              "boundary_degree", "hat_Omega", "error"};
  std::vector<std::pair<double, long>> counts;
  int failures = 0;
  double wall = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    std::vector<std::string> row = {fmt_machine(p.epsilon), fmt_machine(p.omega0), p.ok ? "1" : "0"};
    if (p.ok) {
      const Regime reg = make_regime(p.epsilon, p.omega0, HolePolicy::Allow);
      const std::string name = "fields/psi_" + std::to_string(k) + ".gpvf";
      write_gpvf((run / name).string(), p.result.field, p.epsilon, p.omega0);
      add_output(m, f.run, name);
      std::string err;
      VortexSummary s;
      try {
        s = analyse_field(p.result.field, reg, c, false);
        counts.emplace_back(p.omega0, s.bulk_count);
      } catch (const std::exception& e) {
        err = e.what();
        ++failures;
      }
      wall += p.result.wallclock;
      row.insert(row.end(), {fmt_machine(p.result.energy), fmt_machine(p.result.residual),
                             p.result.converged ? "1" : "0", std::to_string(p.result.iterations),
                             err.empty() ? std::to_string(s.bulk_count) : "",
                             s.degree ? std::to_string(*s.degree) : "", std::to_string(s.hat_Omega), err});
    } else {
      ++failures;
      row.insert(row.end(), {"", "", "0", "0", "", "", "", p.error});
    }
    t.rows.push_back(row);
  }
  write_csv((run / "tables/sweep.csv").string(), t);
  add_output(m, f.run, "tables/sweep.csv");

  std::sort(counts.begin(), counts.end());
  m.summary["points"] = pts.size();
  m.summary["failures"] = failures;
  m.summary["wallclock_s"] = wall;
  // smallest omega0 from which every later point is vortex-free, and its predecessor
  ordered_json bracket = nullptr;
  for (std::size_t k = counts.size(); k-- > 1;) {
    if (counts[k].second != 0) break;
    if (counts[k - 1].second > 0) {
      bracket = {{"lower", counts[k - 1].first}, {"upper", counts[k].first}};
      break;
    }
  }
  m.summary["transition"] = bracket;
  write_manifest(f.run, m);
  write_text(run / "report.md", render_report(f.run));

  Table h;
  h.header = {"omega0", "energy", "bulk_vortices", "boundary_degree", "converged"};
  for (const auto& r : t.rows) h.rows.push_back({r[1], r[3].empty() ? "-" : fmt_human(std::stod(r[3])), r[7], r[8], r[5]});
  print_table(out, h);
  if (!bracket.is_null())
    out << "transition bracket: [" << fmt_human(bracket["lower"].get<double>()) << ", "
        << fmt_human(bracket["upper"].get<double>()) << "]\n";
  return failures ? kExitNumerical : kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out) {
  if (f.run.empty()) throw ParameterError("--run <dir> is required for this command");
  const std::string md = render_report(f.run);
  write_text(fs::path(f.run) / "report.md", md);
  out << md;
  return kExitOk;
}

std::string json_scalar(const ordered_json& v) {
  if (v.is_number_float()) return fmt_human(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string render_report(const std::string& run_dir) {
  const RunManifest m = read_manifest(run_dir);
  std::ostringstream os;
  os << "# Run report\n\n";
  os << "- command: `" << m.command << "`\n";
  os << "- tool version: " << m.tool_version << "\n";
  os << "- created: " << m.timestamp << "\n";
  const auto bad = verify_manifest(run_dir, m);
  os << "- checksums: " << (bad.empty() ? "all outputs verified" : std::to_string(bad.size()) + " mismatched") << "\n\n";

  os << "## Regime\n\n";
  Table r;
  r.header = {"key", "value"};
  for (auto it = m.regime.begin(); it != m.regime.end(); ++it) r.rows.push_back({it.key(), json_scalar(it.value())});
  print_markdown(os, r);

  os << "\n## Summary\n\n";
  Table s;
  s.header = {"key", "value"};
  for (auto it = m.summary.begin(); it != m.summary.end(); ++it) s.rows.push_back({it.key(), json_scalar(it.value())});
  print_markdown(os, s);

  const fs::path sweep_csv = fs::path(run_dir) / "tables/sweep.csv";
  if (m.command == "sweep" && fs::exists(sweep_csv)) {
    const Table t = read_csv(sweep_csv.string());
    Table v;
    v.header = {"omega0", "bulk vortices", "boundary degree", "energy", "converged"};
    const auto col = [&](const std::string& name) {
      return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
    };
    for (const auto& row : t.rows) {
      const std::string e = row[col("energy")];
      v.rows.push_back({fmt_human(std::stod(row[col("omega0")])), row[col("bulk_vortices")], row[col("boundary_degree")],
                        e.empty() ? "" : fmt_human(std::stod(e)), row[col("converged")]});
    }
    os << "\n## Rotation vs bulk vortex count\n\n";
    print_markdown(os, v);
    os << "\n" << v.rows.size() << " rows.";
    const auto& tr = m.summary.contains("transition") ? m.summary["transition"] : ordered_json();
    if (tr.is_object())
      os << " Transition bracket: [" << fmt_human(tr["lower"].get<double>()) << ", " << fmt_human(tr["upper"].get<double>())
         << "].";
    os << "\n";
  }

  os << "\n## Outputs\n\n";
  Table o;
  o.header = {"path", "sha256"};
  for (const auto& x : m.outputs) o.rows.push_back({x.path, x.sha256});
  print_markdown(os, o);
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Giant-vortex toolkit for fast-rotating condensates on the unit disc", "gpvortex"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--config", f.config, "JSON config file (flags override it)");
    sc->add_option("--epsilon", f.epsilon, "coupling parameter in (0,1)");
    sc->add_option("--omega0", f.omega0, "rotation parameter Omega0 > 0");
    sc->add_option("--threads", f.threads, "worker threads (default GPVORTEX_THREADS or all cores)");
  };
  auto profile_opts = [&](CLI::App* sc) {
    sc->add_option("--nodes", f.nodes, "1-D grid nodes");
    sc->add_option("--domain", f.domain, "disc | annulus");
    sc->add_option("--omega", f.omega, "phase offset omega (default: optimal)");
    sc->add_option("--run", f.run, "run directory for artifacts");
  };
  auto solver_opts = [&](CLI::App* sc) {
    sc->add_option("--run", f.run, "run directory")->required();
    sc->add_option("--Nr", f.Nr, "radial nodes");
    sc->add_option("--Nt", f.Nt, "angular nodes (even)");
    sc->add_option("--r0", f.r0, "inner cutoff radius");
    sc->add_option("--max-iters", f.max_iters, "iteration cap");
    sc->add_option("--tol", f.tol, "relative energy decrease over 10 iterations");
    sc->add_option("--residual-tol", f.residual_tol, "GP residual threshold");
    sc->add_option("--step", f.step, "fixed | backtracking");
    sc->add_option("--fixed-step", f.fixed_step, "step size for the fixed policy");
    sc->add_option("--preconditioner", f.precond, "none | inverse-laplacian");
    sc->add_option("--seed", f.seed, "RNG seed");
    sc->add_option("--init", f.init, "giant-vortex | planted-lattice | random-phase");
    sc->add_option("--lattice-vortices", f.lattice, "vortex count for planted-lattice");
    sc->add_option("--omega", f.omega, "giant-vortex phase for the initial field");
    sc->add_option("--nodes", f.nodes, "1-D grid nodes");
  };

  auto* tf = app.add_subcommand("tf", "closed-form TF quantities");
  common(tf);
  tf->add_option("--omega-scan", f.omega_scan, "integer range a..b for the hat-TF family");
  tf->add_option("--csv", f.csv, "write the scan to this CSV instead of stdout");
  auto* profile = app.add_subcommand("profile", "1-D giant-vortex profile");
  common(profile);
  profile_opts(profile);
  auto* phase = app.add_subcommand("phase", "optimal integer phase of the 1-D problem");
  common(phase);
  profile_opts(phase);
  auto* cost = app.add_subcommand("cost", "potential F and cost function H");
  common(cost);
  profile_opts(cost);
  auto* minimize = app.add_subcommand("minimize", "2-D GP minimization");
  common(minimize);
  solver_opts(minimize);
  auto* vortices = app.add_subcommand("vortices", "vortex diagnostics of a minimize run");
  vortices->add_option("--run", f.run, "run directory from `minimize`")->required();
  vortices->add_option("--alpha", f.alpha, "cell threshold exponent in [0, 1/2)");
  vortices->add_option("--cell-c", f.cell_c, "cell side constant");
  vortices->add_option("--threads", f.threads, "worker threads");
  auto* sw = app.add_subcommand("sweep", "minimize over a list of Omega0 values");
  common(sw);
  solver_opts(sw);
  sw->add_option("--omega0-list", f.omega0_list, "comma-separated Omega0 values");
  sw->add_flag("--warm-start{true},--cold-start{false}", f.warm, "warm start along the family");
  auto* report = app.add_subcommand("report", "markdown summary of a run directory");
  report->add_option("--run", f.run, "run directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (f.threads > 0) set_thread_count(f.threads);
  try {
    if (*tf) return cmd_tf(f, out);
    if (*profile) return cmd_profile(f, out);
    if (*phase) return cmd_phase(f, out);
    if (*cost) return cmd_cost(f, out);
    if (*minimize) return cmd_minimize(f, out);
    if (*vortices) return cmd_vortices(f, out);
    if (*sw) return cmd_sweep(f, out);
    if (*report) return cmd_report(f, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (last residual " << e.residual << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace gpv::io
