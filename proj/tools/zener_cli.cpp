#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <type_traits>

#include "CLI11.hpp"
#include "zener/config.hpp"
#include "zener/io.hpp"
#include "zener/zener.hpp"

namespace fs = std::filesystem;
using namespace zener;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kGate = 4 };

struct Overrides {
  std::string config;
  std::string scheme;
  int order = 0;
  int levels = 0;
  double dt = 0.0;
  double penalty = 0.0;
  int threads = 0;
  std::string out;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.scheme.empty()) {
    if (o.scheme == "cg") c.scheme = Scheme::CG;
    else if (o.scheme == "dg") c.scheme = Scheme::DG;
    else throw ConfigError("--scheme must be cg or dg");
  }
  if (o.order) c.order = o.order;
  if (o.levels) c.levels = o.levels;
  if (o.dt != 0.0) {
    if (!(o.dt > 0.0)) throw ConfigError("--dt must be positive");
    c.dt = o.dt;
    c.steps = 0;
  }
  if (o.penalty != 0.0) {
    c.penalty.mode = PenaltyConfig::Mode::Fixed;
    c.penalty.a = o.penalty;
  }
  if (o.threads) c.threads = o.threads;
  if (!o.out.empty()) c.output_dir = o.out;
  validate_config(c);
  return c;
}

// materials of the manufactured case when there is one
MaterialTable run_materials(const RunConfig& c, const std::optional<ManufacturedCase>& mc) {
  return mc ? mc->materials : c.materials;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

template <class Solver>
void time_loop(Solver& solver, const ProblemData& data, const RunConfig& c,
               std::chrono::steady_clock::time_point t0) {
  const Discretization& D = solver.disc();
  const TimeGrid& grid = solver.grid();
  std::ofstream ecsv(fs::path(c.output_dir) / "energy.csv");
  if (!ecsv) throw ConfigError("cannot write energy.csv in " + c.output_dir);
  EnergyCsv energy(ecsv);
  SchemeState s = solver.initialize(data);
  int dumps = 0;
  auto dump = [&](int level) {
    char name[32];
    std::snprintf(name, sizeof name, "fields_%06d.vtk", level);
    const Vector acc = solver.acceleration(s, data);
    write_vtk_file((fs::path(c.output_dir) / name).string(), D.mesh(),
                   sample_cell_fields(D, s.p_curr, s.r_curr, acc));
    ++dumps;
  };
  auto jump = [&] {
    if constexpr (std::is_same_v<Solver, DgSolver>) return solver.jump_seminorm(s.p_curr);
    return 0.0;
  };
  energy.add(s.step, grid.t(s.step), solver.energy(s), jump());
  if (c.output_every > 0) dump(s.step);
  for (int k = 1; k < grid.L; ++k) {
    solver.step(s);
    const double e = solver.energy(s);
    if (!std::isfinite(e)) throw SolverError("energy is not finite at step " + std::to_string(s.step));
    energy.add(s.step, grid.t(s.step), e, jump());
    if (c.output_every > 0 && s.step % c.output_every == 0 && s.step != grid.L) dump(s.step);
  }
  dump(s.step);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << std::setprecision(10) << "run: scheme=" << to_string(c.scheme) << " k=" << c.order
            << " elements=" << D.num_elements() << " steps=" << grid.L << " dt=" << grid.dt()
            << " final_energy=" << solver.energy(s) << " dumps=" << dumps << " wall=" << std::setprecision(3)
            << wall << "s\n";
}

int cmd_run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::optional<ManufacturedCase> mc = config_case(c);
  RunConfig rc = c;
  rc.materials = run_materials(c, mc);
  const Mesh mesh = config_mesh(rc);
  const ProblemData data = config_data(c, rc.materials);
  auto disc = make_discretization(mesh, rc.materials, c.order);
  ensure_dir(c.output_dir);
  if (c.scheme == Scheme::CG) {
    TimeGrid grid;
    if (c.steps > 0 || c.dt > 0.0) {
      grid = c.grid();
    } else {
      const double dt = c.dt_coeff * std::pow(disc->mesh_size(), 0.5 * (c.order + 1));
      grid = TimeGrid(c.T, std::max(2, static_cast<int>(std::ceil(c.T / dt - 1e-9))));
    }
    CgHybridSolver solver(disc, grid, c.threads);
    time_loop(solver, data, c, t0);
  } else {
    const PenaltyChoice pc = choose_penalty(*disc, c.penalty);
    const DgSolver probe(disc, TimeGrid(c.T, 2), pc.a, c.threads);
    const double dt_max = probe.estimate_cfl();
    TimeGrid grid;
    if (c.steps > 0 || c.dt > 0.0) {
      grid = c.grid();
      if (grid.dt() > dt_max)
        std::cerr << "warning: dt = " << grid.dt() << " exceeds the stability limit dt_max = " << dt_max
                  << "; the explicit scheme may blow up\n";
    } else {
      grid = TimeGrid(c.T, std::max(2, static_cast<int>(std::ceil(c.T / (c.cfl_fraction * dt_max)))));
    }
    DgSolver solver(disc, grid, pc.a, c.threads);
    time_loop(solver, data, c, t0);
  }
  return kOk;
}

int cmd_convergence(const RunConfig& c) {
  const std::optional<ManufacturedCase> mc = config_case(c);
  if (!mc) throw ConfigError("convergence needs a manufactured case (composite or elastic), not '" + c.case_name + "'");
  if (c.levels < 3) throw ConfigError("convergence needs at least 3 levels");
  RunConfig rc = c;
  rc.materials = mc->materials;
  StudyOptions o;
  o.base = config_mesh(rc);
  o.base_cells = c.mesh_file.empty() ? c.mesh_n : std::max(1, static_cast<int>(std::lround(1.0 / o.base.mesh_size())));
  o.levels = c.levels;
  o.T = c.T;
  o.dt_coeff = c.dt_coeff;
  o.cfl_fraction = c.cfl_fraction;
  o.penalty = c.penalty;
  o.threads = c.threads;
  std::cout << "level      h          dt        err_S      rate_S     err_vel    err_rot    seconds\n";
  o.on_row = [](const ErrorRow& r) {
    std::printf("%5d  %9.3e  %9.3e  %9.3e  %8.3f  %9.3e  %9.3e  %8.2f\n", r.level, r.h, r.dt, r.err.S, r.rate_S,
                r.err.vel, r.err.rot, r.seconds);
    std::fflush(stdout);
  };
  const ErrorReport rep = convergence_study(c.scheme, *mc, c.order, o);
  ensure_dir(c.output_dir);
  const fs::path csv = fs::path(c.output_dir) / "convergence.csv";
  std::ofstream os(csv);
  if (!os) throw ConfigError("cannot write " + csv.string());
  rep.write_csv(os);
  const double rate = rep.last().rate_S;
  if (!(rate >= c.order - 0.3)) {
    std::cerr << "convergence gate failed: rate " << rate << " < " << c.order - 0.3 << '\n';
    return kGate;
  }
  std::cout << "convergence gate passed: rate " << rate << '\n';
  return kOk;
}

int cmd_inspect(const RunConfig& c) {
  const std::optional<ManufacturedCase> mc = config_case(c);
  RunConfig rc = c;
  rc.materials = run_materials(c, mc);
  const Mesh mesh = config_mesh(rc);
  auto disc = make_discretization(mesh, rc.materials, c.order);
  const DofMap& d = disc->dofs();
  int zeta = 0;
  for (int K = 0; K < disc->num_elements(); ++K)
    if (disc->viscous(K)) zeta += 4 * d.n;
  std::cout << std::setprecision(6);
  std::cout << "elements      " << disc->num_elements() << '\n'
            << "h             " << disc->mesh_size() << '\n'
            << "order         " << c.order << '\n'
            << "gamma dofs    " << d.num_stress() - zeta << '\n'
            << "zeta dofs     " << zeta << '\n'
            << "rotation dofs " << d.num_rotation() << '\n'
            << "displ dofs    " << d.num_displacement() << '\n'
            << "trace dofs    " << disc->num_trace() << '\n';
  const int ny = disc->num_elements() * 3 * d.n_low;
  if (ny <= 4000) std::cout << "inf-sup       " << inf_sup_estimate(*disc) << '\n';
  else std::cout << "inf-sup       skipped (" << ny << " multipliers)\n";
  PenaltyConfig auto_cfg = c.penalty;
  auto_cfg.mode = PenaltyConfig::Mode::Auto;
  const PenaltyChoice pc = choose_penalty(*disc, auto_cfg);
  const double a = c.penalty.mode == PenaltyConfig::Mode::Fixed ? c.penalty.a : pc.a;
  std::cout << "C_tr          " << std::sqrt(pc.trace_constant_sq) << '\n'
            << "a0            " << pc.a0 << '\n'
            << "penalty       " << a << '\n'
            << "dt_max        " << DgSolver(disc, TimeGrid(c.T, 2), a, c.threads).estimate_cfl() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zener: mixed finite elements for composite elastic/viscoelastic waves"};
  app.require_subcommand(1);
  Overrides o;
  auto add_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--scheme", o.scheme, "cg or dg");
    sub->add_option("--order", o.order, "polynomial order k (1..3)");
    sub->add_option("--levels", o.levels, "refinement levels (convergence)");
    sub->add_option("--dt", o.dt, "time step");
    sub->add_option("--penalty", o.penalty, "fixed DG penalty");
    sub->add_option("--threads", o.threads, "worker threads (1 is deterministic)");
    sub->add_option("--out", o.out, "output directory");
  };
  CLI::App* run = app.add_subcommand("run", "time-step one configuration and write field dumps");
  CLI::App* conv = app.add_subcommand("convergence", "refinement study against the manufactured solution");
  CLI::App* insp = app.add_subcommand("inspect", "dof counts and stability estimates");
  for (CLI::App* s : {run, conv, insp}) add_flags(s);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  try {
    const RunConfig c = resolve(o);
    if (run->parsed()) return cmd_run(c);
    if (conv->parsed()) return cmd_convergence(c);
    return cmd_inspect(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const TopologyError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const MaterialError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  }
}
