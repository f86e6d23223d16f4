#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <vector>

#include "zener/cg_solver.hpp"
#include "zener/dg_solver.hpp"
#include "zener/manufactured.hpp"
#include "zener/norms.hpp"

namespace zener {

// Max-in-time errors of one run (norms, not squares).
struct RunErrors {
  double S = 0.0;    // S-norm (CG) or S(h)-norm (DG)
  double vel = 0.0;  // |j_omega (p' - d0_t p_h)|
  double rot = 0.0;  // |r - r_h|
  double jump = 0.0; // |h^-1/2 [[j+ p_h]]|
  double S_elastic = 0.0, S_viscous = 0.0;
  double weak_symmetry = 0.0;  // worst |B_r p| / |p| over the run
};

struct RunObserver {
  // called with (level, t, p) for every stored level
  std::function<void(int, double, const Vector&)> on_level;
};

// Steps a solver through the whole grid and tracks the errors against the
// exact solution.  Velocity errors use the centred rate at t_1 .. t_{L-1}.
template <class Solver>
RunErrors run_and_measure(Solver& solver, const ManufacturedCase& mc, bool dg, const RunObserver* obs = nullptr) {
  const ErrorEvaluator ev(solver.disc_ptr(), mc.exact);
  const TimeGrid& grid = solver.grid();
  RunErrors out;
  auto level = [&](const Vector& p, const Vector& r, double t, int k) {
    RegionSums s = ev.stress_sq(p, t);
    if (dg) {
      const RegionSums j = ev.jump_sq(p);
      s += j;
      out.jump = std::max(out.jump, std::sqrt(j.all));
    }
    out.S = std::max(out.S, std::sqrt(s.all));
    out.S_elastic = std::max(out.S_elastic, std::sqrt(s.elastic));
    out.S_viscous = std::max(out.S_viscous, std::sqrt(s.viscous));
    out.rot = std::max(out.rot, std::sqrt(ev.rotation_sq(r, t).all));
    out.weak_symmetry = std::max(out.weak_symmetry, weak_symmetry_residual(solver.forms(), p));
    if (obs && obs->on_level) obs->on_level(k, t, p);
  };
  SchemeState s = solver.initialize(mc.data);
  level(s.p_prev, s.r_prev, 0.0, 0);
  level(s.p_curr, s.r_curr, grid.t(1), 1);
  for (int k = 1; k < grid.L; ++k) {
    solver.step(s);
    level(s.p_curr, s.r_curr, grid.t(k + 1), k + 1);
    out.vel = std::max(out.vel, std::sqrt(ev.rate_sq(s.centred_rate(), grid.t(k)).all));
  }
  return out;
}

struct ErrorRow {
  int level = 0;
  int cells = 0;  // mesh parameter n of the level
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  double penalty = 0.0;
  RunErrors err;
  double rate_S = std::numeric_limits<double>::quiet_NaN();
  double rate_vel = std::numeric_limits<double>::quiet_NaN();
  double rate_rot = std::numeric_limits<double>::quiet_NaN();
  double rate_jump = std::numeric_limits<double>::quiet_NaN();
  double rate_S_elastic = std::numeric_limits<double>::quiet_NaN();
  double rate_S_viscous = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct ErrorReport {
  Scheme scheme = Scheme::CG;
  int order = 1;
  std::vector<ErrorRow> rows;

  static double rate(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

  void compute_rates() {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const ErrorRow& a = rows[i - 1];
      ErrorRow& b = rows[i];
      b.rate_S = rate(a.err.S, b.err.S, a.h, b.h);
      b.rate_vel = rate(a.err.vel, b.err.vel, a.h, b.h);
      b.rate_rot = rate(a.err.rot, b.err.rot, a.h, b.h);
      b.rate_jump = rate(a.err.jump, b.err.jump, a.h, b.h);
      b.rate_S_elastic = rate(a.err.S_elastic, b.err.S_elastic, a.h, b.h);
      b.rate_S_viscous = rate(a.err.S_viscous, b.err.S_viscous, a.h, b.h);
    }
  }

  const ErrorRow& last() const { return rows.back(); }

  void write_csv(std::ostream& os) const {
    os << "level,h,dt,err_S,err_vel,err_rot,rate_S,rate_vel,rate_rot\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
      os << r.level << ',' << r.h << ',' << r.dt << ',' << r.err.S << ',' << r.err.vel << ',' << r.err.rot << ',';
      auto put = [&](double v) {
        if (std::isnan(v)) os << "";
        else os << v;
      };
      put(r.rate_S);
      os << ',';
      put(r.rate_vel);
      os << ',';
      put(r.rate_rot);
      os << '\n';
    }
  }
};

struct StudyOptions {
  Mesh base;                    // level 0 mesh; each level refines uniformly
  int base_cells = 1;           // n of the base mesh, for reporting
  int levels = 4;
  double T = 1.0;
  double dt_coeff = 0.5;        // CG: dt = dt_coeff * h^((k+1)/2), with h = 1/n
  double dt_scale = 1.0;        // extra factor on the CG step (for dt-halving checks)
  double cfl_fraction = 0.5;    // DG: dt = cfl_fraction * dt_max
  PenaltyConfig penalty;
  int threads = 1;
  std::function<void(const ErrorRow&)> on_row;
};

// mesh parameter used for the CG step size
inline double nominal_h(const StudyOptions& o, int level) { return 1.0 / (o.base_cells * std::pow(2.0, level)); }

inline ErrorReport convergence_study(Scheme scheme, const ManufacturedCase& mc, int k, const StudyOptions& o) {
  if (o.levels < 3) throw std::invalid_argument("convergence_study: need at least three levels");
  if (!(constitutive_residual(mc) <= 1e-10))
    throw SolverError("manufactured case '" + mc.name + "' fails its constitutive residual check");
  ErrorReport rep;
  rep.scheme = scheme;
  rep.order = k;
  Mesh mesh = o.base;
  for (int l = 0; l < o.levels; ++l) {
    if (l > 0) mesh = refine_uniform(mesh);
    const auto t0 = std::chrono::steady_clock::now();
    auto disc = make_discretization(mesh, mc.materials, k);
    ErrorRow row;
    row.level = l;
    row.cells = o.base_cells << l;
    row.h = disc->mesh_size();
    if (scheme == Scheme::CG) {
      const double dt = o.dt_scale * o.dt_coeff * std::pow(nominal_h(o, l), 0.5 * (k + 1));
      const int L = std::max(2, static_cast<int>(std::ceil(o.T / dt - 1e-9)));
      CgHybridSolver solver(disc, TimeGrid(o.T, L), o.threads);
      row.err = run_and_measure(solver, mc, false);
      row.dt = solver.grid().dt();
      row.steps = L;
    } else {
      const PenaltyChoice pc = choose_penalty(*disc, o.penalty);
      // the CFL estimate does not depend on the step size used to build the solver
      const DgSolver probe(disc, TimeGrid(o.T, 2), pc.a, o.threads);
      const double dt_max = probe.estimate_cfl();
      const int L = std::max(2, static_cast<int>(std::ceil(o.T / (o.cfl_fraction * dt_max))));
      DgSolver solver(disc, TimeGrid(o.T, L), pc.a, o.threads);
      row.err = run_and_measure(solver, mc, true);
      row.dt = solver.grid().dt();
      row.steps = L;
      row.penalty = pc.a;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(row);
    rep.compute_rates();
    if (o.on_row) o.on_row(rep.rows.back());
  }
  return rep;
}

struct EnergySeries {
  std::vector<double> t;       // t_{k+1/2}
  std::vector<double> energy;  // E^{k+1/2}
  double max_relative_increase = 0.0;
  bool non_increasing(double tol = 1e-9) const { return max_relative_increase <= tol; }
  double relative_spread() const {
    if (energy.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(energy.begin(), energy.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  }
};

// E^{k+1/2} for k = 0 .. L-1 of an unforced or forced run
template <class Solver>
EnergySeries energy_trace(Solver& solver, const ProblemData& data) {
  const TimeGrid& grid = solver.grid();
  EnergySeries es;
  SchemeState s = solver.initialize(data);
  auto record = [&] {
    const double e = solver.energy(s);
    if (!es.energy.empty()) {
      const double prev = es.energy.back();
      const double inc = (e - prev) / std::max(std::abs(prev), 1e-300);
      es.max_relative_increase = std::max(es.max_relative_increase, inc);
    }
    es.t.push_back(grid.t(s.step) - 0.5 * grid.dt());
    es.energy.push_back(e);
  };
  record();
  for (int k = 1; k < grid.L; ++k) {
    solver.step(s);
    record();
  }
  return es;
}

}  // namespace zener
