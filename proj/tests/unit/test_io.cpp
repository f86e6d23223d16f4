#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "zener/config.hpp"
#include "zener/io.hpp"

using namespace zt;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("zener_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(ZENER_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Vtk, RoundTrip) {
  const auto D = make_discretization(unit_square(2), composite_materials(), 1);
  std::mt19937 rng(3);
  const Vector p = random_vector(D->dofs().num_stress(), rng);
  const Vector r = random_vector(D->dofs().num_rotation(), rng);
  const Vector a = random_vector(D->dofs().num_displacement(), rng);
  const CellFields f = sample_cell_fields(*D, p, r, a);
  std::stringstream ss;
  write_vtk(ss, D->mesh(), f);
  const VtkData v = read_vtk(ss);
  ASSERT_EQ(v.points.size(), D->mesh().vertices.size());
  ASSERT_EQ(v.cells.size(), 8u);
  EXPECT_EQ(v.cells[3], D->mesh().elements[3]);
  const auto& sig = v.cell_data.at("sigma");
  const auto& gam = v.cell_data.at("gamma");
  const auto& oz = v.cell_data.at("omega_zeta");
  for (int K = 0; K < 8; ++K) {
    EXPECT_NEAR(sig[9 * K + 1], f.sigma[K](0, 1), 1e-14 * (1 + std::abs(f.sigma[K](0, 1))));
    EXPECT_NEAR(sig[9 * K], gam[9 * K] + oz[9 * K], 1e-13);
    EXPECT_EQ(sig[9 * K + 8], 0.0);
    EXPECT_NEAR(v.cell_data.at("rotation")[K], f.rotation[K], 1e-14 * (1 + std::abs(f.rotation[K])));
    EXPECT_NEAR(v.cell_data.at("acceleration")[3 * K + 1], f.acceleration[K][1], 1e-13);
    EXPECT_EQ(v.cell_data.at("subdomain")[K], D->mesh().subdomain[K]);
    if (!D->viscous(K)) EXPECT_EQ(oz[9 * K], 0.0);
  }
}

TEST(Vtk, RejectsMalformedInput) {
  std::stringstream a("hello\n");
  EXPECT_THROW(read_vtk(a), ParseError);
  std::stringstream b("# vtk DataFile Version 3.0\nt\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS 3 double\n0 0 0\n1 0\n");
  EXPECT_THROW(read_vtk(b), ParseError);
}

TEST(Csv, EnergyRoundTrip) {
  std::stringstream ss;
  EnergyCsv e(ss);
  e.add(1, 0.1, 2.5, 0.0);
  e.add(2, 0.2, 2.25, 1e-3);
  const CsvTable t = read_csv(ss);
  ASSERT_EQ(t.header, (std::vector<std::string>{"step", "t", "energy", "jump"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][2], 2.25);
  EXPECT_EQ(t.rows[1][3], 1e-3);
}

TEST(Csv, RejectsBadRows) {
  std::stringstream a("a,b\n1,2,3\n");
  EXPECT_THROW(read_csv(a), ParseError);
  std::stringstream b("a,b\n1,x\n");
  EXPECT_THROW(read_csv(b), ParseError);
  std::stringstream c("");
  EXPECT_THROW(read_csv(c), ParseError);
}

TEST(Config, ParsesFullSchema) {
  const RunConfig c = parse_config(R"({
    // comment
    "mesh": {"generator": "unit_square", "n": 6, "interface_x": 0.5},
    "materials": {"1": {"rho": 2.0, "C": {"lambda": 1.0, "mu": 1.0}},
                  "2": {"rho": 1.0, "omega": 0.3, "C": {"lambda": 1.0, "mu": 0.5}, "D": {"lambda": 2.0, "mu": 1.0}}},
    "scheme": "dg", "order": 2, "T": 0.5, "steps": 20,
    "penalty": {"mode": "fixed", "a": 12.0},
    "case": "free", "output": {"dir": "x", "every": 5},
    "levels": 3, "threads": 2, "cfl_fraction": 0.4, "dt_coeff": 0.3
  })");
  EXPECT_EQ(c.mesh_n, 6);
  EXPECT_EQ(c.scheme, Scheme::DG);
  EXPECT_EQ(c.order, 2);
  EXPECT_EQ(c.materials.at(1).rho, 2.0);
  EXPECT_EQ(c.materials.at(2).omega, 0.3);
  EXPECT_EQ(c.penalty.mode, PenaltyConfig::Mode::Fixed);
  EXPECT_EQ(c.penalty.a, 12.0);
  EXPECT_EQ(c.output_every, 5);
  EXPECT_EQ(c.grid().L, 20);
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(parse_config(R"({"penalty": 3.5})").penalty.a, 3.5);
  EXPECT_EQ(parse_config(R"({"T": 1.0, "dt": 0.3})").grid().L, 4);
}

TEST(Config, RejectsInvalidInput) {
  const char* bad[] = {
      "{",                                           // not JSON
      R"({"unknown": 1})",                           // unknown key
      R"({"scheme": "fem"})",                        // bad scheme
      R"({"mesh": {"generator": "disk"}})",          // unknown generator
      R"({"mesh": {"file": "a", "generator": "unit_square"}})",
      R"({"materials": {"x": {"rho": 1, "C": {"lambda": 1, "mu": 1}}}})",
      R"({"materials": {"1": {"rho": 1, "omega": 1, "C": {"lambda": 1, "mu": 1}}}})",  // D missing
      R"({"materials": {"1": {"rho": -1, "C": {"lambda": 1, "mu": 1}}}})",
      R"({"penalty": {"mode": "magic"}})",
      R"({"order": "two"})",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
  for (const char* text : {R"({"order": 4})", R"({"T": 0})", R"({"steps": 1})", R"({"case": "unknown"})",
                           R"({"penalty": {"mode": "fixed"}})", R"({"threads": 0})"})
    EXPECT_THROW(validate_config(parse_config(text)), ConfigError) << text;
  EXPECT_THROW(RunConfig{}.grid(), ConfigError);
}

TEST(Config, SubdomainsMustHaveMaterials) {
  RunConfig c = parse_config(R"({"materials": {"1": {"rho": 1, "C": {"lambda": 1, "mu": 1}}}})");
  EXPECT_THROW(config_mesh(c), ConfigError);
}

TEST(Config, MeshPathIsRelativeToConfig) {
  const fs::path d = scratch("relmesh");
  std::ofstream(d / "m.mesh") << "3 1\n0 0\n1 0\n0 1\n0 1 2 1\n";
  write_file(d / "c.json", R"({"mesh": {"file": "m.mesh"}})");
  const RunConfig c = load_config((d / "c.json").string());
  EXPECT_EQ(config_mesh(c).num_elements(), 1);
}

TEST(Cli, InspectReportsDofCounts) {
  const fs::path d = scratch("inspect");
  const fs::path cfg = write_file(d / "c.json", R"({"mesh": {"file": ")" + (fs::path(ZENER_SHARE_DIR) / "examples/two_triangles.mesh").string() +
                                                     R"("}, "case": "free"})");
  const CliResult r = run_cli("inspect --config " + cfg.string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  // one viscous and one elastic element, k = 1: 12 + 12 gamma, 12 zeta
  EXPECT_NE(r.out.find("gamma dofs    24"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("zeta dofs     12"), std::string::npos);
  EXPECT_NE(r.out.find("trace dofs    4"), std::string::npos);
  EXPECT_NE(r.out.find("dt_max"), std::string::npos);
}

TEST(Cli, InspectElasticMeshHasNoZeta) {
  const fs::path d = scratch("inspect_elastic");
  const fs::path cfg = write_file(d / "c.json", R"({"case": "elastic", "mesh": {"n": 2}})");
  const CliResult r = run_cli("inspect --config " + cfg.string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("zeta dofs     0"), std::string::npos) << r.out;
}

TEST(Cli, ZeroDataRunWritesZeroDumps) {
  const fs::path d = scratch("zero");
  const fs::path cfg = write_file(d / "c.json", R"({"case": "zero", "mesh": {"n": 2}, "T": 0.5, "steps": 6,
                                                  "output": {"every": 2}})");
  const CliResult r = run_cli("run --config " + cfg.string() + " --out " + (d / "out").string(), d);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("final_energy=0"), std::string::npos) << r.out;
  int files = 0;
  for (const auto& e : fs::directory_iterator(d / "out")) {
    if (e.path().extension() != ".vtk") continue;
    ++files;
    std::ifstream in(e.path());
    const VtkData v = read_vtk(in);
    for (const auto& [name, vals] : v.cell_data)
      if (name != "subdomain")
        for (double x : vals) EXPECT_EQ(x, 0.0) << name;
  }
  EXPECT_EQ(files, 4);  // levels 1, 2, 4 and the final level 6
  std::ifstream ein(d / "out" / "energy.csv");
  const CsvTable t = read_csv(ein);
  EXPECT_EQ(t.rows.size(), 6u);
}

TEST(Cli, ExitCodes) {
  const fs::path d = scratch("codes");
  EXPECT_EQ(run_cli("run --config " + (d / "missing.json").string(), d).code, 2);
  const fs::path bad = write_file(d / "bad.json", R"({"order": 7})");
  EXPECT_EQ(run_cli("inspect --config " + bad.string(), d).code, 2);
  EXPECT_EQ(run_cli("inspect --scheme fe", d).code, 2);
  EXPECT_EQ(run_cli("nonsense", d).code, 2);
  const CliResult one = run_cli("convergence --levels 1 --out " + (d / "o").string(), d);
  EXPECT_EQ(one.code, 2);
  EXPECT_NE(one.err.find("at least 3"), std::string::npos);
  // the explicit scheme with a huge step blows up
  const fs::path blow = write_file(d / "blow.json", R"({"scheme": "dg", "case": "free", "mesh": {"n": 2},
                                                       "T": 40, "dt": 0.5})");
  const CliResult b = run_cli("run --config " + blow.string() + " --out " + (d / "b").string(), d);
  EXPECT_EQ(b.code, 3) << b.out << b.err;
  EXPECT_NE(b.err.find("warning: dt"), std::string::npos);
}

TEST(Cli, ConvergenceGateAndReproducibleCsv) {
  const fs::path d = scratch("conv");
  const fs::path cfg = write_file(d / "c.json", R"({"mesh": {"n": 2}, "T": 0.25, "levels": 3, "threads": 1})");
  const CliResult a = run_cli("convergence --config " + cfg.string() + " --out " + (d / "a").string(), d);
  ASSERT_EQ(a.code, 0) << a.err;
  const CliResult b = run_cli("convergence --config " + cfg.string() + " --out " + (d / "b").string(), d);
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string ca = slurp(d / "a" / "convergence.csv");
  EXPECT_EQ(ca, slurp(d / "b" / "convergence.csv"));
  std::istringstream in(ca);
  EXPECT_EQ(read_csv(in).rows.size(), 3u);
  // a time step far too large for the scheme degrades the rate below the gate
  const fs::path coarse = write_file(d / "g.json", R"({"mesh": {"n": 2}, "T": 4.0, "levels": 3, "dt_coeff": 40.0})");
  EXPECT_EQ(run_cli("convergence --config " + coarse.string() + " --out " + (d / "g").string(), d).code, 4);
}

TEST(Cli, SchemesAgreeOnFinalEnergy) {
  // the gap between the two final energies is a discretization error: it
  // must shrink under refinement
  const fs::path d = scratch("agree");
  auto energy = [&](const std::string& scheme, int n) {
    const std::string tag = scheme + std::to_string(n);
    const fs::path cfg = write_file(d / (tag + ".json"), R"({"mesh": {"n": )" + std::to_string(n) +
                                                             R"(}, "T": 0.5, "scheme": ")" + scheme + R"("})");
    const CliResult r = run_cli("run --config " + cfg.string() + " --out " + (d / tag).string(), d);
    EXPECT_EQ(r.code, 0) << r.err;
    std::ifstream in(d / tag / "energy.csv");
    return read_csv(in).rows.back()[2];
  };
  const double gap4 = std::abs(energy("cg", 4) - energy("dg", 4));
  const double e8 = energy("cg", 8);
  const double gap8 = std::abs(e8 - energy("dg", 8));
  EXPECT_LT(gap8, 0.7 * gap4);
  EXPECT_LT(gap8, 0.15 * e8);
}
