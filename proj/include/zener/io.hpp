#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "zener/assembly.hpp"
#include "zener/discretization.hpp"

namespace zener {

// Cell fields sampled at element centroids.
struct CellFields {
  std::vector<Mat2> gamma, omega_zeta, sigma;
  std::vector<double> rotation;
  std::vector<Vec2> acceleration;
};

inline CellFields sample_cell_fields(const Discretization& disc, const Vector& p, const Vector& r, const Vector& accel) {
  const DofMap& d = disc.dofs();
  const int ne = disc.num_elements(), nl = d.n_low;
  CellFields c;
  c.gamma.resize(ne);
  c.omega_zeta.resize(ne);
  c.sigma.resize(ne);
  c.rotation.assign(ne, 0.0);
  c.acceleration.assign(ne, Vec2::Zero());
  for (int K = 0; K < ne; ++K) {
    const Vec2 x = disc.geometry(K).to_physical(Vec2(1.0 / 3.0, 1.0 / 3.0));
    const PairValue v = evaluate_pair(disc, p, K, x);
    c.gamma[K] = v.gamma;
    c.omega_zeta[K] = disc.omega(K) * v.zeta;
    c.sigma[K] = v.gamma + c.omega_zeta[K];
    if (r.size()) c.rotation[K] = evaluate_low(disc, r.data() + K * nl, K, x);
    if (accel.size())
      for (int i = 0; i < 2; ++i) c.acceleration[K][i] = evaluate_low(disc, accel.data() + (2 * K + i) * nl, K, x);
  }
  return c;
}

// Legacy ASCII unstructured grid.  Tensors are padded to 3x3.
inline void write_vtk(std::ostream& os, const Mesh& mesh, const CellFields& f, const std::string& title = "zener") {
  const int nv = mesh.num_vertices(), ne = mesh.num_elements();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(16);
  os << "POINTS " << nv << " double\n";
  for (const Vec2& v : mesh.vertices) os << v[0] << ' ' << v[1] << " 0\n";
  os << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (const auto& e : mesh.elements) os << "3 " << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
  os << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) os << "5\n";
  os << "CELL_DATA " << ne << '\n';
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (int j : mesh.subdomain) os << j << '\n';
  auto tensors = [&](const char* name, const std::vector<Mat2>& t) {
    if (t.empty()) return;
    os << "TENSORS " << name << " double\n";
    for (const Mat2& m : t) os << m(0, 0) << ' ' << m(0, 1) << " 0\n" << m(1, 0) << ' ' << m(1, 1) << " 0\n0 0 0\n";
  };
  tensors("gamma", f.gamma);
  tensors("omega_zeta", f.omega_zeta);
  tensors("sigma", f.sigma);
  if (!f.rotation.empty()) {
    os << "SCALARS rotation double 1\nLOOKUP_TABLE default\n";
    for (double v : f.rotation) os << v << '\n';
  }
  if (!f.acceleration.empty()) {
    os << "VECTORS acceleration double\n";
    for (const Vec2& a : f.acceleration) os << a[0] << ' ' << a[1] << " 0\n";
  }
}

inline void write_vtk_file(const std::string& path, const Mesh& mesh, const CellFields& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_vtk(os, mesh, f);
}

// Minimal reader for the files written above.
struct VtkData {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> cells;
  std::map<std::string, std::vector<double>> cell_data;  // flattened components
};

inline VtkData read_vtk(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw ParseError("not a legacy VTK file");
  std::getline(in, line);  // title
  std::string word;
  if (!(in >> word) || word != "ASCII") throw ParseError("VTK: expected ASCII");
  if (!(in >> word >> line) || word != "DATASET" || line != "UNSTRUCTURED_GRID")
    throw ParseError("VTK: expected DATASET UNSTRUCTURED_GRID");
  VtkData out;
  long ncell = 0;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw ParseError("VTK: malformed " + what);
  };
  while (in >> word) {
    if (word == "POINTS") {
      long n;
      std::string type;
      need(static_cast<bool>(in >> n >> type), "POINTS header");
      out.points.resize(n);
      for (auto& p : out.points) {
        double z;
        need(static_cast<bool>(in >> p[0] >> p[1] >> z), "point");
      }
    } else if (word == "CELLS") {
      long total;
      need(static_cast<bool>(in >> ncell >> total), "CELLS header");
      need(total == 4 * ncell, "CELLS size");
      out.cells.resize(ncell);
      for (auto& c : out.cells) {
        int k;
        need(static_cast<bool>(in >> k >> c[0] >> c[1] >> c[2]) && k == 3, "cell");
      }
    } else if (word == "CELL_TYPES") {
      long n;
      need(static_cast<bool>(in >> n) && n == ncell, "CELL_TYPES");
      for (long i = 0; i < n; ++i) {
        int t;
        need(static_cast<bool>(in >> t) && t == 5, "cell type");
      }
    } else if (word == "CELL_DATA") {
      long n;
      need(static_cast<bool>(in >> n) && n == ncell, "CELL_DATA");
    } else if (word == "SCALARS" || word == "VECTORS" || word == "TENSORS") {
      std::string name, type;
      need(static_cast<bool>(in >> name >> type), "field header");
      int comps = word == "VECTORS" ? 3 : word == "TENSORS" ? 9 : 1;
      if (word == "SCALARS") {
        std::string rest;
        std::getline(in, rest);
        std::istringstream rs(rest);
        int nc;
        if (rs >> nc) comps = nc;
        std::string lt, table;
        need(static_cast<bool>(in >> lt >> table) && lt == "LOOKUP_TABLE", "LOOKUP_TABLE");
      }
      std::vector<double> v(static_cast<std::size_t>(ncell) * comps);
      for (double& x : v) need(static_cast<bool>(in >> x), "field " + name);
      out.cell_data[name] = std::move(v);
    } else {
      throw ParseError("VTK: unexpected token '" + word + "'");
    }
  }
  return out;
}

// Plain numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // empty cells read as NaN
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV: empty input");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = line.find(',', start);
      const std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (cell.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != cell.size()) throw ParseError("CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
        row.push_back(v);
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (row.size() != t.header.size())
      throw ParseError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

class EnergyCsv {
 public:
  explicit EnergyCsv(std::ostream& os) : os_(os) {
    os_ << "step,t,energy,jump\n" << std::setprecision(16);
  }
  void add(int step, double t, double energy, double jump) {
    os_ << step << ',' << t << ',' << energy << ',' << jump << '\n';
  }

 private:
  std::ostream& os_;
};

}  // namespace zener
