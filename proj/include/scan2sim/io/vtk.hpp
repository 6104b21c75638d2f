#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/io/format.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

// Legacy ASCII VTK unstructured grid. Kept deliberately on the legacy dialect so
// golden-file tests can compare artifacts byte for byte.
//
// Cell types: 5 = triangle, 9 = quad, 10 = tet, 12 = hex.

namespace detail {

struct VtkCells {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
};

inline VtkCells to_cells(const TriangleMesh& m) {
  VtkCells c;
  c.points = m.vertices;
  for (const auto& f : m.faces) {
    c.cells.push_back({f[0], f[1], f[2]});
    c.types.push_back(5);
  }
  return c;
}

inline VtkCells to_cells(const QuadDominantMesh& m) {
  VtkCells c;
  c.points = m.vertices;
  for (const auto& q : m.quads) {
    c.cells.push_back({q[0], q[1], q[2], q[3]});
    c.types.push_back(9);
  }
  for (const auto& t : m.triangles) {
    c.cells.push_back({t[0], t[1], t[2]});
    c.types.push_back(5);
  }
  return c;
}

inline VtkCells to_cells(const VolumeMesh& m) {
  VtkCells c;
  c.points = m.nodes;
  for (const auto& h : m.hex_elements) {
    c.cells.push_back({h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7]});
    c.types.push_back(12);
  }
  for (const auto& t : m.tet_elements) {
    c.cells.push_back({t[0], t[1], t[2], t[3]});
    c.types.push_back(10);
  }
  return c;
}

inline void write_vtk_cells(std::ostream& out, const VtkCells& c,
                            const std::vector<ScalarField>& fields,
                            const std::vector<VectorField>& vector_fields) {
  size_t np = c.points.size(), nc = c.cells.size();
  for (const auto& f : fields) {
    size_t want = f.association == FieldAssociation::PerNode ? np : nc;
    if (f.values.size() != want)
      throw IoError("VTK field '" + f.name + "' length " + std::to_string(f.values.size()) +
                    " does not match " + std::to_string(want));
  }
  for (const auto& f : vector_fields) {
    size_t want = f.association == FieldAssociation::PerNode ? np : nc;
    if (f.values.size() != want)
      throw IoError("VTK field '" + f.name + "' length does not match association");
  }

  out << "# vtk DataFile Version 3.0\n";
  out << "scan2sim output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (const auto& p : c.points)
    out << detail::fmt_g9(p.x) << ' ' << detail::fmt_g9(p.y) << ' ' << detail::fmt_g9(p.z) << '\n';

  size_t list_len = 0;
  for (const auto& cell : c.cells) list_len += cell.size() + 1;
  out << "CELLS " << nc << ' ' << list_len << '\n';
  for (const auto& cell : c.cells) {
    out << cell.size();
    for (int v : cell) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (int t : c.types) out << t << '\n';

  auto emit = [&](FieldAssociation assoc, size_t n, const char* header) {
    bool any = false;
    for (const auto& f : fields) any = any || f.association == assoc;
    for (const auto& f : vector_fields) any = any || f.association == assoc;
    if (!any) return;
    out << header << ' ' << n << '\n';
    for (const auto& f : fields) {
      if (f.association != assoc) continue;
      out << "SCALARS " << f.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : f.values) out << detail::fmt_g9(v) << '\n';
    }
    for (const auto& f : vector_fields) {
      if (f.association != assoc) continue;
      out << "VECTORS " << f.name << " double\n";
      for (const Vec3& v : f.values)
        out << detail::fmt_g9(v.x) << ' ' << detail::fmt_g9(v.y) << ' ' << detail::fmt_g9(v.z)
            << '\n';
    }
  };
  emit(FieldAssociation::PerNode, np, "POINT_DATA");
  emit(FieldAssociation::PerElement, nc, "CELL_DATA");
}

}  // namespace detail

template <typename MeshT>
inline void write_vtk(std::ostream& out, const MeshT& mesh,
                      const std::vector<ScalarField>& fields = {},
                      const std::vector<VectorField>& vector_fields = {}) {
  detail::write_vtk_cells(out, detail::to_cells(mesh), fields, vector_fields);
}

// Minimal reader for the subset this library writes; lets pipeline stages pick up
// a previous stage's volume artifact. The round-trip test oracle is a separate
// implementation in the test suite.
struct VtkData {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
  std::vector<ScalarField> fields;
  std::vector<VectorField> vector_fields;

  VolumeMesh to_volume_mesh() const {
    VolumeMesh m;
    m.nodes = points;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (types[i] == 12)
        m.hex_elements.push_back({cells[i][0], cells[i][1], cells[i][2], cells[i][3], cells[i][4],
                                  cells[i][5], cells[i][6], cells[i][7]});
      else if (types[i] == 10)
        m.tet_elements.push_back({cells[i][0], cells[i][1], cells[i][2], cells[i][3]});
    }
    return m;
  }

  TriangleMesh to_triangle_mesh() const {
    TriangleMesh m;
    m.vertices = points;
    for (size_t i = 0; i < cells.size(); ++i)
      if (types[i] == 5) m.faces.push_back({cells[i][0], cells[i][1], cells[i][2]});
    return m;
  }
};

inline VtkData read_vtk(std::istream& in) {
  VtkData data;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0)
    throw IoError("VTK: missing header");
  std::getline(in, line);  // title
  std::getline(in, line);
  if (line.rfind("ASCII", 0) != 0) throw IoError("VTK: only ASCII supported");
  std::getline(in, line);
  if (line.find("UNSTRUCTURED_GRID") == std::string::npos)
    throw IoError("VTK: only unstructured grids supported");

  FieldAssociation assoc = FieldAssociation::PerNode;
  while (in >> line) {
    if (line == "POINTS") {
      size_t n;
      std::string type;
      in >> n >> type;
      data.points.resize(n);
      for (auto& p : data.points) in >> p.x >> p.y >> p.z;
    } else if (line == "CELLS") {
      size_t n, total;
      in >> n >> total;
      data.cells.resize(n);
      for (auto& cell : data.cells) {
        int k;
        in >> k;
        cell.resize(k);
        for (int& v : cell) in >> v;
      }
    } else if (line == "CELL_TYPES") {
      size_t n;
      in >> n;
      data.types.resize(n);
      for (int& t : data.types) in >> t;
    } else if (line == "POINT_DATA") {
      size_t n;
      in >> n;
      assoc = FieldAssociation::PerNode;
    } else if (line == "CELL_DATA") {
      size_t n;
      in >> n;
      assoc = FieldAssociation::PerElement;
    } else if (line == "SCALARS") {
      ScalarField f;
      std::string type;
      int comps;
      in >> f.name >> type >> comps;
      std::string lut, lut_name;
      in >> lut >> lut_name;
      f.association = assoc;
      size_t n = assoc == FieldAssociation::PerNode ? data.points.size() : data.cells.size();
      f.values.resize(n * comps);
      for (double& v : f.values) in >> v;
      data.fields.push_back(std::move(f));
    } else if (line == "VECTORS") {
      VectorField f;
      std::string type;
      in >> f.name >> type;
      f.association = assoc;
      size_t n = assoc == FieldAssociation::PerNode ? data.points.size() : data.cells.size();
      f.values.resize(n);
      for (Vec3& v : f.values) in >> v.x >> v.y >> v.z;
      data.vector_fields.push_back(std::move(f));
    } else if (!line.empty()) {
      throw IoError("VTK: unexpected token '" + line + "'");
    }
  }
  if (!in.eof() && in.fail()) throw IoError("VTK: parse failure");
  return data;
}

}  // namespace scan2sim::io
