#include "divdpg/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace divdpg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<CellField>& cell_data) {
  out << "# vtk DataFile Version 3.0\n"
      << "divdpg mesh\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) out << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
  const int nt = mesh.num_triangles();
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "5\n";
  if (cell_data.empty()) return;
  out << "CELL_DATA " << nt << '\n';
  for (const auto& field : cell_data) {
    if (static_cast<int>(field.values.size()) != nt) throw Error("cell field '" + field.name + "' has wrong size");
    if (field.vector) {
      out << "VECTORS " << field.name << " double\n";
      for (const auto& v : field.values) out << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
    } else {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (const auto& v : field.values) out << format_double(v.x()) << '\n';
    }
  }
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.level << ',' << r.nelems << ',' << r.dim << ',' << format_double(r.err_u) << ','
        << format_double(r.err_w) << ',' << format_double(r.err_total) << ',' << format_double(r.eta) << ','
        << format_double(r.eoc_u) << ',' << format_double(r.eoc_eta) << '\n';
  }
}

void write_dof_csv(std::ostream& out, const DofLayout& layout, const Vector& x) {
  if (x.size() != layout.num_dofs()) throw Error("write_dof_csv: vector size does not match the layout");
  out << kDofCsvHeader << '\n';
  for (int d = 0; d < layout.num_dofs(); ++d)
    out << d << ',' << (layout.is_essential(d) ? 1 : 0) << ',' << format_double(x[d]) << '\n';
}

}  // namespace divdpg
