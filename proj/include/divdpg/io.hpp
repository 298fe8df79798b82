#pragma once

#include "divdpg/adaptivity.hpp"
#include "divdpg/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace divdpg {

/// Named cell data for the VTK writer; vectors use both components.
struct CellField {
  std::string name;
  std::vector<Vec2> values;
  bool vector = false;
};

/// Legacy ASCII unstructured grid with triangle cells (type 5).
void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<CellField>& cell_data = {});

/// Fixed header row.
inline constexpr const char* kCsvHeader = "level,nelems,dim,err_u,err_w,err_total,eta,eoc_u,eoc_eta";

/// Convergence table with numbers in round-trip precision.
void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);

/// Shortest decimal text that reads back to the same double; "nan" for NaN.
inline constexpr const char* kDofCsvHeader = "dof,essential,value";

/// One row per global DOF in layout order: index, 1 if essential else 0, value.
void write_dof_csv(std::ostream& out, const DofLayout& layout, const Vector& x);

std::string format_double(double v);

}  // namespace divdpg
