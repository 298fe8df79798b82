#include "divdpg/dof_layout.hpp"

#include "divdpg/basis.hpp"

namespace divdpg {

DofLayout::DofLayout(const Mesh& mesh, int field_dofs_per_element, std::vector<TraceFamily> families)
    : num_triangles_(mesh.num_triangles()),
      num_edges_(mesh.num_edges()),
      num_vertices_(mesh.num_vertices()),
      field_dofs_(field_dofs_per_element),
      families_(std::move(families)) {
  int offset = num_triangles_ * field_dofs_;
  int local = field_dofs_;
  for (const auto& fam : families_) {
    if (fam.kind == TraceKind::Continuous && fam.degree < 1)
      throw Error("DofLayout: continuous trace '" + fam.name + "' needs degree >= 1");
    if (fam.degree < 0) throw Error("DofLayout: negative trace degree");
    offsets_.push_back(offset);
    local_offsets_.push_back(local);
    if (fam.kind == TraceKind::Normal) {
      offset += num_edges_ * (fam.degree + 1);
      local += 3 * (fam.degree + 1);
    } else {
      offset += num_vertices_ + num_edges_ * (fam.degree - 1);
      local += 3 + 3 * (fam.degree - 1);
    }
  }
  num_dofs_ = offset;
  local_size_ = local;

  essential_.assign(num_dofs_, 0);
  for (int f = 0; f < num_families(); ++f) {
    const auto& fam = families_[f];
    if (!fam.essential) continue;
    for (int e = 0; e < num_edges_; ++e) {
      if (!mesh.is_boundary_edge(e)) continue;
      if (fam.kind == TraceKind::Normal) {
        for (int m = 0; m <= fam.degree; ++m) essential_[normal_dof(f, e, m)] = 1;
      } else {
        essential_[vertex_dof(f, mesh.edge(e)[0])] = 1;
        essential_[vertex_dof(f, mesh.edge(e)[1])] = 1;
        for (int j = 0; j + 2 <= fam.degree; ++j) essential_[bubble_dof(f, e, j)] = 1;
      }
    }
  }
  free_index_.assign(num_dofs_, -1);
  for (int d = 0; d < num_dofs_; ++d)
    if (!essential_[d]) free_index_[d] = num_free_++;
}

int DofLayout::local_family_size(int f) const {
  const auto& fam = families_[f];
  return fam.kind == TraceKind::Normal ? 3 * (fam.degree + 1) : 3 * fam.degree;
}

int DofLayout::normal_dof(int f, int edge, int mode) const {
  return offsets_[f] + edge * (families_[f].degree + 1) + mode;
}

int DofLayout::vertex_dof(int f, int vertex) const { return offsets_[f] + vertex; }

int DofLayout::bubble_dof(int f, int edge, int j) const {
  return offsets_[f] + num_vertices_ + edge * (families_[f].degree - 1) + j;
}

std::vector<int> DofLayout::element_dofs(const Mesh& mesh, int t) const {
  std::vector<int> dofs;
  dofs.reserve(local_size_);
  for (int k = 0; k < field_dofs_; ++k) dofs.push_back(field_dof(t, k));
  for (int f = 0; f < num_families(); ++f) {
    const auto& fam = families_[f];
    if (fam.kind == TraceKind::Normal) {
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m <= fam.degree; ++m) dofs.push_back(normal_dof(f, mesh.element_edge(t, k), m));
    } else {
      for (int k = 0; k < 3; ++k) dofs.push_back(vertex_dof(f, mesh.triangle(t)[k]));
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j + 2 <= fam.degree; ++j) dofs.push_back(bubble_dof(f, mesh.element_edge(t, k), j));
    }
  }
  return dofs;
}

void DofLayout::edge_shapes(const Mesh& mesh, int t, int f, int k, double tloc, std::vector<int>& local,
                            std::vector<double>& values) const {
  local.clear();
  values.clear();
  const auto& fam = families_[f];
  const auto& tri = mesh.triangle(t);
  const bool forward = tri[k] < tri[(k + 1) % 3];
  const double s = forward ? tloc : 1.0 - tloc;
  const int base = local_offsets_[f];
  if (fam.kind == TraceKind::Normal) {
    for (int m = 0; m <= fam.degree; ++m) {
      local.push_back(base + k * (fam.degree + 1) + m);
      values.push_back(normal_trace_shape(m, s));
    }
    return;
  }
  local.push_back(base + k);
  values.push_back(1.0 - tloc);
  local.push_back(base + (k + 1) % 3);
  values.push_back(tloc);
  const auto shapes = continuous_trace_shapes(fam.degree, s);
  for (int j = 0; j + 2 <= fam.degree; ++j) {
    local.push_back(base + 3 + k * (fam.degree - 1) + j);
    values.push_back(shapes[2 + j]);
  }
}

}  // namespace divdpg
