#pragma once

#include "divdpg/mesh.hpp"

#include <string>
#include <vector>

namespace divdpg {

/// Normal: discontinuous Legendre modes per edge, single-valued w.r.t. the
/// global edge normal (H^{-1/2}-type). Continuous: piecewise polynomials on
/// the skeleton with vertex and edge-bubble DOFs (H^{1/2}-type).
enum class TraceKind { Normal, Continuous };

struct TraceFamily {
  std::string name;
  TraceKind kind = TraceKind::Normal;
  int degree = 0;          // polynomial degree along each edge
  bool essential = false;  // boundary DOFs carry prescribed data
};

/// Global numbering of element field DOFs and skeleton trace DOFs.
///
/// Global order: field blocks element by element, then each trace family
/// (Normal: edge-major modes; Continuous: all vertices, then edge bubbles).
/// Element-local trial order: fields, then each family in turn (Normal: local
/// edges 0..2 with their modes; Continuous: local vertices 0..2, then the
/// bubbles of local edges 0..2).
class DofLayout {
 public:
  DofLayout(const Mesh& mesh, int field_dofs_per_element, std::vector<TraceFamily> families);

  int num_dofs() const { return num_dofs_; }
  int num_free() const { return num_free_; }
  int field_dofs_per_element() const { return field_dofs_; }
  const std::vector<TraceFamily>& families() const { return families_; }
  int num_families() const { return static_cast<int>(families_.size()); }

  int local_size() const { return local_size_; }
  int local_family_offset(int f) const { return local_offsets_[f]; }
  int local_family_size(int f) const;
  int family_offset(int f) const { return offsets_[f]; }

  int field_dof(int t, int k) const { return t * field_dofs_ + k; }
  int normal_dof(int f, int edge, int mode) const;
  int vertex_dof(int f, int vertex) const;
  int bubble_dof(int f, int edge, int j) const;

  /// Global indices in element-local trial order.
  std::vector<int> element_dofs(const Mesh& mesh, int t) const;

  bool is_essential(int dof) const { return essential_[dof] != 0; }
  /// Position of a DOF among the free DOFs, or -1 for essential ones.
  int free_index(int dof) const { return free_index_[dof]; }

  /// Trace shape values on local edge k of triangle t at local parameter
  /// `tloc` (0 at local vertex k). Returns pairs (local trial index, value).
  /// Normal shapes are reported without the element's edge sign.
  void edge_shapes(const Mesh& mesh, int t, int f, int k, double tloc, std::vector<int>& local,
                   std::vector<double>& values) const;

 private:
  int num_triangles_, num_edges_, num_vertices_;
  int field_dofs_;
  std::vector<TraceFamily> families_;
  std::vector<int> offsets_;
  std::vector<int> local_offsets_;
  int local_size_ = 0;
  int num_dofs_ = 0;
  int num_free_ = 0;
  std::vector<char> essential_;
  std::vector<int> free_index_;
};

}  // namespace divdpg
