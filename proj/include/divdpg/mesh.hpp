#pragma once

#include "divdpg/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace divdpg {

/// Affine element data of one triangle.
///
/// Local edge k joins local vertices k and k+1 (mod 3); `normals[k]` is the
/// outward unit normal on that edge.
struct ElementGeometry {
  std::array<Vec2, 3> vertices;
  Mat2 jacobian;  // columns v1 - v0, v2 - v0
  double det = 0.0;
  double area = 0.0;
  Vec2 centroid;
  double diameter = 0.0;
  std::array<Vec2, 3> normals;
  std::array<double, 3> lengths{};

  Vec2 map(const Vec2& ref) const { return vertices[0] + jacobian * ref; }
  /// Point on local edge k at parameter t in [0,1], running from vertex k to vertex k+1.
  Vec2 edge_point(int k, double t) const {
    return (1.0 - t) * vertices[k] + t * vertices[(k + 1) % 3];
  }
};

/// Conforming triangulation with global edge orientation and newest-vertex-bisection state.
///
/// Triangles are stored counterclockwise with the refinement edge as local
/// edge 0, i.e. between local vertices 0 and 1; local vertex 2 is the newest
/// vertex. Global edges run from the lower to the higher vertex index and
/// carry the normal obtained by rotating that tangent clockwise. An element's
/// edge sign is +1 where its outward normal agrees with the global normal.
class Mesh {
 public:
  Mesh() = default;
  /// Triangles must be counterclockwise; `parents` maps each triangle to its
  /// ancestor in the mesh it was refined from (empty means "no history").
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<int> parents = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }

  int element_edge(int t, int k) const { return element_edges_[t][k]; }
  int edge_sign(int t, int k) const { return edge_signs_[t][k]; }
  /// Incident triangles of edge e; the second entry is -1 on the boundary.
  const std::array<int, 2>& edge_elements(int e) const { return edge_elements_[e]; }
  bool is_boundary_edge(int e) const { return edge_elements_[e][1] < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  int refinement_edge(int t) const { return element_edges_[t][0]; }
  int parent(int t) const { return parents_.empty() ? -1 : parents_[t]; }
  /// Global unit normal of edge e (tangent from lower to higher vertex, rotated clockwise).
  Vec2 edge_normal(int e) const;
  double edge_length(int e) const;
  Vec2 edge_midpoint(int e) const;

  ElementGeometry geometry(int t) const;
  double total_area() const;
  /// max over triangles of diam(T)^2 / |T|
  double shape_constant() const;
  double min_diameter() const;

  /// Throws unless every interior edge has two incident triangles with opposite signs,
  /// every boundary edge one, and all areas are positive.
  void check_conforming() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> parents_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<std::array<int, 3>> edge_signs_;
  std::vector<std::array<int, 2>> edge_elements_;
  std::vector<bool> boundary_vertex_;

  void build_topology();
};

/// Orders (a, b, apex) counterclockwise while keeping {a, b} as the refinement edge.
std::array<int, 3> oriented_triangle(const std::vector<Vec2>& vertices, int a, int b, int apex);

/// Structured n x n grid of (0,1)^2, each cell split along the diagonal through (0,0)-(1,1) direction.
Mesh make_unit_square(int n);

/// The domain is {|x|+|y| < a} minus {|x+a|+|y| <= a} with a = sqrt(2)/4, so the removed quarter square has side 1/4.
double lshape_radius();

/// Six-triangle mesh of the rotated L-shaped domain with the reentrant corner at the origin.
///
/// Each of the three remaining quarter squares is split along its diagonal
/// through the origin, which is the refinement edge of both halves.
Mesh make_lshape();

/// Newest-vertex bisection of all marked triangles followed by conforming closure.
///
/// The returned mesh records, for each child, the index of its ancestor in `mesh`.
Mesh refine(const Mesh& mesh, std::span<const int> marked);

/// Marks every triangle once.
Mesh refine_uniform(const Mesh& mesh);

}  // namespace divdpg
