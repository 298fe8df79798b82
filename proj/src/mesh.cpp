#include "divdpg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

namespace divdpg {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<int> parents)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), parents_(std::move(parents)) {
  if (!parents_.empty() && parents_.size() != triangles_.size())
    throw Error("Mesh: parent map size mismatch");
  build_topology();
}

void Mesh::build_topology() {
  const int nv = num_vertices();
  std::map<std::pair<int, int>, int> index;
  edges_.clear();
  element_edges_.assign(triangles_.size(), {});
  edge_signs_.assign(triangles_.size(), {});
  edge_elements_.clear();
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= nv) throw Error("Mesh: vertex index out of range");
    const double twice_area =
        cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
    if (!(twice_area > 0.0)) throw Error("Mesh: triangle " + std::to_string(t) + " is not counterclockwise");
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      auto [it, inserted] = index.try_emplace(key(a, b), num_edges());
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edge_elements_.push_back({t, -1});
      } else {
        auto& inc = edge_elements_[it->second];
        if (inc[1] >= 0) throw Error("Mesh: edge shared by more than two triangles");
        inc[1] = t;
      }
      element_edges_[t][k] = it->second;
      // The outward normal of a counterclockwise edge a->b is the clockwise rotation of b-a.
      edge_signs_[t][k] = a < b ? 1 : -1;
    }
  }
  boundary_vertex_.assign(nv, false);
  for (int e = 0; e < num_edges(); ++e)
    if (is_boundary_edge(e)) {
      boundary_vertex_[edges_[e][0]] = true;
      boundary_vertex_[edges_[e][1]] = true;
    }
}

Vec2 Mesh::edge_normal(int e) const {
  const Vec2 t = vertices_[edges_[e][1]] - vertices_[edges_[e][0]];
  return Vec2(t.y(), -t.x()).normalized();
}

double Mesh::edge_length(int e) const {
  return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm();
}

Vec2 Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

ElementGeometry Mesh::geometry(int t) const {
  ElementGeometry g;
  const auto& tri = triangles_[t];
  for (int k = 0; k < 3; ++k) g.vertices[k] = vertices_[tri[k]];
  g.jacobian.col(0) = g.vertices[1] - g.vertices[0];
  g.jacobian.col(1) = g.vertices[2] - g.vertices[0];
  g.det = g.jacobian.determinant();
  g.area = 0.5 * g.det;
  g.centroid = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 tangent = g.vertices[(k + 1) % 3] - g.vertices[k];
    g.lengths[k] = tangent.norm();
    g.normals[k] = Vec2(tangent.y(), -tangent.x()) / g.lengths[k];
  }
  g.diameter = *std::max_element(g.lengths.begin(), g.lengths.end());
  return g;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += geometry(t).area;
  return a;
}

double Mesh::shape_constant() const {
  double c = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto g = geometry(t);
    c = std::max(c, g.diameter * g.diameter / g.area);
  }
  return c;
}

double Mesh::min_diameter() const {
  double h = std::numeric_limits<double>::infinity();
  for (int t = 0; t < num_triangles(); ++t) h = std::min(h, geometry(t).diameter);
  return h;
}

void Mesh::check_conforming() const {
  for (int e = 0; e < num_edges(); ++e) {
    const auto [t0, t1] = edge_elements_[e];
    if (t0 < 0) throw Error("Mesh: edge without incident triangle");
    if (t1 < 0) continue;
    auto sign_of = [&](int t) {
      for (int k = 0; k < 3; ++k)
        if (element_edges_[t][k] == e) return edge_signs_[t][k];
      return 0;
    };
    if (sign_of(t0) * sign_of(t1) != -1)
      throw Error("Mesh: interior edge " + std::to_string(e) + " has inconsistent orientation");
  }
  // A hanging vertex lies in the interior of a boundary-flagged edge.
  for (int e = 0; e < num_edges(); ++e) {
    if (!is_boundary_edge(e)) continue;
    const Vec2 a = vertices_[edges_[e][0]], b = vertices_[edges_[e][1]];
    const double len = (b - a).norm();
    for (int v = 0; v < num_vertices(); ++v) {
      if (v == edges_[e][0] || v == edges_[e][1] || !boundary_vertex_[v]) continue;
      const Vec2 p = vertices_[v];
      const double s = (p - a).dot(b - a) / (len * len);
      if (s > 1e-12 && s < 1.0 - 1e-12 && std::abs(cross(b - a, p - a)) < 1e-12 * len * len)
        throw Error("Mesh: hanging vertex " + std::to_string(v) + " on edge " + std::to_string(e));
    }
  }
}

std::array<int, 3> oriented_triangle(const std::vector<Vec2>& vertices, int a, int b, int apex) {
  if (cross(vertices[b] - vertices[a], vertices[apex] - vertices[a]) > 0.0) return {a, b, apex};
  return {b, a, apex};
}

Mesh make_unit_square(int n) {
  if (n < 1) throw Error("make_unit_square: n must be >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.emplace_back(double(i) / n, double(j) / n);
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * n * n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p01 = id(i, j + 1), p11 = id(i + 1, j + 1);
      triangles.push_back(oriented_triangle(vertices, p00, p11, p10));
      triangles.push_back(oriented_triangle(vertices, p00, p11, p01));
    }
  return Mesh(std::move(vertices), std::move(triangles));
}

double lshape_radius() { return std::sqrt(2.0) / 4.0; }

Mesh make_lshape() {
  const double a = lshape_radius();
  // Outer diamond corners and edge midpoints; the left quarter square is cut away.
  std::vector<Vec2> v = {
      {0.0, 0.0},           // 0 origin (reentrant corner)
      {0.0, a},             // 1 N
      {a / 2, a / 2},       // 2 NE
      {a, 0.0},             // 3 E
      {a / 2, -a / 2},      // 4 SE
      {0.0, -a},            // 5 S
      {-a / 2, -a / 2},     // 6 SW
      {-a / 2, a / 2},      // 7 NW
  };
  std::vector<std::array<int, 3>> triangles = {
      oriented_triangle(v, 0, 1, 2), oriented_triangle(v, 0, 1, 7),  // top
      oriented_triangle(v, 0, 3, 2), oriented_triangle(v, 0, 3, 4),  // right
      oriented_triangle(v, 0, 5, 4), oriented_triangle(v, 0, 5, 6),  // bottom
  };
  return Mesh(std::move(v), std::move(triangles));
}

Mesh refine(const Mesh& mesh, std::span<const int> marked) {
  const int ne = mesh.num_edges();
  std::vector<char> edge_marked(ne, 0);
  for (int t : marked) {
    if (t < 0 || t >= mesh.num_triangles()) throw Error("refine: marked index out of range");
    edge_marked[mesh.refinement_edge(t)] = 1;
  }
  // Closure: any triangle with a marked edge must also bisect its refinement edge.
  for (bool changed = true; changed;) {
    changed = false;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      if (edge_marked[mesh.refinement_edge(t)]) continue;
      if (edge_marked[mesh.element_edge(t, 1)] || edge_marked[mesh.element_edge(t, 2)]) {
        edge_marked[mesh.refinement_edge(t)] = 1;
        changed = true;
      }
    }
  }

  std::vector<Vec2> vertices = mesh.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  for (int e = 0; e < ne; ++e) {
    if (!edge_marked[e]) continue;
    midpoint[key(mesh.edge(e)[0], mesh.edge(e)[1])] = static_cast<int>(vertices.size());
    vertices.push_back(mesh.edge_midpoint(e));
  }
  auto mid = [&](int a, int b) {
    auto it = midpoint.find(key(a, b));
    return it == midpoint.end() ? -1 : it->second;
  };

  std::vector<std::array<int, 3>> triangles;
  std::vector<int> parents;
  triangles.reserve(mesh.num_triangles() + 4 * marked.size());
  auto emit = [&](std::array<int, 3> tri, int parent) {
    triangles.push_back(tri);
    parents.push_back(parent);
  };
  // Bisect (a, b, c) with refinement edge {a, b}: children (c, a, m) and (b, c, m),
  // whose refinement edges {c, a} and {b, c} are edges of the parent.
  auto bisect_child = [&](std::array<int, 3> child, int parent) {
    const int m = mid(child[0], child[1]);
    if (m < 0) {
      emit(child, parent);
      return;
    }
    emit({child[2], child[0], m}, parent);
    emit({child[1], child[2], m}, parent);
  };
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto [a, b, c] = mesh.triangle(t);
    const int m = mid(a, b);
    if (m < 0) {
      emit(mesh.triangle(t), t);
      continue;
    }
    bisect_child({c, a, m}, t);
    bisect_child({b, c, m}, t);
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(parents));
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  std::iota(all.begin(), all.end(), 0);
  return refine(mesh, all);
}

}  // namespace divdpg
