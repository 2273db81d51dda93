// Simplicial 2D triangulations: structured generation, uniform refinement,
// ASCII import/export and vertex-patch extraction.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace stokesrec {

using Vec2 = Eigen::Vector2d;

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;  // vertex triples, positively oriented
  std::vector<std::array<int, 2>> edges;  // vertex pairs, lower index first

  // local edge i of a cell is opposite local vertex i and runs from local
  // vertex (i+1)%3 to (i+2)%3 along the ccw boundary traversal
  std::vector<std::array<int, 3>> cell_edges;
  std::vector<std::array<int, 3>> cell_edge_aligned;  // 1 if traversal matches the
                                                      // global lo->hi direction
  std::vector<char> boundary_edge;
  std::vector<char> boundary_vertex;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  double cell_area(int t) const;
  double cell_diam(int t) const;
  double edge_length(int e) const;
  double max_diam() const;

  // affine map of cell t: x = v0 + J * xhat
  Eigen::Matrix2d jacobian(int t) const;
  Vec2 map_to_physical(int t, const Vec2& ref) const;

  // min over cells of |T| / diam(T)^2
  double shape_regularity() const;
};

struct VertexPatch {
  int vertex = -1;
  std::vector<int> cells;
  std::vector<int> interior_edges;        // edges of the patch not on its boundary
  std::vector<int> patch_boundary_edges;  // edges on the patch boundary
  double h_v = 0.0;                       // max cell diameter in the patch
};

// builds edge connectivity and validates orientation/manifoldness;
// throws std::runtime_error on an invalid mesh
void finalize_mesh(Mesh& mesh);

// unit square, (n+1)^2 vertices, 2n^2 cells, checkerboard diagonal pattern
Mesh generate_structured(int n);

// displaces interior vertices by amplitude * local h, deterministic in seed;
// halves the amplitude (up to 10 times) until all cells stay positive
Mesh perturb(const Mesh& mesh, double amplitude, unsigned seed);

// midpoint subdivision: every cell into 4 congruent children
Mesh refine_uniform(const Mesh& mesh);

// ASCII format: "nv nc", nv lines "x y", nc lines "i j k" (0-based)
Mesh import_mesh(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string export_mesh(const Mesh& mesh);

std::vector<VertexPatch> build_patches(const Mesh& mesh);

}  // namespace stokesrec
