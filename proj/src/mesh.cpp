#include "stokesrec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stokesrec {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

double Mesh::cell_area(int t) const {
  const auto& c = cells[t];
  return signed_area(vertices[c[0]], vertices[c[1]], vertices[c[2]]);
}

double Mesh::cell_diam(int t) const {
  const auto& c = cells[t];
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    d = std::max(d, (vertices[c[i]] - vertices[c[(i + 1) % 3]]).norm());
  return d;
}

double Mesh::edge_length(int e) const {
  return (vertices[edges[e][0]] - vertices[edges[e][1]]).norm();
}

double Mesh::max_diam() const {
  double d = 0.0;
  for (int t = 0; t < n_cells(); ++t) d = std::max(d, cell_diam(t));
  return d;
}

Eigen::Matrix2d Mesh::jacobian(int t) const {
  const auto& c = cells[t];
  Eigen::Matrix2d j;
  j.col(0) = vertices[c[1]] - vertices[c[0]];
  j.col(1) = vertices[c[2]] - vertices[c[0]];
  return j;
}

Vec2 Mesh::map_to_physical(int t, const Vec2& ref) const {
  return vertices[cells[t][0]] + jacobian(t) * ref;
}

double Mesh::shape_regularity() const {
  double c = 1e300;
  for (int t = 0; t < n_cells(); ++t) {
    const double d = cell_diam(t);
    c = std::min(c, cell_area(t) / (d * d));
  }
  return c;
}

void finalize_mesh(Mesh& mesh) {
  const int nv = mesh.n_vertices();
  std::vector<char> referenced(nv, 0);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int v : mesh.cells[t]) {
      if (v < 0 || v >= nv)
        throw std::runtime_error("cell " + std::to_string(t) + " references vertex " +
                                 std::to_string(v) + " out of range");
      referenced[v] = 1;
    }
    if (mesh.cell_area(t) <= 0.0)
      throw std::runtime_error("cell " + std::to_string(t) + " is not positively oriented");
  }
  for (int v = 0; v < nv; ++v)
    if (!referenced[v])
      throw std::runtime_error("vertex " + std::to_string(v) + " is dangling");

  std::map<std::array<int, 2>, int> edge_of;
  mesh.edges.clear();
  mesh.cell_edges.assign(mesh.n_cells(), {-1, -1, -1});
  mesh.cell_edge_aligned.assign(mesh.n_cells(), {0, 0, 0});
  std::vector<int> incidence;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = mesh.cells[t][(i + 1) % 3];
      const int b = mesh.cells[t][(i + 2) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = edge_of.find(key);
      int e;
      if (it == edge_of.end()) {
        e = static_cast<int>(mesh.edges.size());
        edge_of.emplace(key, e);
        mesh.edges.push_back(key);
        incidence.push_back(0);
      } else {
        e = it->second;
      }
      ++incidence[e];
      mesh.cell_edges[t][i] = e;
      mesh.cell_edge_aligned[t][i] = (a < b) ? 1 : 0;
    }
  }

  mesh.boundary_edge.assign(mesh.n_edges(), 0);
  mesh.boundary_vertex.assign(nv, 0);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (incidence[e] > 2)
      throw std::runtime_error("edge " + std::to_string(e) + " shared by more than 2 cells");
    if (incidence[e] == 1) {
      mesh.boundary_edge[e] = 1;
      mesh.boundary_vertex[mesh.edges[e][0]] = 1;
      mesh.boundary_vertex[mesh.edges[e][1]] = 1;
    }
  }
}

Mesh generate_structured(int n) {
  if (n < 1) throw std::runtime_error("generate_structured: n must be >= 1");
  Mesh mesh;
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back(Vec2(double(i) / n, double(j) / n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if ((i + j) % 2 == 0) {  // diagonal a-c
        mesh.cells.push_back({a, b, c});
        mesh.cells.push_back({a, c, d});
      } else {  // diagonal b-d
        mesh.cells.push_back({a, b, d});
        mesh.cells.push_back({b, c, d});
      }
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

Mesh perturb(const Mesh& mesh, double amplitude, unsigned seed) {
  if (amplitude >= 0.3) throw std::runtime_error("perturb: amplitude must be < 0.3");
  std::vector<double> local_h(mesh.n_vertices(), 1e300);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const double len = mesh.edge_length(e);
    local_h[mesh.edges[e][0]] = std::min(local_h[mesh.edges[e][0]], len);
    local_h[mesh.edges[e][1]] = std::min(local_h[mesh.edges[e][1]], len);
  }

  // raw displacement directions drawn once so halving retries stay deterministic
  std::mt19937 rng(seed);
  rng.discard(20);
  const auto uniform = [&rng]() { return (rng() >> 5) * 0x1.0p-27 - 1.0; };  // [-1, 1)
  std::vector<Vec2> dir(mesh.n_vertices(), Vec2::Zero());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double dx = uniform();
    const double dy = uniform();
    if (!mesh.boundary_vertex[v]) dir[v] = Vec2(dx, dy);
  }

  double amp = amplitude;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Mesh out = mesh;
    for (int v = 0; v < mesh.n_vertices(); ++v)
      out.vertices[v] = mesh.vertices[v] + amp * local_h[v] * dir[v];
    bool ok = true;
    for (int t = 0; t < out.n_cells() && ok; ++t) ok = out.cell_area(t) > 0.0;
    if (ok) {
      finalize_mesh(out);
      return out;
    }
    amp *= 0.5;
  }
  throw std::runtime_error("perturb: could not restore positive orientation after 10 halvings");
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.vertices = mesh.vertices;
  const int nv = mesh.n_vertices();
  for (int e = 0; e < mesh.n_edges(); ++e)
    out.vertices.push_back(0.5 * (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]));
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const auto& c = mesh.cells[t];
    const int m0 = nv + mesh.cell_edges[t][0];  // midpoint opposite v0
    const int m1 = nv + mesh.cell_edges[t][1];
    const int m2 = nv + mesh.cell_edges[t][2];
    out.cells.push_back({c[0], m2, m1});
    out.cells.push_back({c[1], m0, m2});
    out.cells.push_back({c[2], m1, m0});
    out.cells.push_back({m0, m1, m2});
  }
  finalize_mesh(out);
  return out;
}

std::string export_mesh(const Mesh& mesh) {
  std::string s;
  char buf[80];
  std::snprintf(buf, sizeof buf, "%d %d\n", mesh.n_vertices(), mesh.n_cells());
  s += buf;
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    s += buf;
  }
  for (const auto& c : mesh.cells) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", c[0], c[1], c[2]);
    s += buf;
  }
  return s;
}

Mesh import_mesh(const std::string& text, std::vector<std::string>* warnings) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  const auto fail = [&](const std::string& what) {
    throw std::runtime_error("mesh import, line " + std::to_string(lineno) + ": " + what);
  };

  if (!next_line()) fail("missing header");
  int nv = 0, nc = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nv >> nc) || nv < 3 || nc < 1) fail("malformed counts");
  }
  Mesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_line()) fail("expected vertex line");
    std::istringstream vs(line);
    double x, y;
    if (!(vs >> x >> y)) fail("malformed vertex");
    mesh.vertices.push_back(Vec2(x, y));
  }
  for (int t = 0; t < nc; ++t) {
    if (!next_line()) fail("expected cell line");
    std::istringstream cs(line);
    std::array<int, 3> c;
    if (!(cs >> c[0] >> c[1] >> c[2])) fail("malformed cell");
    for (int v : c)
      if (v < 0 || v >= nv) fail("vertex index " + std::to_string(v) + " out of range");
    if (signed_area(mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]) < 0.0) {
      std::swap(c[1], c[2]);
      if (warnings)
        warnings->push_back("line " + std::to_string(lineno) + ": cell " + std::to_string(t) +
                            " was negatively oriented, indices swapped");
    }
    mesh.cells.push_back(c);
  }
  finalize_mesh(mesh);
  return mesh;
}

std::vector<VertexPatch> build_patches(const Mesh& mesh) {
  std::vector<VertexPatch> patches(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) patches[v].vertex = v;
  for (int t = 0; t < mesh.n_cells(); ++t)
    for (int v : mesh.cells[t]) patches[v].cells.push_back(t);

  std::vector<int> edge_count(mesh.n_edges());
  for (auto& p : patches) {
    std::fill(edge_count.begin(), edge_count.end(), 0);
    p.h_v = 0.0;
    for (int t : p.cells) {
      p.h_v = std::max(p.h_v, mesh.cell_diam(t));
      for (int e : mesh.cell_edges[t]) ++edge_count[e];
    }
    for (int t : p.cells)
      for (int e : mesh.cell_edges[t]) {
        if (edge_count[e] == 0) continue;
        // interior to the patch iff shared by two patch cells
        (edge_count[e] == 2 ? p.interior_edges : p.patch_boundary_edges).push_back(e);
        edge_count[e] = 0;
      }
    std::sort(p.interior_edges.begin(), p.interior_edges.end());
    std::sort(p.patch_boundary_edges.begin(), p.patch_boundary_edges.end());
  }
  return patches;
}

}  // namespace stokesrec
