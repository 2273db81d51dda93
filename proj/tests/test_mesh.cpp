#include <doctest.h>

#include <set>

#include "stokesrec/mesh.hpp"

using namespace stokesrec;

TEST_SUITE_BEGIN("mesh");

TEST_CASE("structured mesh counts") {
  const Mesh m1 = generate_structured(1);
  CHECK(m1.n_vertices() == 4);
  CHECK(m1.n_cells() == 2);
  CHECK(m1.n_edges() == 5);

  // Euler formula V - E + F = 1 on the disk
  const Mesh m2 = generate_structured(2);
  CHECK(m2.n_vertices() == 9);
  CHECK(m2.n_cells() == 8);
  CHECK(m2.n_edges() == 16);

  const Mesh m4 = generate_structured(4);
  CHECK(m4.n_vertices() == 25);
  CHECK(m4.n_cells() == 32);
}

TEST_CASE("positive orientation and shape regularity") {
  for (int n : {1, 2, 4, 8}) {
    const Mesh m = generate_structured(n);
    for (int t = 0; t < m.n_cells(); ++t) CHECK(m.cell_area(t) > 0.0);
    CHECK(m.shape_regularity() > 0.05);
  }
}

TEST_CASE("edge incidence classification") {
  const Mesh m = generate_structured(3);
  std::vector<int> incidence(m.n_edges(), 0);
  for (int t = 0; t < m.n_cells(); ++t)
    for (int e : m.cell_edges[t]) ++incidence[e];
  for (int e = 0; e < m.n_edges(); ++e)
    CHECK(incidence[e] == (m.boundary_edge[e] ? 1 : 2));
}

TEST_CASE("perturb") {
  const Mesh m = generate_structured(4);
  SUBCASE("amplitude zero is the identity") {
    const Mesh p = perturb(m, 0.0, 7);
    for (int v = 0; v < m.n_vertices(); ++v) CHECK(p.vertices[v] == m.vertices[v]);
  }
  SUBCASE("positivity and fixed boundary") {
    const Mesh p = perturb(m, 0.2, 1);
    for (int t = 0; t < p.n_cells(); ++t) CHECK(p.cell_area(t) > 0.0);
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.boundary_vertex[v]) CHECK(p.vertices[v] == m.vertices[v]);
  }
  SUBCASE("same seed gives bit-identical coordinates") {
    const Mesh a = perturb(m, 0.2, 42);
    const Mesh b = perturb(m, 0.2, 42);
    for (int v = 0; v < m.n_vertices(); ++v) {
      CHECK(a.vertices[v].x() == b.vertices[v].x());
      CHECK(a.vertices[v].y() == b.vertices[v].y());
    }
  }
}

TEST_CASE("uniform refinement") {
  const Mesh m = generate_structured(1);
  const Mesh r = refine_uniform(m);
  CHECK(r.n_cells() == 8);
  CHECK(r.max_diam() == doctest::Approx(0.5 * m.max_diam()).epsilon(1e-14));

  // every child has exactly a quarter of its parent's area
  for (int t = 0; t < m.n_cells(); ++t)
    for (int c = 0; c < 4; ++c)
      CHECK(r.cell_area(4 * t + c) == doctest::Approx(0.25 * m.cell_area(t)).epsilon(1e-13));

  // parent edge midpoints are vertices, parent boundary vertices stay boundary
  for (int e = 0; e < m.n_edges(); ++e) {
    const Vec2 mid = 0.5 * (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]);
    bool found = false;
    for (const auto& v : r.vertices)
      if ((v - mid).norm() < 1e-15) found = true;
    CHECK(found);
  }
  for (int v = 0; v < m.n_vertices(); ++v)
    if (m.boundary_vertex[v]) CHECK(static_cast<bool>(r.boundary_vertex[v]));
}

TEST_CASE("export/import round trip") {
  Mesh m = perturb(generate_structured(3), 0.15, 5);
  const Mesh back = import_mesh(export_mesh(m));
  REQUIRE(back.n_vertices() == m.n_vertices());
  REQUIRE(back.n_cells() == m.n_cells());
  for (int v = 0; v < m.n_vertices(); ++v) {
    CHECK(back.vertices[v].x() == m.vertices[v].x());  // bit-exact
    CHECK(back.vertices[v].y() == m.vertices[v].y());
  }
  for (int t = 0; t < m.n_cells(); ++t) CHECK(back.cells[t] == m.cells[t]);
  CHECK(back.edges == m.edges);
}

TEST_CASE("import repairs inverted cells with a warning") {
  std::vector<std::string> warnings;
  const Mesh m = import_mesh("4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 3 2\n", &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("negatively oriented") != std::string::npos);
  for (int t = 0; t < m.n_cells(); ++t) CHECK(m.cell_area(t) > 0.0);
}

TEST_CASE("import rejects malformed input") {
  CHECK_THROWS_WITH_AS(import_mesh("3 1\n0 0\n1 0\n0 1\n0 1 5\n"),
                       doctest::Contains("out of range"), std::runtime_error);
  CHECK_THROWS_AS(import_mesh("bogus"), std::runtime_error);
  CHECK_THROWS_AS(import_mesh("4 1\n0 0\n1 0\n0 1\n0 0\n0 1 2\n"), std::runtime_error);  // dangling
}

TEST_CASE("vertex patches") {
  SUBCASE("n=1 patch sizes") {
    const Mesh m = generate_structured(1);
    const auto patches = build_patches(m);
    std::multiset<size_t> sizes;
    for (const auto& p : patches) sizes.insert(p.cells.size());
    CHECK(sizes == std::multiset<size_t>{1, 1, 2, 2});
  }
  SUBCASE("patch cell counts sum to 3x cells") {
    for (int n : {1, 2, 4}) {
      const Mesh m = generate_structured(n);
      const auto patches = build_patches(m);
      size_t total = 0;
      for (const auto& p : patches) total += p.cells.size();
      CHECK(total == 3u * m.n_cells());
    }
  }
  SUBCASE("center vertex of n=2 mesh") {
    const Mesh m = generate_structured(2);
    const auto patches = build_patches(m);
    const size_t center = patches[4].cells.size();  // vertex (0.5, 0.5)
    CHECK((center == 4 || center == 6));
  }
  SUBCASE("h_V and edge classification") {
    const Mesh m = generate_structured(3);
    const auto patches = build_patches(m);
    for (const auto& p : patches) {
      double h = 0.0;
      for (int t : p.cells) h = std::max(h, m.cell_diam(t));
      CHECK(p.h_v == h);
      for (int e : p.interior_edges) {
        int count = 0;
        for (int t : p.cells)
          for (int ce : m.cell_edges[t])
            if (ce == e) ++count;
        CHECK(count == 2);
      }
    }
  }
}

TEST_SUITE_END();
