#include <doctest.h>

#include <cmath>
#include <random>

#include "stokesrec/spaces.hpp"
#include "test_util.hpp"

using namespace stokesrec;
using testutil::random_ref_points;

TEST_SUITE_BEGIN("spaces");

TEST_CASE("lagrange dof counts") {
  const Mesh m1 = generate_structured(1);
  CHECK(lagrange_space(m1, 2, true).n_dofs == 9);  // 4 vertices + 5 edge midpoints
  CHECK(lagrange_space(m1, 1, false).n_dofs == 6);
  CHECK(lagrange_space(m1, 2, true).local_dim == 6);

  const Mesh m3 = generate_structured(3);
  for (int k = 1; k <= 6; ++k) {
    const FeSpace sp = lagrange_space(m3, k, true);
    const int expected = m3.n_vertices() + (k - 1) * m3.n_edges() +
                         (k - 1) * (k - 2) / 2 * m3.n_cells();
    CHECK(sp.n_dofs == expected);
    CHECK(lagrange_space(m3, k, false).n_dofs == m3.n_cells() * poly_dim(k));
  }
  CHECK_THROWS_AS(lagrange_space(m3, 7, true), std::runtime_error);
}

TEST_CASE("mini space") {
  const Mesh m1 = generate_structured(1);
  const FeSpace sp = mini_space(m1, 1);
  CHECK(sp.n_dofs == 6);  // 4 vertices + 2 bubbles
  CHECK(sp.local_dim == 4);

  // the bubble vanishes on the cell boundary
  const MiniRef& ref = mini_ref(1);
  for (int i = 0; i < 12; ++i) {
    const double t = (i % 4 + 1) / 5.0;
    Vec2 p;
    if (i < 4) p = Vec2(t, 0.0);
    else if (i < 8) p = Vec2(0.0, t);
    else p = Vec2(t, 1.0 - t);
    CHECK(std::abs(ref.eval(p)[3]) < 1e-14);
  }
  CHECK(ref.eval(Vec2(1.0 / 3.0, 1.0 / 3.0))[3] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("raviart-thomas dof counts and constraints") {
  const Mesh m1 = generate_structured(1);
  CHECK(rt_space(m1, 1).local_dim == 8);
  CHECK(rt_space(m1, 0).n_dofs == 5);

  std::vector<int> boundary;
  for (int e = 0; e < m1.n_edges(); ++e)
    if (m1.boundary_edge[e]) boundary.push_back(e);
  const FeSpace constrained = rt_space(m1, 0, boundary);
  CHECK(constrained.n_dofs == 1);  // only the diagonal edge stays free

  const Mesh m2 = generate_structured(2);
  for (int m = 0; m <= 5; ++m) {
    const FeSpace sp = rt_space(m2, m);
    CHECK(sp.local_dim == (m + 1) * (m + 3));
    CHECK(sp.n_dofs == (m + 1) * m2.n_edges() + m * (m + 1) * m2.n_cells());
  }
}

TEST_CASE("partition of unity") {
  for (int k : {1, 2, 4, 6}) {
    const LagrangeRef& ref = lagrange_ref(k);
    for (const Vec2& p : random_ref_points(10, 3 + k)) {
      CHECK(ref.eval(p).sum() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(ref.eval_grad(p).colwise().sum().norm() < 1e-11);
    }
  }
}

TEST_CASE("piola divergence closed form") {
  // sigma_hat = (x,y) has divergence 2; Piola maps it to 2/det(F')
  const Mesh m = perturb(generate_structured(2), 0.2, 9);
  const FeSpace sp = rt_space(m, 1);
  // represent sigma_hat on one cell via interior moments only: instead build
  // the function whose local reference expansion equals sigma_hat exactly
  const RTRef& ref = rt_ref(1);
  for (int t = 0; t < 3; ++t) {
    const double det = m.jacobian(t).determinant();
    // coefficients of sigma_hat in the nodal reference basis: dof functionals
    // applied to sigma_hat; nodal expansion then reproduces it
    Eigen::VectorXd dofs(ref.dim);
    // edge moments
    const QuadRule& er = edge_rule(6);
    for (int e = 0; e < 3; ++e) {
      const auto ev = ref_edge_vertices(e);
      const Vec2 v[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
      const Vec2 tan = v[ev[1]] - v[ev[0]];
      const double len = tan.norm();
      const Vec2 n(tan.y() / len, -tan.x() / len);
      for (int i = 0; i < 2; ++i) {
        double mom = 0.0;
        for (int q = 0; q < er.size(); ++q) {
          const Vec2 p = v[ev[0]] + er.t(q) * tan;
          mom += er.weights[q] * len * p.dot(n) * shifted_legendre(i, er.t(q));
        }
        dofs[2 * e + i] = mom;
      }
    }
    const QuadRule& tr = triangle_rule(6);
    for (int b = 0; b < 1; ++b) {
      double mx = 0.0, my = 0.0;
      for (int q = 0; q < tr.size(); ++q) {
        mx += tr.weights[q] * tr.x(q);
        my += tr.weights[q] * tr.y(q);
      }
      dofs[6] = mx;
      dofs[7] = my;
    }
    DiscreteFunction f{&sp, Eigen::VectorXd::Zero(sp.n_dofs)};
    // place the local expansion (undo the stored sign flags)
    for (int l = 0; l < ref.dim; ++l)
      if (sp.dof(t, l) >= 0) f.coeffs[sp.dof(t, l)] = sp.sign(t, l) * dofs[l];
    const auto div = evaluate(f, t, {Vec2(0.3, 0.3), Vec2(0.1, 0.5)}, EvalWhat::Divergence);
    CHECK(div(0, 0) == doctest::Approx(2.0 / det).epsilon(1e-12));
    CHECK(div(1, 0) == doctest::Approx(2.0 / det).epsilon(1e-12));
  }
}

TEST_CASE("rt interpolation reproduces constants") {
  const Mesh m = perturb(generate_structured(3), 0.2, 11);
  const FeSpace sp = rt_space(m, 1);
  const DiscreteFunction f = interpolate_rt(sp, [](const Vec2&) { return Vec2(1.0, 0.0); }, 8);
  for (int t = 0; t < m.n_cells(); t += 3) {
    const auto vals = evaluate(f, t, random_ref_points(4, 17 + t), EvalWhat::Value);
    for (int q = 0; q < vals.rows(); ++q) {
      CHECK(vals(q, 0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(vals(q, 1) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("rt normal continuity for random coefficients") {
  const Mesh m = perturb(generate_structured(3), 0.15, 13);
  for (int order : {0, 1, 3}) {
    const FeSpace sp = rt_space(m, order);
    DiscreteFunction f{&sp, testutil::random_vector(sp.n_dofs, 100 + order)};

    std::vector<std::vector<int>> edge_cells(m.n_edges());
    for (int t = 0; t < m.n_cells(); ++t)
      for (int e : m.cell_edges[t]) edge_cells[e].push_back(t);

    double max_jump = 0.0, scale = 0.0;
    for (int e = 0; e < m.n_edges(); ++e) {
      if (m.boundary_edge[e]) continue;
      const Vec2 a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
      const Vec2 tan = b - a;
      const Vec2 n(tan.y(), -tan.x());
      for (int s = 1; s <= 5; ++s) {
        const Vec2 p = a + (s / 6.0) * tan;
        double flux[2];
        for (int side = 0; side < 2; ++side) {
          const int t = edge_cells[e][side];
          const Vec2 ref = m.jacobian(t).inverse() * (p - m.vertices[m.cells[t][0]]);
          const auto val = evaluate(f, t, {ref}, EvalWhat::Value);
          flux[side] = Vec2(val(0, 0), val(0, 1)).dot(n);
          scale = std::max(scale, Vec2(val(0, 0), val(0, 1)).norm());
        }
        max_jump = std::max(max_jump, std::abs(flux[0] - flux[1]));
      }
    }
    CHECK(max_jump < 1e-12 * scale);
  }
}

TEST_CASE("lagrange interpolation reproduces polynomials") {
  const Mesh m = perturb(generate_structured(2), 0.1, 19);
  const FeSpace sp = lagrange_space(m, 2, true);
  const DiscreteFunction f = interpolate(sp, [](const Vec2& p) { return p.x() * p.x(); });
  for (int t = 0; t < m.n_cells(); ++t)
    for (const Vec2& rp : random_ref_points(4, 23 + t)) {
      const Vec2 p = m.map_to_physical(t, rp);
      const auto val = evaluate(f, t, {rp}, EvalWhat::Value);
      CHECK(val(0, 0) == doctest::Approx(p.x() * p.x()).epsilon(1e-13));
    }

  // degree 7 is not reproduced by quadratics
  const DiscreteFunction g = interpolate(sp, [](const Vec2& p) {
    return std::pow(p.x(), 7) + std::pow(p.y(), 7) - 0.25;
  });
  double max_err = 0.0;
  for (int t = 0; t < m.n_cells(); ++t)
    for (const Vec2& rp : random_ref_points(4, 31 + t)) {
      const Vec2 p = m.map_to_physical(t, rp);
      const auto val = evaluate(g, t, {rp}, EvalWhat::Value);
      max_err = std::max(max_err,
                         std::abs(val(0, 0) - (std::pow(p.x(), 7) + std::pow(p.y(), 7) - 0.25)));
    }
  CHECK(max_err > 1e-4);
}

TEST_CASE("vector interpolation reproduces matching-degree fields") {
  const Mesh m = generate_structured(2);
  for (int k : {2, 3, 4}) {
    const FeSpace sp = lagrange_space(m, k, true);
    const auto field = [k](const Vec2& p) {
      return Vec2(std::pow(p.x(), k) - 2.0 * p.y(), p.x() * std::pow(p.y(), k - 1));
    };
    const VectorFunction v = interpolate_vector(sp, field);
    const DiscreteFunction fx{&sp, v.component(0)}, fy{&sp, v.component(1)};
    for (int t = 0; t < m.n_cells(); t += 2)
      for (const Vec2& rp : random_ref_points(3, 41 + t)) {
        const Vec2 p = m.map_to_physical(t, rp);
        CHECK(evaluate(fx, t, {rp}, EvalWhat::Value)(0, 0) ==
              doctest::Approx(field(p).x()).epsilon(1e-12));
        CHECK(evaluate(fy, t, {rp}, EvalWhat::Value)(0, 0) ==
              doctest::Approx(field(p).y()).epsilon(1e-12));
      }
  }
}

TEST_CASE("rt interpolation preserves edge normal fluxes of a gradient field") {
  const Mesh m = perturb(generate_structured(2), 0.1, 29);
  const FeSpace sp = rt_space(m, 2);
  const auto grad_field = [](const Vec2& p) {
    return Vec2(std::cos(p.x()) * p.y(), std::sin(p.x()));  // not a polynomial
  };
  const DiscreteFunction f = interpolate_rt(sp, grad_field, 20);
  const QuadRule& er = edge_rule(20);
  std::vector<std::vector<int>> edge_cells(m.n_edges());
  for (int t = 0; t < m.n_cells(); ++t)
    for (int e : m.cell_edges[t]) edge_cells[e].push_back(t);
  for (int e = 0; e < m.n_edges(); e += 2) {
    const Vec2 a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
    const Vec2 tan = b - a;
    const double len = tan.norm();
    const Vec2 n(tan.y() / len, -tan.x() / len);
    double exact = 0.0, disc = 0.0;
    const int t = edge_cells[e][0];
    for (int q = 0; q < er.size(); ++q) {
      const Vec2 p = a + er.t(q) * tan;
      exact += er.weights[q] * len * grad_field(p).dot(n);
      const Vec2 ref = m.jacobian(t).inverse() * (p - m.vertices[m.cells[t][0]]);
      const auto val = evaluate(f, t, {ref}, EvalWhat::Value);
      disc += er.weights[q] * len * Vec2(val(0, 0), val(0, 1)).dot(n);
    }
    CHECK(disc == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("rt divergence is a polynomial of degree <= m") {
  // fit the divergence of random RT functions against the monomial basis of
  // degree m; the residual of the fit must vanish
  for (int order : {0, 1, 2}) {
    const RTRef& ref = rt_ref(order);
    const auto pts = random_ref_points(30, 57 + order);
    const auto& mono = monomials(order);
    Eigen::MatrixXd vand(pts.size(), mono.size());
    Eigen::MatrixXd divs(pts.size(), ref.dim);
    for (size_t q = 0; q < pts.size(); ++q) {
      for (size_t j = 0; j < mono.size(); ++j)
        vand(q, j) = std::pow(pts[q].x(), mono[j][0]) * std::pow(pts[q].y(), mono[j][1]);
      divs.row(q) = ref.eval_div(pts[q]).transpose();
    }
    const Eigen::MatrixXd sol = vand.colPivHouseholderQr().solve(divs);
    CHECK((vand * sol - divs).norm() < 1e-11 * (1.0 + divs.norm()));
  }
}

TEST_SUITE_END();
