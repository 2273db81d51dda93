#include <doctest.h>

#include <cmath>

#include "stokesrec/assembly.hpp"
#include "stokesrec/quadrature.hpp"
#include "stokesrec/reconstruction.hpp"
#include "stokesrec/verify.hpp"
#include "test_util.hpp"

using namespace stokesrec;

TEST_SUITE_BEGIN("reconstruction");

TEST_CASE("patch system sizes") {
  const Mesh m = generate_structured(1);
  const auto patches = build_patches(m);

  SUBCASE("two-cell corner patch, taylor-hood k=2") {
    const ElementChoice e{Variant::TaylorHood, 2};
    const ReconstructionSpaces spaces = make_reconstruction_spaces(m, e);
    for (const auto& patch : patches) {
      if (patch.cells.size() != 2) continue;
      const PatchSystem sys = assemble_patch_system(m, patch, e, spaces);
      CHECK(sys.n_sigma == 6);  // 2 dofs on the diagonal edge + 2x2 interior
      CHECK(sys.n_q == 6);      // P1 discontinuous on two cells
      CHECK(sys.n_w == 0);
      CHECK(sys.size() == 13);
    }
  }

  SUBCASE("koszul block sizes per order") {
    const Mesh m2 = generate_structured(2);
    const auto p2 = build_patches(m2);
    const auto& patch = p2[4];
    for (int k : {2, 3, 4}) {
      const ElementChoice e{Variant::TaylorHood, k};
      const ReconstructionSpaces spaces = make_reconstruction_spaces(m2, e);
      const PatchSystem sys = assemble_patch_system(m2, patch, e, spaces);
      CHECK(sys.n_w == (k - 1) * (k - 2) / 2);
      CHECK(sys.pivot_ratio > 1e-12);
    }
    const ElementChoice mini{Variant::Mini, 1};
    const ReconstructionSpaces spaces = make_reconstruction_spaces(m2, mini);
    CHECK(spaces.rt.order == 2);
    CHECK(spaces.qdisc.order == 2);
    const PatchSystem sys = assemble_patch_system(m2, patch, mini, spaces);
    CHECK(sys.n_w == 0);
    CHECK(sys.n_q == static_cast<int>(patch.cells.size()) * 6);
  }
}

TEST_CASE("patch right-hand side") {
  const Mesh m = perturb(generate_structured(2), 0.1, 3);
  const auto patches = build_patches(m);
  const ElementChoice e{Variant::TaylorHood, 2};
  const ReconstructionSpaces spaces = make_reconstruction_spaces(m, e);
  const FeSpace vel = lagrange_space(m, 2, true);

  SUBCASE("divergence-free velocity gives a zero right-hand side and solution") {
    const VectorFunction w = interpolate_vector(vel, [](const Vec2& p) {
      return Vec2(p.y(), 0.0);
    });
    for (const auto& patch : patches) {
      const PatchSystem sys = assemble_patch_system(m, patch, e, spaces);
      const Eigen::VectorXd rhs = patch_rhs(m, sys, spaces, vel, w);
      CHECK(rhs.lpNorm<Eigen::Infinity>() < 1e-13);
      CHECK(solve_patch(sys, rhs).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }

  SUBCASE("constants are annihilated by the bubble-oswald composition") {
    for (const auto& patch : patches) {
      const Eigen::MatrixXd mat = patch_bubble_oswald_matrix(patch, spaces.qdisc, spaces.qcont);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mat.cols());
      CHECK((mat * ones).lpNorm<Eigen::Infinity>() < 1e-13);
    }
  }
}

TEST_CASE("reconstructed divergence") {
  const Mesh m = perturb(generate_structured(3), 0.1, 7);
  const auto patches = build_patches(m);
  const ElementChoice e{Variant::TaylorHood, 2};
  const FeSpace vel = lagrange_space(m, 2, true);
  const ReconstructionMap rec = build_reconstruction(m, patches, vel, e);

  SUBCASE("zero field maps to zero") {
    const VectorFunction w{&vel, Eigen::VectorXd::Zero(2 * vel.n_dofs)};
    CHECK(sigma_of(rec, w).norm() == 0.0);
  }

  SUBCASE("affine divergence-free fields stay pointwise divergence-free") {
    const VectorFunction w = interpolate_vector(vel, [](const Vec2& p) {
      return Vec2(0.3 * p.y() + 0.1, -0.7 * p.x());
    });
    const DiscreteFunction div = reconstructed_divergence(rec, w);
    CHECK(div.coeffs.lpNorm<Eigen::Infinity>() < 1e-11);
  }

  SUBCASE("generic fields are not divergence-free after reconstruction") {
    const VectorFunction w = interpolate_vector(vel, [](const Vec2& p) {
      return Vec2(p.x(), 0.0);
    });
    const DiscreteFunction div = reconstructed_divergence(rec, w);
    CHECK(div.coeffs.lpNorm<Eigen::Infinity>() > 1e-3);
  }

  SUBCASE("boundary normal-flux rows of the map are empty") {
    for (int edge = 0; edge < m.n_edges(); ++edge) {
      if (!m.boundary_edge[edge]) continue;
      for (int i = 0; i <= rec.spaces.rt.order; ++i) {
        const int row = edge * (rec.spaces.rt.order + 1) + i;
        for (int col = 0; col < rec.R.outerSize(); ++col)
          for (Eigen::SparseMatrix<double>::InnerIterator it(rec.R, col); it; ++it)
            if (it.row() == row) CHECK(it.value() == 0.0);
      }
    }
  }
}

TEST_CASE("reconstructed load") {
  const Mesh m = perturb(generate_structured(2), 0.1, 11);
  const auto patches = build_patches(m);
  const ElementChoice e{Variant::TaylorHood, 3};
  const FeSpace vel = lagrange_space(m, 3, true);
  const ReconstructionMap rec = build_reconstruction(m, patches, vel, e);

  SUBCASE("zero forcing") {
    const Eigen::VectorXd load = reconstructed_load(rec, [](const Vec2&) { return Vec2::Zero(); }, 8);
    CHECK(load.norm() == 0.0);
  }

  SUBCASE("low-order polynomial forcing matches the standard load") {
    // f in [P^{k-2}]^2 is orthogonal to every patch correction
    const auto f = [](const Vec2& p) {
      return Vec2(1.0 + 2.0 * p.x() - p.y(), 0.5 - p.x() + 3.0 * p.y());
    };
    const Eigen::VectorXd rec_load = reconstructed_load(rec, f, 8);
    const Eigen::VectorXd std_load = assemble_load(vel, f, 8);
    CHECK((rec_load - std_load).lpNorm<Eigen::Infinity>() <
          1e-11 * std_load.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("data oscillation") {
  const auto g_sin = [](const Vec2& p) { return Vec2(std::sin(p.x()), 0.0); };

  SUBCASE("polynomials of degree <= m have no oscillation") {
    const Mesh m = generate_structured(4);
    const auto patches = build_patches(m);
    const auto g = [](const Vec2& p) { return Vec2(1.0 + p.x(), p.y() - 2.0 * p.x()); };
    const double osc = data_oscillation(m, patches, g, 1, 10);
    CHECK(osc < 1e-11);
  }

  SUBCASE("smooth fields decay at rate m+2") {
    const Mesh m8 = generate_structured(8);
    const Mesh m16 = generate_structured(16);
    const double o8 = data_oscillation(m8, build_patches(m8), g_sin, 0, 10);
    const double o16 = data_oscillation(m16, build_patches(m16), g_sin, 0, 10);
    const double ratio = o8 / o16;
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
  }
}

TEST_CASE("verification suite on a small mesh") {
  VerifyOptions opt;
  opt.n = 2;
  opt.elements = {{Variant::TaylorHood, 2}, {Variant::TaylorHood, 3}, {Variant::Mini, 1}};
  opt.n_random = 5;
  const auto results = run_verification(opt);
  for (const auto& r : results) {
    INFO(r.name, " measured=", r.measured, " bound=", r.bound);
    CHECK(r.passed);
  }
}

TEST_SUITE_END();
