#include "stokesrec/verify.hpp"

#include <cmath>
#include <random>

#include "stokesrec/projectors.hpp"
#include "stokesrec/quadrature.hpp"
#include "stokesrec/solver.hpp"

namespace stokesrec {

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned seed) : gen(seed) { gen.discard(20); }
  double pm1() { return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0; }
  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = pm1();
    return v;
  }
};

std::string element_tag(const ElementChoice& e) {
  return (e.variant == Variant::TaylorHood ? "th" : "mini") + std::string("_k") +
         std::to_string(e.k);
}

// L2 norm of a discontinuous Lagrange function
double l2_norm_disc(const DiscreteFunction& q) {
  const Mesh& mesh = *q.space->mesh;
  const QuadRule& rule = triangle_rule(2 * q.space->order + 2);
  std::vector<Vec2> pts(rule.size());
  for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
  double acc = 0.0;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const double det = mesh.jacobian(t).determinant();
    const Eigen::MatrixXd v = evaluate(q, t, pts, EvalWhat::Value);
    for (int i = 0; i < rule.size(); ++i) acc += rule.weights[i] * det * v(i, 0) * v(i, 0);
  }
  return std::sqrt(acc);
}

// divergence of a stacked velocity field at rule points of one cell
Eigen::VectorXd cell_divergence(const FeSpace& vel, const VectorFunction& w, int cell,
                                const QuadRule& rule) {
  const Mesh& mesh = *vel.mesh;
  const Eigen::Matrix2d jinv_t = mesh.jacobian(cell).inverse().transpose();
  const DiscreteFunction wx{&vel, w.component(0)}, wy{&vel, w.component(1)};
  const Eigen::VectorXd lx = local_coeffs(wx, cell), ly = local_coeffs(wy, cell);
  Eigen::VectorXd div(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::MatrixXd g = scalar_basis_grads(vel, Vec2(rule.x(q), rule.y(q)));
    double d = 0.0;
    for (int l = 0; l < vel.local_dim; ++l) {
      const Eigen::Vector2d pg = jinv_t * g.row(l).transpose();
      d += pg.x() * lx[l] + pg.y() * ly[l];
    }
    div[q] = d;
  }
  return div;
}

// integral of div(w) * q over a cell set (whole mesh when cells is empty)
double integral_div_times(const FeSpace& vel, const VectorFunction& w, const DiscreteFunction& q,
                          const std::vector<int>& cells) {
  const Mesh& mesh = *vel.mesh;
  const QuadRule& rule = triangle_rule(basis_degree(vel) - 1 + q.space->order + 2);
  std::vector<Vec2> pts(rule.size());
  for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
  double acc = 0.0;
  const auto work = [&](int t) {
    const double det = mesh.jacobian(t).determinant();
    const Eigen::VectorXd div = cell_divergence(vel, w, t, rule);
    const Eigen::MatrixXd qv = evaluate(q, t, pts, EvalWhat::Value);
    for (int i = 0; i < rule.size(); ++i) acc += rule.weights[i] * det * div[i] * qv(i, 0);
  };
  if (cells.empty())
    for (int t = 0; t < mesh.n_cells(); ++t) work(t);
  else
    for (int t : cells) work(t);
  return acc;
}

double h1_seminorm(const VectorFunction& w) { return norm_h1(w, 2 * basis_degree(*w.space)); }

struct ElementChecks {
  const Mesh& mesh;
  const std::vector<VertexPatch>& patches;
  const ElementChoice element;
  const VerifyOptions& opt;
  std::vector<CheckResult>& out;
  Rng& rng;

  FeSpace velocity;
  ReconstructionSpaces spaces;
  ReconstructionMap rec;

  ElementChecks(const Mesh& m, const std::vector<VertexPatch>& p, const ElementChoice& e,
                const VerifyOptions& o, std::vector<CheckResult>& res, Rng& r)
      : mesh(m), patches(p), element(e), opt(o), out(res), rng(r) {
    velocity = e.variant == Variant::TaylorHood ? lagrange_space(m, e.k, true) : mini_space(m, e.k);
    rec = build_reconstruction(m, p, velocity, e);
    spaces = rec.spaces;
  }

  void add(const std::string& name, double measured, double bound, const std::string& note = "") {
    out.push_back({element_tag(element) + "/" + name, measured <= bound, measured, bound, note});
  }

  void bubble_partition() {
    double worst = 0.0;
    const DiscreteFunction q{&spaces.qdisc, rng.vector(spaces.qdisc.n_dofs)};
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(spaces.qdisc.n_dofs);
    for (const auto& patch : patches) sum += bubble_project(patch, q).coeffs;
    worst = (sum - q.coeffs).lpNorm<Eigen::Infinity>() / q.coeffs.lpNorm<Eigen::Infinity>();
    add("bubble_partition", worst, opt.tol);
  }

  void bubble_trace() {
    const DiscreteFunction q{&spaces.qdisc, rng.vector(spaces.qdisc.n_dofs)};
    std::vector<std::vector<int>> edge_cells(mesh.n_edges());
    for (int t = 0; t < mesh.n_cells(); ++t)
      for (int e : mesh.cell_edges[t]) edge_cells[e].push_back(t);
    double worst = 0.0;
    const double scale = q.coeffs.lpNorm<Eigen::Infinity>();
    for (size_t pi = 0; pi < patches.size(); pi += 3) {
      const auto& patch = patches[pi];
      const DiscreteFunction proj = bubble_project(patch, q);
      for (int e : patch.patch_boundary_edges) {
        int cell = -1;
        for (int t : edge_cells[e])
          for (int pc : patch.cells)
            if (t == pc) cell = t;
        const Vec2 a = mesh.vertices[mesh.edges[e][0]], b = mesh.vertices[mesh.edges[e][1]];
        const Eigen::Matrix2d jinv = mesh.jacobian(cell).inverse();
        for (int s = 0; s <= 6; ++s) {
          const Vec2 ref = jinv * (a + (s / 6.0) * (b - a) - mesh.vertices[mesh.cells[cell][0]]);
          worst = std::max(worst, std::abs(evaluate(proj, cell, {ref}, EvalWhat::Value)(0, 0)));
        }
      }
    }
    add("bubble_trace", worst / scale, opt.tol);
  }

  void oswald_identity() {
    const DiscreteFunction qc{&spaces.qcont, rng.vector(spaces.qcont.n_dofs)};
    const FeSpace disc_same = lagrange_space(mesh, spaces.qcont.order, false);
    const DiscreteFunction back = oswald(embed_discontinuous(qc, disc_same), spaces.qcont);
    add("oswald_identity", (back.coeffs - qc.coeffs).norm() / qc.coeffs.norm(), opt.tol);
  }

  void rt_normal_continuity() {
    const DiscreteFunction f{&spaces.rt, rng.vector(spaces.rt.n_dofs)};
    std::vector<std::vector<int>> edge_cells(mesh.n_edges());
    for (int t = 0; t < mesh.n_cells(); ++t)
      for (int e : mesh.cell_edges[t]) edge_cells[e].push_back(t);
    double worst = 0.0, scale = 0.0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      if (mesh.boundary_edge[e]) continue;
      const Vec2 a = mesh.vertices[mesh.edges[e][0]], b = mesh.vertices[mesh.edges[e][1]];
      const Vec2 n(b.y() - a.y(), a.x() - b.x());
      for (int s = 1; s <= 5; ++s) {
        const Vec2 p = a + (s / 6.0) * (b - a);
        double flux[2];
        for (int side = 0; side < 2; ++side) {
          const int t = edge_cells[e][side];
          const Vec2 ref = mesh.jacobian(t).inverse() * (p - mesh.vertices[mesh.cells[t][0]]);
          const Eigen::MatrixXd val = evaluate(f, t, {ref}, EvalWhat::Value);
          flux[side] = Vec2(val(0, 0), val(0, 1)).dot(n);
          scale = std::max(scale, Vec2(val(0, 0), val(0, 1)).norm());
        }
        worst = std::max(worst, std::abs(flux[0] - flux[1]));
      }
    }
    add("rt_normal_continuity", worst / scale, opt.tol);
  }

  // local theorem: stability ratio, extended test property, L2 orthogonality
  void local_patch_properties() {
    double worst_stability = 0.0, worst_testprop = 0.0, worst_orth = 0.0;
    const DiscreteFunction qt{&spaces.qdisc, rng.vector(spaces.qdisc.n_dofs)};
    const DiscreteFunction s_qt = oswald(qt, spaces.qcont);
    const DiscreteFunction qt_minus_s{&spaces.qdisc,
                                      qt.coeffs - embed_discontinuous(s_qt, spaces.qdisc).coeffs};
    const double qt_norm = l2_norm_disc(qt);
    const QuadRule& rule = triangle_rule(2 * spaces.rt.order + 4);
    std::vector<Vec2> pts(rule.size());
    for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
    const int orth_order =
        element.variant == Variant::TaylorHood ? element.k - 2 : element.k - 1;

    for (const auto& patch : patches) {
      const PatchSystem sys = assemble_patch_system(mesh, patch, element, spaces);
      VectorFunction w{&velocity, rng.vector(2 * velocity.n_dofs)};
      const Eigen::VectorXd rhs = patch_rhs(mesh, sys, spaces, velocity, w);
      const Eigen::VectorXd sigma_coeffs = solve_patch(sys, rhs);
      DiscreteFunction sigma{&spaces.rt, Eigen::VectorXd::Zero(spaces.rt.n_dofs)};
      for (int i = 0; i < sys.n_sigma; ++i) sigma.coeffs[sys.sigma_dofs[i]] = sigma_coeffs[i];

      // i. ||sigma|| <= C h_V ||div w|| on the patch
      double sig_norm2 = 0.0, divw_norm2 = 0.0;
      for (int t : patch.cells) {
        const double det = mesh.jacobian(t).determinant();
        const Eigen::MatrixXd sv = evaluate(sigma, t, pts, EvalWhat::Value);
        const Eigen::VectorXd dw = cell_divergence(velocity, w, t, rule);
        for (int i = 0; i < rule.size(); ++i) {
          sig_norm2 += rule.weights[i] * det * sv.row(i).squaredNorm();
          divw_norm2 += rule.weights[i] * det * dw[i] * dw[i];
        }
      }
      if (divw_norm2 > 0.0)
        worst_stability = std::max(
            worst_stability, std::sqrt(sig_norm2) / (patch.h_v * std::sqrt(divw_norm2)));

      // ii. (div sigma, q) = (div w, bubble(q - S q)) for a random global q
      const DiscreteFunction bpq = bubble_project(patch, qt_minus_s);
      double lhs = 0.0;
      for (int t : patch.cells) {
        const double det = mesh.jacobian(t).determinant();
        const Eigen::MatrixXd dsig = evaluate(sigma, t, pts, EvalWhat::Divergence);
        const Eigen::MatrixXd qv = evaluate(qt, t, pts, EvalWhat::Value);
        for (int i = 0; i < rule.size(); ++i)
          lhs += rule.weights[i] * det * dsig(i, 0) * qv(i, 0);
      }
      const double rhs2 = integral_div_times(velocity, w, bpq, patch.cells);
      const double scale = std::max(1e-300, std::sqrt(divw_norm2) * qt_norm);
      worst_testprop = std::max(worst_testprop, std::abs(lhs - rhs2) / scale);

      // iii. orthogonality to [P^{orth_order}]^2 on the patch
      if (orth_order >= 0) {
        const auto& mono = monomials(orth_order);
        const Vec2 center = mesh.vertices[patch.vertex];
        Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(mono.size(), 2);
        double xi_norm2 = 0.0;
        for (int t : patch.cells) {
          const double det = mesh.jacobian(t).determinant();
          const Eigen::MatrixXd sv = evaluate(sigma, t, pts, EvalWhat::Value);
          for (int i = 0; i < rule.size(); ++i) {
            const Vec2 s = (mesh.map_to_physical(t, pts[i]) - center) / patch.h_v;
            for (size_t j = 0; j < mono.size(); ++j) {
              const double mv = std::pow(s.x(), mono[j][0]) * std::pow(s.y(), mono[j][1]);
              moments(j, 0) += rule.weights[i] * det * mv * sv(i, 0);
              moments(j, 1) += rule.weights[i] * det * mv * sv(i, 1);
              xi_norm2 += rule.weights[i] * det * mv * mv;
            }
          }
        }
        const double sscale = std::sqrt(sig_norm2) * std::sqrt(xi_norm2);
        if (sscale > 1e-300)
          worst_orth = std::max(worst_orth, moments.cwiseAbs().maxCoeff() / sscale);
      }
    }
    add("local_stability_ratio", worst_stability, 100.0, "measured constant, reported");
    add("local_test_property", worst_testprop, opt.tol);
    if (orth_order >= 0) add("local_orthogonality", worst_orth, opt.tol);
  }

  void theorem_one() {
    double worst_i = 0.0, worst_ii = 0.0;
    for (int trial = 0; trial < opt.n_random; ++trial) {
      const VectorFunction w{&velocity, rng.vector(2 * velocity.n_dofs)};
      const DiscreteFunction qt{&spaces.qdisc, rng.vector(spaces.qdisc.n_dofs)};
      const DiscreteFunction s_qt_disc = embed_discontinuous(oswald(qt, spaces.qcont), spaces.qdisc);
      const DiscreteFunction div_rw = reconstructed_divergence(rec, w);

      const double qnorm = l2_norm_disc(qt);
      const double divnorm = std::max(1e-300, h1_seminorm(w));

      // i. (div R w, q) = (div w, S q)
      double lhs = 0.0;
      {
        const QuadRule& rule = triangle_rule(2 * spaces.qdisc.order + 2);
        std::vector<Vec2> pts(rule.size());
        for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
        for (int t = 0; t < mesh.n_cells(); ++t) {
          const double det = mesh.jacobian(t).determinant();
          const Eigen::MatrixXd dv = evaluate(div_rw, t, pts, EvalWhat::Value);
          const Eigen::MatrixXd qv = evaluate(qt, t, pts, EvalWhat::Value);
          for (int i = 0; i < rule.size(); ++i)
            lhs += rule.weights[i] * det * dv(i, 0) * qv(i, 0);
        }
      }
      const double rhs = integral_div_times(velocity, w, s_qt_disc, {});
      worst_i = std::max(worst_i, std::abs(lhs - rhs) / (divnorm * qnorm));

      // ii. (div(w - R w), q_h) = 0 for continuous q_h
      const DiscreteFunction qc{&spaces.qcont, rng.vector(spaces.qcont.n_dofs)};
      const DiscreteFunction qc_disc = embed_discontinuous(qc, spaces.qdisc);
      double lhs2 = integral_div_times(velocity, w, qc_disc, {});
      {
        const QuadRule& rule = triangle_rule(2 * spaces.qdisc.order + 2);
        std::vector<Vec2> pts(rule.size());
        for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
        for (int t = 0; t < mesh.n_cells(); ++t) {
          const double det = mesh.jacobian(t).determinant();
          const Eigen::MatrixXd dv = evaluate(div_rw, t, pts, EvalWhat::Value);
          const Eigen::MatrixXd qv = evaluate(qc_disc, t, pts, EvalWhat::Value);
          for (int i = 0; i < rule.size(); ++i)
            lhs2 -= rule.weights[i] * det * dv(i, 0) * qv(i, 0);
        }
      }
      worst_ii = std::max(worst_ii, std::abs(lhs2) / (divnorm * l2_norm_disc(qc_disc)));
    }
    add("theorem1_i", worst_i, opt.tol);
    add("theorem1_ii", worst_ii, opt.tol);
  }

  void theorem_one_iii() {
    // project random fields onto the discretely divergence-free subspace and
    // check that the reconstructed divergence vanishes pointwise
    const FeSpace pressure = element.variant == Variant::TaylorHood
                                 ? lagrange_space(mesh, element.k - 1, true)
                                 : lagrange_space(mesh, element.k, true);
    SaddleSystem sys;
    sys.velocity = &velocity;
    sys.pressure = &pressure;
    sys.A = assemble_vector_laplace(velocity, 1.0);
    sys.B = assemble_div(velocity, pressure);
    sys.mean_constraint = assemble_pressure_integral(pressure);
    apply_dirichlet(sys, [](const Vec2&) { return Vec2::Zero(); });

    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      sys.F = sys.A * rng.vector(2 * velocity.n_dofs);
      const SaddleSolution sol = solve_saddle(sys);
      const VectorFunction w{&velocity, sol.u};
      const DiscreteFunction div_rw = reconstructed_divergence(rec, w);
      const QuadRule& rule = triangle_rule(2 * spaces.qdisc.order + 2);
      std::vector<Vec2> pts(rule.size());
      for (int i = 0; i < rule.size(); ++i) pts[i] = Vec2(rule.x(i), rule.y(i));
      double mx = 0.0;
      for (int t = 0; t < mesh.n_cells(); ++t)
        mx = std::max(mx, evaluate(div_rw, t, pts, EvalWhat::Value).cwiseAbs().maxCoeff());
      worst = std::max(worst, mx / std::max(1e-300, h1_seminorm(w)));
    }
    add("theorem1_iii_divfree", worst, 1e-10);
  }

  void run() {
    bubble_partition();
    bubble_trace();
    oswald_identity();
    rt_normal_continuity();
    local_patch_properties();
    theorem_one();
    theorem_one_iii();
  }
};

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
  std::vector<CheckResult> results;
  Rng rng(opt.seed);

  {  // quadrature exactness
    double worst = 0.0;
    for (int degree : {2, 5, 9, 14, 20}) {
      const QuadRule& rule = triangle_rule(degree);
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) {
          double v = 0.0;
          for (int q = 0; q < rule.size(); ++q)
            v += rule.weights[q] * std::pow(rule.x(q), a) * std::pow(rule.y(q), b);
          double exact = 1.0;
          for (int i = 1; i <= a; ++i) exact *= i;
          for (int i = 1; i <= b; ++i) exact *= i;
          for (int i = 1; i <= a + b + 2; ++i) exact /= i;
          worst = std::max(worst, std::abs(v - exact) / exact);
        }
    }
    results.push_back({"quadrature_exactness", worst <= 1e-13, worst, 1e-13, ""});
  }

  for (int k = 2; k <= 4; ++k) {
    const KoszulDecompositionReport rep = koszul_decomposition_check(k);
    results.push_back({"koszul_decomposition_k" + std::to_string(k), rep.ok,
                       static_cast<double>(rep.rank), static_cast<double>(rep.dim_full),
                       "rank vs dimension"});
  }

  const Mesh mesh = generate_structured(opt.n);
  const std::vector<VertexPatch> patches = build_patches(mesh);
  for (const ElementChoice& element : opt.elements) {
    ElementChecks checks(mesh, patches, element, opt, results, rng);
    checks.run();
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace stokesrec
