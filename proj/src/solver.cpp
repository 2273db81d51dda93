#include "stokesrec/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "stokesrec/quadrature.hpp"

namespace stokesrec {

Discretization make_discretization(const Mesh& mesh, const ElementChoice& element) {
  Discretization d;
  d.mesh = &mesh;
  d.element = element;
  if (element.variant == Variant::TaylorHood) {
    if (element.k < 2 || element.k > 4)
      throw std::runtime_error("make_discretization: Taylor-Hood order must be 2..4");
    d.velocity = lagrange_space(mesh, element.k, true);
    d.pressure = lagrange_space(mesh, element.k - 1, true);
  } else {
    if (element.k != 1)
      throw std::runtime_error("make_discretization: mini element implemented for k=1");
    d.velocity = mini_space(mesh, element.k);
    d.pressure = lagrange_space(mesh, element.k, true);
  }
  return d;
}

SaddleSolution solve_saddle(const SaddleSystem& system) {
  const int n2 = static_cast<int>(system.A.rows());
  const int np = static_cast<int>(system.B.rows());
  if (static_cast<int>(system.dirichlet_mask.size()) != n2)
    throw std::runtime_error("solve_saddle: missing Dirichlet data");

  std::vector<int> free_of(n2, -1);
  std::vector<int> free_dofs;
  for (int i = 0; i < n2; ++i)
    if (!system.dirichlet_mask[i]) {
      free_of[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(i);
    }
  const int nf = static_cast<int>(free_dofs.size());
  const int total = nf + np + 1;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
  for (int i : free_dofs) rhs[free_of[i]] = system.F[i];

  for (int col = 0; col < system.A.outerSize(); ++col)
    for (SparseMat::InnerIterator it(system.A, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (system.dirichlet_mask[r]) continue;
      if (system.dirichlet_mask[c])
        rhs[free_of[r]] -= it.value() * system.dirichlet_values[c];
      else
        trips.emplace_back(free_of[r], free_of[c], it.value());
    }
  for (int col = 0; col < system.B.outerSize(); ++col)
    for (SparseMat::InnerIterator it(system.B, col); it; ++it) {
      const int q = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (system.dirichlet_mask[c]) {
        rhs[nf + q] -= it.value() * system.dirichlet_values[c];
      } else {
        trips.emplace_back(nf + q, free_of[c], it.value());       // continuity row
        trips.emplace_back(free_of[c], nf + q, it.value());       // pressure gradient
      }
    }
  for (int q = 0; q < np; ++q) {
    trips.emplace_back(nf + q, nf + np, system.mean_constraint[q]);
    trips.emplace_back(nf + np, nf + q, system.mean_constraint[q]);
  }

  SparseMat mat(total, total);
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMat> lu;
  lu.analyzePattern(mat);
  lu.factorize(mat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_saddle: sparse factorization failed");

  Eigen::VectorXd z = lu.solve(rhs);
  for (int it = 0; it < 2; ++it) {
    const Eigen::VectorXd r = rhs - mat * z;
    z += lu.solve(r);
  }

  SaddleSolution sol;
  sol.residual = (mat * z - rhs).norm() / std::max(rhs.norm(), 1e-300);
  sol.u = system.dirichlet_values;
  for (int i = 0; i < n2; ++i)
    if (!system.dirichlet_mask[i]) sol.u[i] = z[free_of[i]];
  sol.p = z.segment(nf, np);
  sol.rho = z[total - 1];
  return sol;
}

namespace {

double sample_max_divergence(const ReconstructionMap& rec, const VectorFunction& u) {
  const DiscreteFunction div = reconstructed_divergence(rec, u);
  const Mesh& mesh = *u.space->mesh;
  const QuadRule& rule = triangle_rule(2 * div.space->order + 2);
  std::vector<Vec2> pts(rule.size());
  for (int q = 0; q < rule.size(); ++q) pts[q] = Vec2(rule.x(q), rule.y(q));
  double worst = 0.0;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const Eigen::MatrixXd vals = evaluate(div, t, pts, EvalWhat::Value);
    worst = std::max(worst, vals.cwiseAbs().maxCoeff());
  }
  return worst;
}

int load_quad_degree(const Discretization& disc, const ExactSolution& exact) {
  const int bd = basis_degree(disc.velocity);
  return exact.f_degree >= 0 ? exact.f_degree + bd : 2 * bd + 10;
}

StokesSolution finish_solution(const Discretization& disc, const SaddleSolution& sol,
                               bool reconstruct, const ReconstructionMap* rec,
                               const SaddleSystem& system) {
  StokesSolution out{{&disc.velocity, sol.u}, {&disc.pressure, sol.p}, {}};
  out.report.algebraic_residual = sol.residual;
  out.report.total_dofs = 2 * disc.velocity.n_dofs + disc.pressure.n_dofs;
  const Eigen::VectorXd bres = system.B * sol.u + sol.rho * system.mean_constraint;
  out.report.b_residual = bres.lpNorm<Eigen::Infinity>();
  if (reconstruct) out.report.max_div_reconstructed = sample_max_divergence(*rec, out.u);
  return out;
}

}  // namespace

StokesSolution solve_stokes(const Discretization& disc, double nu, const ExactSolution& exact,
                            bool reconstruct, const ReconstructionMap* rec) {
  if (reconstruct && rec == nullptr)
    throw std::runtime_error("solve_stokes: reconstruction map required");
  SaddleSystem system;
  system.velocity = &disc.velocity;
  system.pressure = &disc.pressure;
  system.A = assemble_vector_laplace(disc.velocity, nu);
  system.B = assemble_div(disc.velocity, disc.pressure);
  system.mean_constraint = assemble_pressure_integral(disc.pressure);
  const int qd = load_quad_degree(disc, exact);
  system.F = reconstruct ? reconstructed_load(*rec, exact.f, qd)
                         : assemble_load(disc.velocity, exact.f, qd);
  apply_dirichlet(system, exact.u);
  const SaddleSolution sol = solve_saddle(system);
  return finish_solution(disc, sol, reconstruct, rec, system);
}

NavierStokesSolution solve_navier_stokes(const Discretization& disc, double nu,
                                         const ExactSolution& exact, bool reconstruct,
                                         const ReconstructionMap* rec, double tol, int max_iter) {
  if (reconstruct && rec == nullptr)
    throw std::runtime_error("solve_navier_stokes: reconstruction map required");
  NavierStokesSolution ns;

  SaddleSystem system;
  system.velocity = &disc.velocity;
  system.pressure = &disc.pressure;
  const SparseMat a_visc = assemble_vector_laplace(disc.velocity, nu);
  system.B = assemble_div(disc.velocity, disc.pressure);
  system.mean_constraint = assemble_pressure_integral(disc.pressure);
  const int qd = load_quad_degree(disc, exact);
  system.F = reconstruct ? reconstructed_load(*rec, exact.f_ns, qd)
                         : assemble_load(disc.velocity, exact.f_ns, qd);
  apply_dirichlet(system, exact.u);

  // Picard start: the Stokes solution with the same right-hand-side treatment
  system.A = a_visc;
  SaddleSolution current = solve_saddle(system);

  const SparseMat k1 = assemble_vector_laplace(disc.velocity, 1.0);
  const auto h1_norm = [&k1](const Eigen::VectorXd& v) { return std::sqrt(v.dot(k1 * v)); };

  double theta = 1.0;
  double prev_increment = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const VectorFunction u_m{&disc.velocity, current.u};
    SparseMat conv = assemble_convection(disc.velocity, u_m);
    if (reconstruct) {
      const SparseMat conv_rt = assemble_convection_rt(disc.velocity, rec->spaces.rt, u_m);
      conv = conv - SparseMat(rec->R.transpose() * conv_rt);
    }
    system.A = a_visc + conv;
    const SaddleSolution candidate = solve_saddle(system);

    const double increment = h1_norm(candidate.u - current.u);
    if (prev_increment >= 0.0 && increment > prev_increment) theta = std::max(0.0625, 0.5 * theta);
    else theta = std::min(1.0, 2.0 * theta);

    SaddleSolution next = candidate;
    if (theta < 1.0) {
      next.u = current.u + theta * (candidate.u - current.u);
      next.p = current.p + theta * (candidate.p - current.p);
    }
    const double rel = increment / std::max(1.0, h1_norm(next.u));
    ns.increment_history.push_back(rel);
    current = next;
    ns.iterations = it;
    prev_increment = increment;
    if (rel <= tol) {
      ns.converged = true;
      break;
    }
  }
  ns.stokes = finish_solution(disc, current, reconstruct, rec, system);
  return ns;
}

}  // namespace stokesrec
