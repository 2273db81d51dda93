#include "stokesrec/assembly.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "stokesrec/quadrature.hpp"

namespace stokesrec {

namespace {

using Triplet = Eigen::Triplet<double>;

// per-cell physical gradient tables for a scalar space at a rule
struct CellScalarBasis {
  Eigen::MatrixXd vals;    // npts x dim
  Eigen::MatrixXd grad_x;  // npts x dim
  Eigen::MatrixXd grad_y;
  Eigen::VectorXd wdet;  // physical quadrature weights
};

CellScalarBasis cell_scalar_basis(const FeSpace& space, int cell, const QuadRule& rule) {
  CellScalarBasis out;
  const Mesh& mesh = *space.mesh;
  const Eigen::Matrix2d jac = mesh.jacobian(cell);
  const double det = jac.determinant();
  const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
  const int np = rule.size();
  out.vals.resize(np, space.local_dim);
  out.grad_x.resize(np, space.local_dim);
  out.grad_y.resize(np, space.local_dim);
  out.wdet.resize(np);
  for (int q = 0; q < np; ++q) {
    const Vec2 p(rule.x(q), rule.y(q));
    out.vals.row(q) = scalar_basis_values(space, p).transpose();
    const Eigen::MatrixXd g = scalar_basis_grads(space, p);
    for (int l = 0; l < space.local_dim; ++l) {
      const Eigen::Vector2d phys = jinv_t * g.row(l).transpose();
      out.grad_x(q, l) = phys.x();
      out.grad_y(q, l) = phys.y();
    }
    out.wdet[q] = rule.weights[q] * det;
  }
  return out;
}

}  // namespace

int basis_degree(const FeSpace& space) {
  switch (space.kind) {
    case SpaceKind::MiniVelocity: return space.order + 2;
    case SpaceKind::RaviartThomas: return space.order + 1;
    default: return space.order;
  }
}

SparseMat assemble_scalar_laplace(const FeSpace& space, double nu) {
  if (nu <= 0.0) throw std::runtime_error("assemble_scalar_laplace: nu must be positive");
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = triangle_rule(2 * (basis_degree(space) - 1) + 1);
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_cells() * space.local_dim * space.local_dim);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis b = cell_scalar_basis(space, t, rule);
    const Eigen::MatrixXd loc = nu * (b.grad_x.transpose() * b.wdet.asDiagonal() * b.grad_x +
                                      b.grad_y.transpose() * b.wdet.asDiagonal() * b.grad_y);
    for (int i = 0; i < space.local_dim; ++i)
      for (int j = 0; j < space.local_dim; ++j)
        trips.emplace_back(space.dof(t, i), space.dof(t, j), loc(i, j));
  }
  SparseMat m(space.n_dofs, space.n_dofs);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMat assemble_vector_laplace(const FeSpace& space, double nu) {
  const SparseMat k = assemble_scalar_laplace(space, nu);
  const int n = space.n_dofs;
  std::vector<Triplet> trips;
  trips.reserve(2 * k.nonZeros());
  for (int col = 0; col < k.outerSize(); ++col)
    for (SparseMat::InnerIterator it(k, col); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
      trips.emplace_back(n + it.row(), n + it.col(), it.value());
    }
  SparseMat m(2 * n, 2 * n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMat assemble_div(const FeSpace& velocity, const FeSpace& pressure) {
  const Mesh& mesh = *velocity.mesh;
  const QuadRule& rule = triangle_rule(basis_degree(pressure) + basis_degree(velocity) - 1 + 1);
  const int ns = velocity.n_dofs;
  std::vector<Triplet> trips;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis bv = cell_scalar_basis(velocity, t, rule);
    const CellScalarBasis bp = cell_scalar_basis(pressure, t, rule);
    const Eigen::MatrixXd loc_x = bp.vals.transpose() * bv.wdet.asDiagonal() * bv.grad_x;
    const Eigen::MatrixXd loc_y = bp.vals.transpose() * bv.wdet.asDiagonal() * bv.grad_y;
    for (int i = 0; i < pressure.local_dim; ++i)
      for (int j = 0; j < velocity.local_dim; ++j) {
        trips.emplace_back(pressure.dof(t, i), velocity.dof(t, j), loc_x(i, j));
        trips.emplace_back(pressure.dof(t, i), ns + velocity.dof(t, j), loc_y(i, j));
      }
  }
  SparseMat m(pressure.n_dofs, 2 * ns);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::VectorXd assemble_pressure_integral(const FeSpace& pressure) {
  const Mesh& mesh = *pressure.mesh;
  const QuadRule& rule = triangle_rule(basis_degree(pressure) + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(pressure.n_dofs);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis b = cell_scalar_basis(pressure, t, rule);
    const Eigen::VectorXd loc = b.vals.transpose() * b.wdet;
    for (int i = 0; i < pressure.local_dim; ++i) v[pressure.dof(t, i)] += loc[i];
  }
  return v;
}

Eigen::VectorXd assemble_load(const FeSpace& velocity, const VectorField& f, int quad_degree) {
  const Mesh& mesh = *velocity.mesh;
  const QuadRule& rule = triangle_rule(quad_degree);
  const int ns = velocity.n_dofs;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(2 * ns);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis b = cell_scalar_basis(velocity, t, rule);
    Eigen::VectorXd fx(rule.size()), fy(rule.size());
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 fv = f(mesh.map_to_physical(t, Vec2(rule.x(q), rule.y(q))));
      fx[q] = fv.x();
      fy[q] = fv.y();
    }
    const Eigen::VectorXd lx = b.vals.transpose() * (b.wdet.asDiagonal() * fx);
    const Eigen::VectorXd ly = b.vals.transpose() * (b.wdet.asDiagonal() * fy);
    for (int i = 0; i < velocity.local_dim; ++i) {
      load[velocity.dof(t, i)] += lx[i];
      load[ns + velocity.dof(t, i)] += ly[i];
    }
  }
  return load;
}

Eigen::VectorXd assemble_rt_load(const FeSpace& rt, const VectorField& f, int quad_degree) {
  const Mesh& mesh = *rt.mesh;
  const QuadRule& rule = triangle_rule(quad_degree);
  const RTRef& ref = rt_ref(rt.order);
  const Eigen::MatrixXd& vx = ref.values_x_at(rule);
  const Eigen::MatrixXd& vy = ref.values_y_at(rule);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(rt.n_dofs);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const Eigen::Matrix2d jac = mesh.jacobian(t);
    const double det = jac.determinant();
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(rt.local_dim);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 fv = f(mesh.map_to_physical(t, Vec2(rule.x(q), rule.y(q))));
      // Piola: value = J * ref / det; weight w*det cancels one det
      const Eigen::Vector2d pulled = jac.transpose() * fv;
      loc += rule.weights[q] * (vx.row(q).transpose() * pulled.x() + vy.row(q).transpose() * pulled.y());
    }
    for (int l = 0; l < rt.local_dim; ++l) {
      const int g = rt.dof(t, l);
      if (g >= 0) load[g] += rt.sign(t, l) * loc[l];
    }
  }
  return load;
}

SparseMat assemble_convection(const FeSpace& velocity, const VectorFunction& u) {
  const Mesh& mesh = *velocity.mesh;
  if (u.space != &velocity) throw std::runtime_error("assemble_convection: space mismatch");
  const QuadRule& rule = triangle_rule(3 * basis_degree(velocity));
  const int ns = velocity.n_dofs;
  std::vector<Triplet> trips;
  const DiscreteFunction ux{&velocity, u.component(0)}, uy{&velocity, u.component(1)};
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis b = cell_scalar_basis(velocity, t, rule);
    const Eigen::VectorXd ux_loc = local_coeffs(ux, t), uy_loc = local_coeffs(uy, t);
    const Eigen::VectorXd ux_q = b.vals * ux_loc;
    const Eigen::VectorXd uy_q = b.vals * uy_loc;
    // (u . grad phi_j) phi_i, identical block for both components
    Eigen::MatrixXd adv(rule.size(), velocity.local_dim);
    for (int q = 0; q < rule.size(); ++q)
      adv.row(q) = ux_q[q] * b.grad_x.row(q) + uy_q[q] * b.grad_y.row(q);
    const Eigen::MatrixXd loc = b.vals.transpose() * b.wdet.asDiagonal() * adv;
    for (int i = 0; i < velocity.local_dim; ++i)
      for (int j = 0; j < velocity.local_dim; ++j) {
        trips.emplace_back(velocity.dof(t, i), velocity.dof(t, j), loc(i, j));
        trips.emplace_back(ns + velocity.dof(t, i), ns + velocity.dof(t, j), loc(i, j));
      }
  }
  SparseMat m(2 * ns, 2 * ns);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMat assemble_convection_rt(const FeSpace& velocity, const FeSpace& rt,
                                 const VectorFunction& u) {
  const Mesh& mesh = *velocity.mesh;
  const QuadRule& rule = triangle_rule(2 * basis_degree(velocity) + basis_degree(rt));
  const RTRef& ref = rt_ref(rt.order);
  const Eigen::MatrixXd& vx = ref.values_x_at(rule);
  const Eigen::MatrixXd& vy = ref.values_y_at(rule);
  const int ns = velocity.n_dofs;
  std::vector<Triplet> trips;
  const DiscreteFunction uxf{&velocity, u.component(0)}, uyf{&velocity, u.component(1)};
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const CellScalarBasis b = cell_scalar_basis(velocity, t, rule);
    const Eigen::Matrix2d jac = mesh.jacobian(t);
    const Eigen::VectorXd ux_q = b.vals * local_coeffs(uxf, t);
    const Eigen::VectorXd uy_q = b.vals * local_coeffs(uyf, t);
    Eigen::MatrixXd adv(rule.size(), velocity.local_dim);
    for (int q = 0; q < rule.size(); ++q)
      adv.row(q) = ux_q[q] * b.grad_x.row(q) + uy_q[q] * b.grad_y.row(q);
    // RT physical components; w*det cancels the Piola 1/det
    Eigen::MatrixXd rtx(rule.size(), rt.local_dim), rty(rule.size(), rt.local_dim);
    for (int q = 0; q < rule.size(); ++q)
      for (int l = 0; l < rt.local_dim; ++l) {
        const Eigen::Vector2d val = jac * Eigen::Vector2d(vx(q, l), vy(q, l));
        rtx(q, l) = val.x() * rule.weights[q];
        rty(q, l) = val.y() * rule.weights[q];
      }
    const Eigen::MatrixXd loc_x = rtx.transpose() * adv;  // test component x
    const Eigen::MatrixXd loc_y = rty.transpose() * adv;
    for (int l = 0; l < rt.local_dim; ++l) {
      const int gl = rt.dof(t, l);
      if (gl < 0) continue;
      const double s = rt.sign(t, l);
      for (int j = 0; j < velocity.local_dim; ++j) {
        trips.emplace_back(gl, velocity.dof(t, j), s * loc_x(l, j));
        trips.emplace_back(gl, ns + velocity.dof(t, j), s * loc_y(l, j));
      }
    }
  }
  SparseMat m(rt.n_dofs, 2 * ns);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

bool is_symmetric(const SparseMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  SparseMat diff = SparseMat(m.transpose()) - m;
  double max_diff = 0.0, max_val = 0.0;
  for (int col = 0; col < diff.outerSize(); ++col)
    for (SparseMat::InnerIterator it(diff, col); it; ++it)
      max_diff = std::max(max_diff, std::abs(it.value()));
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMat::InnerIterator it(m, col); it; ++it)
      max_val = std::max(max_val, std::abs(it.value()));
  return max_diff <= tol * std::max(max_val, 1e-300);
}

void write_matrix_market(const std::string& path, const SparseMat& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[64];
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMat::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
}

void apply_dirichlet(SaddleSystem& system, const VectorField& g) {
  const FeSpace& vel = *system.velocity;
  const int ns = vel.n_dofs;
  system.dirichlet_mask.assign(2 * ns, 0);
  system.dirichlet_values = Eigen::VectorXd::Zero(2 * ns);
  const VectorFunction gi = interpolate_vector(vel, g);
  for (int d : vel.boundary_dofs) {
    for (int c = 0; c < 2; ++c) {
      system.dirichlet_mask[c * ns + d] = 1;
      system.dirichlet_values[c * ns + d] = gi.coeffs[c * ns + d];
    }
  }
}

}  // namespace stokesrec
