// Global sparse operators for the Stokes and Navier-Stokes systems plus
// Dirichlet handling. Velocity fields are component-wise over a scalar space
// (x-block then y-block); Raviart-Thomas operators address RT dofs directly.
#pragma once

#include <Eigen/Sparse>
#include <string>

#include "stokesrec/spaces.hpp"

namespace stokesrec {

using SparseMat = Eigen::SparseMatrix<double>;

// polynomial degree of the basis functions of a scalar space
int basis_degree(const FeSpace& space);

// nu * (grad u, grad v) on the scalar space; the vector operator is the same
// block twice
SparseMat assemble_scalar_laplace(const FeSpace& space, double nu);
SparseMat assemble_vector_laplace(const FeSpace& space, double nu);

// b(v, q) = (q, div v): rows pressure dofs, columns stacked velocity dofs
SparseMat assemble_div(const FeSpace& velocity, const FeSpace& pressure);

// integrals of the pressure basis functions (the zero-mean constraint row)
Eigen::VectorXd assemble_pressure_integral(const FeSpace& pressure);

// (f, v) for stacked velocity test functions
Eigen::VectorXd assemble_load(const FeSpace& velocity, const VectorField& f, int quad_degree);
// (f, tau) for the RT basis
Eigen::VectorXd assemble_rt_load(const FeSpace& rt, const VectorField& f, int quad_degree);

// convection (u . grad) w tested against velocity / RT basis functions
SparseMat assemble_convection(const FeSpace& velocity, const VectorFunction& u);
SparseMat assemble_convection_rt(const FeSpace& velocity, const FeSpace& rt,
                                 const VectorFunction& u);

bool is_symmetric(const SparseMat& m, double tol = 1e-13);

void write_matrix_market(const std::string& path, const SparseMat& m);

struct SaddleSystem {
  const FeSpace* velocity = nullptr;
  const FeSpace* pressure = nullptr;
  SparseMat A;                      // 2n x 2n viscous block (+ convection)
  SparseMat B;                      // np x 2n divergence coupling
  Eigen::VectorXd mean_constraint;  // np, enforces zero pressure mean
  Eigen::VectorXd F;                // 2n load
  std::vector<char> dirichlet_mask;
  Eigen::VectorXd dirichlet_values;
};

// constrain all boundary velocity dofs to the interpolant of g
void apply_dirichlet(SaddleSystem& system, const VectorField& g);

}  // namespace stokesrec
