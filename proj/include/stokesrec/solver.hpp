// Direct solution of the discrete Stokes and steady Navier-Stokes systems,
// with or without the reconstructed right-hand side.
#pragma once

#include "stokesrec/analysis.hpp"
#include "stokesrec/assembly.hpp"
#include "stokesrec/reconstruction.hpp"

namespace stokesrec {

struct Discretization {
  const Mesh* mesh = nullptr;
  ElementChoice element;
  FeSpace velocity;  // scalar component space
  FeSpace pressure;
};

Discretization make_discretization(const Mesh& mesh, const ElementChoice& element);

struct SaddleSolution {
  Eigen::VectorXd u;  // stacked velocity with Dirichlet values filled in
  Eigen::VectorXd p;  // zero-mean pressure
  double rho = 0.0;   // multiplier of the mean constraint
  double residual = 0.0;
};

SaddleSolution solve_saddle(const SaddleSystem& system);

struct StokesReport {
  double algebraic_residual = 0.0;
  double b_residual = 0.0;           // max |b(u_h, q_h) + rho (q_h, 1)|
  double max_div_reconstructed = 0.0;  // sampled |div R_h u_h|, reconstruct only
  int total_dofs = 0;
};

struct StokesSolution {
  VectorFunction u;
  DiscreteFunction p;
  StokesReport report;
};

// reconstruction map required iff reconstruct is set
StokesSolution solve_stokes(const Discretization& disc, double nu, const ExactSolution& exact,
                            bool reconstruct, const ReconstructionMap* rec);

struct NavierStokesSolution {
  StokesSolution stokes;
  int iterations = 0;
  bool converged = false;
  std::vector<double> increment_history;
};

NavierStokesSolution solve_navier_stokes(const Discretization& disc, double nu,
                                         const ExactSolution& exact, bool reconstruct,
                                         const ReconstructionMap* rec, double tol = 1e-11,
                                         int max_iter = 50);

}  // namespace stokesrec
