// Patch-local projection tools: the vertex bubble projector, Oswald averaging
// between discontinuous and continuous Lagrange spaces, Koszul complement
// bases and patch-global polynomial L2 projection.
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "stokesrec/spaces.hpp"

namespace stokesrec {

// nodal averaging onto a continuous space of order <= source order; the
// restriction to already-continuous inputs is the identity
DiscreteFunction oswald(const DiscreteFunction& q_disc, const FeSpace& cont_target);

// nodal embedding of a continuous function into a discontinuous space of
// equal or higher order (exact)
DiscreteFunction embed_discontinuous(const DiscreteFunction& q_cont, const FeSpace& disc_space);

// scales every Lagrange coefficient of the patch cells by the barycentric
// coordinate of the patch vertex at that node; zero outside the patch
DiscreteFunction bubble_project(const VertexPatch& patch, const DiscreteFunction& q_disc);

// matrix of psi -> bubble_project(psi - oswald(psi)) on the patch-local
// stacked coefficients (cells in patch order, local_dim entries per cell)
Eigen::MatrixXd patch_bubble_oswald_matrix(const VertexPatch& patch, const FeSpace& q_disc,
                                           const FeSpace& cont_target);

// kappa_{x-V}(a) for a in a monomial basis of P^{worder} in coordinates
// shifted to the vertex and scaled by h_V
struct KoszulBasis {
  int vertex = -1;
  int order = 0;  // velocity order k the basis belongs to
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  int worder = -1;  // polynomial order of the argument space
  int dim = 0;

  Eigen::MatrixXd eval(const Vec2& p) const;  // dim x 2
};

KoszulBasis koszul_fields(const Mesh& mesh, const VertexPatch& patch, int worder);
// spec form: multiplier space of the order-k velocity reconstruction
KoszulBasis koszul_basis(const Mesh& mesh, const VertexPatch& patch, int k);

// component-wise polynomial on the whole patch, L2-projected
struct PatchPoly {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  int order = 0;
  Eigen::MatrixXd coeff;  // poly_dim x 2

  Vec2 eval(const Vec2& p) const;
};

// evaluator receives (cell, reference point, physical point)
using CellVectorField = std::function<Vec2(int, const Vec2&, const Vec2&)>;

PatchPoly patch_poly_project(const Mesh& mesh, const VertexPatch& patch,
                             const CellVectorField& g, int m, int quad_degree);
PatchPoly patch_poly_project(const Mesh& mesh, const VertexPatch& patch, const VectorField& g,
                             int m, int quad_degree);

struct KoszulDecompositionReport {
  int k = 0;
  int dim_full = 0;    // dim [P^{k-2}]^2
  int dim_grad = 0;    // dim grad P^{k-1}
  int dim_koszul = 0;  // dim kappa(P^{k-3})
  int rank = 0;
  bool ok = false;
};

// verifies the 2d splitting [P^{k-2}]^2 = grad P^{k-1} + kappa_{x-V}(P^{k-3})
// by a rank test on sampled field values
KoszulDecompositionReport koszul_decomposition_check(int k);

}  // namespace stokesrec
