// Reference bases on the unit triangle: equispaced Lagrange of order k and
// Raviart-Thomas of order m, both built from a monomial span by inverting the
// matrix of degree-of-freedom functionals.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "stokesrec/quadrature.hpp"

namespace stokesrec {

using Vec2 = Eigen::Vector2d;

// exponent pairs (a,b) with a+b <= degree, degree-lexicographic; empty for
// negative degree
const std::vector<std::array<int, 2>>& monomials(int degree);

inline int poly_dim(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

// shifted Legendre polynomial on [0,1]; satisfies P_i(1-t) = (-1)^i P_i(t)
double shifted_legendre(int i, double t);

// local edge i is opposite vertex i and runs from vertex (i+1)%3 to (i+2)%3
inline std::array<int, 2> ref_edge_vertices(int i) { return {(i + 1) % 3, (i + 2) % 3}; }

struct LagrangeRef {
  int order = 0;
  int dim = 0;
  std::vector<Vec2> nodes;  // vertices, then edge nodes, then interior nodes
  Eigen::MatrixXd coeff;    // column j = monomial coefficients of basis j

  Eigen::VectorXd eval(const Vec2& p) const;
  Eigen::MatrixXd eval_grad(const Vec2& p) const;  // dim x 2

  // cached tables at a triangle rule: values (npts x dim), gradients
  const Eigen::MatrixXd& values_at(const QuadRule& rule) const;
  const Eigen::MatrixXd& grad_x_at(const QuadRule& rule) const;
  const Eigen::MatrixXd& grad_y_at(const QuadRule& rule) const;

  // barycentric coordinate of local vertex v at node j
  double node_bary(int j, int v) const;

  mutable std::vector<std::array<Eigen::MatrixXd, 3>> tables_;  // per rule degree
};

struct RTRef {
  int order = 0;  // RT_m, local dimension (m+1)(m+3)
  int dim = 0;
  int n_edge_dofs = 0;  // m+1 per edge; local dofs: edge0, edge1, edge2, interior
  Eigen::MatrixXd coeff;

  // values and divergence of all basis functions at a point
  Eigen::MatrixXd eval(const Vec2& p) const;  // dim x 2
  Eigen::VectorXd eval_div(const Vec2& p) const;

  const Eigen::MatrixXd& values_x_at(const QuadRule& rule) const;
  const Eigen::MatrixXd& values_y_at(const QuadRule& rule) const;
  const Eigen::MatrixXd& div_at(const QuadRule& rule) const;

  mutable std::vector<std::array<Eigen::MatrixXd, 3>> tables_;
};

const LagrangeRef& lagrange_ref(int k);  // 1 <= k <= 8
const RTRef& rt_ref(int m);              // 0 <= m <= 6

}  // namespace stokesrec
