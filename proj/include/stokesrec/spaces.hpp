// Discrete spaces over a triangulation: continuous/discontinuous Lagrange,
// bubble-enriched mini velocity, and Raviart-Thomas with Piola mapping.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stokesrec/mesh.hpp"
#include "stokesrec/reference.hpp"

namespace stokesrec {

enum class SpaceKind { LagrangeContinuous, LagrangeDiscontinuous, MiniVelocity, RaviartThomas };

enum class EvalWhat { Value, Gradient, Divergence };

// scalar analytic field and 2d vector analytic field
using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

struct FeSpace {
  SpaceKind kind;
  int order = 0;
  const Mesh* mesh = nullptr;
  int n_dofs = 0;
  int local_dim = 0;
  std::vector<int> dof_map;      // cell-major, [cell*local_dim + l]; -1 = constrained to zero
  std::vector<double> dof_sign;  // same layout; +-1, relevant for normal-flux dofs
  std::vector<int> boundary_dofs;

  int dof(int cell, int l) const { return dof_map[cell * local_dim + l]; }
  double sign(int cell, int l) const { return dof_sign[cell * local_dim + l]; }
  bool is_vector_valued() const { return kind == SpaceKind::RaviartThomas; }
};

// scalar coefficient field over a space (RT functions are vector-valued with
// scalar normal-flux coefficients)
struct DiscreteFunction {
  const FeSpace* space = nullptr;
  Eigen::VectorXd coeffs;
};

FeSpace lagrange_space(const Mesh& mesh, int k, bool continuous);
FeSpace mini_space(const Mesh& mesh, int k);
// RT_m with normal-flux dofs removed on the listed edges
FeSpace rt_space(const Mesh& mesh, int m, const std::vector<int>& zero_normal_edges = {});

// local coefficient vector of a cell (constrained dofs contribute zero; signs
// applied so the result multiplies the reference basis after Piola mapping)
Eigen::VectorXd local_coeffs(const DiscreteFunction& f, int cell);

// evaluation at reference points of one cell, mapped to physical space.
// Value: (npts x 1) scalar spaces, (npts x 2) RT. Gradient: (npts x 2) scalar.
// Divergence: (npts x 1), RT only.
Eigen::MatrixXd evaluate(const DiscreteFunction& f, int cell, const std::vector<Vec2>& ref_points,
                         EvalWhat what);

DiscreteFunction interpolate(const FeSpace& space, const ScalarField& field);
DiscreteFunction interpolate_rt(const FeSpace& space, const VectorField& field,
                                int quad_degree = 14);

// component-wise vector field over a scalar space: x-block then y-block
struct VectorFunction {
  const FeSpace* space = nullptr;
  Eigen::VectorXd coeffs;  // size 2 * n_dofs

  Eigen::VectorXd component(int c) const {
    return coeffs.segment(c * space->n_dofs, space->n_dofs);
  }
};

VectorFunction interpolate_vector(const FeSpace& space, const VectorField& field);

// mini-velocity basis tables on the reference cell (Lagrange part + bubbles)
struct MiniRef {
  const LagrangeRef* lag = nullptr;
  int n_bubbles = 0;  // dim P_{k-1}
  int dim = 0;

  Eigen::VectorXd eval(const Vec2& p) const;
  Eigen::MatrixXd eval_grad(const Vec2& p) const;
};
const MiniRef& mini_ref(int k);

// basis values/gradients of any scalar space on its reference cell
Eigen::VectorXd scalar_basis_values(const FeSpace& space, const Vec2& p);
Eigen::MatrixXd scalar_basis_grads(const FeSpace& space, const Vec2& p);

}  // namespace stokesrec
