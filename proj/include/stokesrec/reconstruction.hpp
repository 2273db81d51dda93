// Velocity reconstruction by local H(div) flux equilibration: per-vertex
// saddle-point problems whose solutions assemble a sparse map from velocity
// dofs to global Raviart-Thomas dofs.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stokesrec/projectors.hpp"
#include "stokesrec/spaces.hpp"

namespace stokesrec {

enum class Variant { TaylorHood, Mini };

struct ElementChoice {
  Variant variant = Variant::TaylorHood;
  int k = 2;
};

// orders of the local spaces tied to the element choice
inline int rt_order(const ElementChoice& e) { return e.variant == Variant::TaylorHood ? e.k - 1 : e.k + 1; }
inline int local_q_order(const ElementChoice& e) { return rt_order(e); }
inline int oswald_order(const ElementChoice& e) { return e.variant == Variant::TaylorHood ? e.k - 1 : e.k; }
inline int koszul_order(const ElementChoice& e) { return e.variant == Variant::TaylorHood ? e.k - 3 : e.k - 2; }

// global companion spaces shared by all patches of one mesh/element pair
struct ReconstructionSpaces {
  FeSpace rt;     // full RT space, rows of the reconstruction map
  FeSpace qdisc;  // discontinuous Lagrange of the same order
  FeSpace qcont;  // continuous Oswald target
};

ReconstructionSpaces make_reconstruction_spaces(const Mesh& mesh, const ElementChoice& element);

struct PatchSystem {
  const VertexPatch* patch = nullptr;
  ElementChoice element;
  int n_sigma = 0, n_q = 0, n_w = 0;
  std::vector<int> sigma_dofs;    // local sigma index -> global RT dof
  Eigen::MatrixXd bubble_matrix;  // psi -> bubble(psi - oswald(psi)) on patch coefficients
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double pivot_ratio = 0.0;  // min/max |U_ii| of the factorization

  int size() const { return n_sigma + n_q + n_w + 1; }
};

PatchSystem assemble_patch_system(const Mesh& mesh, const VertexPatch& patch,
                                  const ElementChoice& element, const ReconstructionSpaces& spaces);

// right-hand side for a given velocity field: entries for the q-block tests,
// zero elsewhere
Eigen::VectorXd patch_rhs(const Mesh& mesh, const PatchSystem& system,
                          const ReconstructionSpaces& spaces, const FeSpace& velocity,
                          const VectorFunction& w);

// solves and returns the sigma coefficients (multipliers discarded)
Eigen::VectorXd solve_patch(const PatchSystem& system, const Eigen::VectorXd& rhs);

struct PatchDiagnostics {
  int vertex = 0;
  int n_sigma = 0, n_q = 0, n_w = 0, size = 0;
  double pivot_ratio = 0.0;
};

struct ReconstructionMap {
  ElementChoice element;
  const FeSpace* velocity = nullptr;
  ReconstructionSpaces spaces;
  Eigen::SparseMatrix<double> R;  // (global RT dofs) x (2 * velocity scalar dofs)
  std::vector<PatchDiagnostics> diagnostics;
};

ReconstructionMap build_reconstruction(const Mesh& mesh, const std::vector<VertexPatch>& patches,
                                       const FeSpace& velocity, const ElementChoice& element);

// RT coefficients of sigma(w); the reconstruction is R_h w = w - sigma(w)
Eigen::VectorXd sigma_of(const ReconstructionMap& map, const VectorFunction& w);

// div(R_h w) as an element-wise polynomial, exact per cell
DiscreteFunction reconstructed_divergence(const ReconstructionMap& map, const VectorFunction& w);

// (f, R_h v_i) for all stacked velocity test functions
Eigen::VectorXd reconstructed_load(const ReconstructionMap& map, const VectorField& f,
                                   int quad_degree);

// patch-weighted distance of g to patch-global degree-m polynomials
double data_oscillation(const Mesh& mesh, const std::vector<VertexPatch>& patches,
                        const VectorField& g, int m, int quad_degree);

}  // namespace stokesrec
