// Benchmark solutions in closed form, error norms against them, and
// convergence-order estimation.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stokesrec/spaces.hpp"

namespace stokesrec {

struct ExactSolution {
  std::string name;
  double nu = 1.0;
  VectorField u;
  std::function<Eigen::Matrix2d(const Vec2&)> grad_u;  // (i,j) = d_j u_i
  VectorField laplace_u;
  ScalarField p;
  VectorField grad_p;
  VectorField f;     // Stokes forcing -nu laplace(u) + grad(p)
  VectorField f_ns;  // Navier-Stokes forcing f + (u . grad) u
  int f_degree = -1;  // polynomial degree of f, -1 when not polynomial
};

// names: example1_2d, potential_flow, gradient_forcing; nu < 0 picks the
// preset default
ExactSolution preset(const std::string& name, double nu = -1.0);

// gradient seminorm of the velocity error
double error_h1(const VectorFunction& u_h, const ExactSolution& exact, int quad_degree);
double error_l2(const VectorFunction& u_h, const ExactSolution& exact, int quad_degree);
double error_l2_pressure(const DiscreteFunction& p_h, const ExactSolution& exact, int quad_degree);

// H1 seminorm and L2 norm of a discrete field itself
double norm_h1(const VectorFunction& u_h, int quad_degree);

// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); empty where not computable
std::vector<std::optional<double>> eoc(const std::vector<std::pair<double, double>>& h_and_error);

}  // namespace stokesrec
