// Quadrature on the reference triangle {x,y >= 0, x+y <= 1} and the unit
// edge [0,1], exact to a requested polynomial degree.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace stokesrec {

struct QuadRule {
  // triangle rules: barycentric points (l0,l1,l2) with l0 = 1-x-y, weights
  // summing to 1/2; edge rules: points (t, 1-t, 0), weights summing to 1
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
  double x(int q) const { return points[q][1]; }
  double y(int q) const { return points[q][2]; }
  double t(int q) const { return points[q][0]; }  // edge parameter
};

// tensor Gauss on the square collapsed onto the triangle (Duffy transform),
// exact for all monomials x^a y^b with a+b <= degree
const QuadRule& triangle_rule(int degree);

// Gauss-Legendre on [0,1]
const QuadRule& edge_rule(int degree);

// Gauss-Legendre nodes/weights on [0,1], weights summing to 1
void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace stokesrec
