#include "stokesrec/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stokesrec {

void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights) {
  // Golub-Welsch: eigenvalues of the Jacobi matrix for Legendre polynomials
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  points.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    points[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;  // on [-1,1] weights are 2*v0^2; scaling to [0,1] halves them
  }
}

const QuadRule& edge_rule(int degree) {
  if (degree < 0 || degree > 60) throw std::runtime_error("edge_rule: degree out of range");
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  const int n = degree / 2 + 1;  // 2n-1 >= degree
  std::vector<double> pts, wts;
  gauss_legendre(n, pts, wts);
  QuadRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back({pts[i], 1.0 - pts[i], 0.0});
    rule.weights.push_back(wts[i]);
  }
  return cache.emplace(degree, std::move(rule)).first->second;
}

const QuadRule& triangle_rule(int degree) {
  if (degree < 0 || degree > 30) throw std::runtime_error("triangle_rule: degree out of range");
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  // x = u, y = v(1-u), jacobian (1-u); for f of degree d the u-integrand has
  // degree d+1, so n with 2n-1 >= degree+1 is exact in both directions
  const int n = degree / 2 + 2;
  std::vector<double> pts, wts;
  gauss_legendre(n, pts, wts);
  QuadRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = pts[i];
      const double y = pts[j] * (1.0 - pts[i]);
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(wts[i] * wts[j] * (1.0 - pts[i]));
    }
  }
  return cache.emplace(degree, std::move(rule)).first->second;
}

}  // namespace stokesrec
