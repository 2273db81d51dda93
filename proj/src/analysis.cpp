#include "stokesrec/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "stokesrec/quadrature.hpp"

namespace stokesrec {

namespace {

double pow2(double x) { return x * x; }

ExactSolution example1_2d(double nu) {
  // u = curl zeta with zeta = x^2(x-1)^2 y^2(y-1)^2, p = x^7 + y^7 - 1/4
  const auto g = [](double x) { return pow2(x) * pow2(x - 1.0); };
  const auto dg = [](double x) { return 2.0 * x * (x - 1.0) * (2.0 * x - 1.0); };
  const auto d2g = [](double x) { return 12.0 * x * x - 12.0 * x + 2.0; };
  const auto d3g = [](double x) { return 24.0 * x - 12.0; };

  ExactSolution s;
  s.name = "example1_2d";
  s.nu = nu;
  s.u = [=](const Vec2& q) { return Vec2(g(q.x()) * dg(q.y()), -dg(q.x()) * g(q.y())); };
  s.grad_u = [=](const Vec2& q) {
    Eigen::Matrix2d m;
    m(0, 0) = dg(q.x()) * dg(q.y());
    m(0, 1) = g(q.x()) * d2g(q.y());
    m(1, 0) = -d2g(q.x()) * g(q.y());
    m(1, 1) = -dg(q.x()) * dg(q.y());
    return m;
  };
  s.laplace_u = [=](const Vec2& q) {
    return Vec2(d2g(q.x()) * dg(q.y()) + g(q.x()) * d3g(q.y()),
                -(d3g(q.x()) * g(q.y()) + dg(q.x()) * d2g(q.y())));
  };
  s.p = [](const Vec2& q) {
    return std::pow(q.x(), 7) + std::pow(q.y(), 7) - 0.25;
  };
  s.grad_p = [](const Vec2& q) {
    return Vec2(7.0 * std::pow(q.x(), 6), 7.0 * std::pow(q.y(), 6));
  };
  s.f_degree = 6;
  return s;
}

ExactSolution potential_flow(double nu) {
  // chi = Re((x+iy)^5); u = grad chi, p = 664/63 - 25/2 (x^2+y^2)^4
  ExactSolution s;
  s.name = "potential_flow";
  s.nu = nu;
  s.u = [](const Vec2& q) {
    const double x = q.x(), y = q.y();
    return Vec2(5.0 * std::pow(x, 4) - 30.0 * x * x * y * y + 5.0 * std::pow(y, 4),
                -20.0 * std::pow(x, 3) * y + 20.0 * x * std::pow(y, 3));
  };
  s.grad_u = [](const Vec2& q) {
    const double x = q.x(), y = q.y();
    const double hxx = 20.0 * std::pow(x, 3) - 60.0 * x * y * y;
    const double hxy = -60.0 * x * x * y + 20.0 * std::pow(y, 3);
    Eigen::Matrix2d m;
    m(0, 0) = hxx;
    m(0, 1) = hxy;
    m(1, 0) = hxy;
    m(1, 1) = -hxx;  // chi is harmonic
    return m;
  };
  s.laplace_u = [](const Vec2&) { return Vec2::Zero(); };
  s.p = [](const Vec2& q) {
    return 664.0 / 63.0 - 12.5 * std::pow(q.x() * q.x() + q.y() * q.y(), 4);
  };
  s.grad_p = [](const Vec2& q) {
    const double r2 = q.x() * q.x() + q.y() * q.y();
    return Vec2(-100.0 * std::pow(r2, 3) * q.x(), -100.0 * std::pow(r2, 3) * q.y());
  };
  s.f_degree = 7;
  return s;
}

ExactSolution gradient_forcing(double nu) {
  // f = grad(x^7 + y^7): the exact velocity is zero, the pressure captures
  // the potential
  ExactSolution s;
  s.name = "gradient_forcing";
  s.nu = nu;
  s.u = [](const Vec2&) { return Vec2::Zero(); };
  s.grad_u = [](const Vec2&) { return Eigen::Matrix2d::Zero(); };
  s.laplace_u = [](const Vec2&) { return Vec2::Zero(); };
  s.p = [](const Vec2& q) { return std::pow(q.x(), 7) + std::pow(q.y(), 7) - 0.25; };
  s.grad_p = [](const Vec2& q) {
    return Vec2(7.0 * std::pow(q.x(), 6), 7.0 * std::pow(q.y(), 6));
  };
  s.f_degree = 6;
  return s;
}

}  // namespace

ExactSolution preset(const std::string& name, double nu) {
  ExactSolution s;
  if (name == "example1_2d") {
    s = example1_2d(nu < 0.0 ? 1e-3 : nu);
  } else if (name == "potential_flow") {
    s = potential_flow(nu < 0.0 ? 0.1 : nu);
  } else if (name == "gradient_forcing") {
    s = gradient_forcing(nu < 0.0 ? 1e-3 : nu);
  } else {
    throw std::runtime_error("preset: unknown solution name '" + name + "'");
  }
  const double nu_eff = s.nu;
  const auto lap = s.laplace_u;
  const auto gp = s.grad_p;
  s.f = [nu_eff, lap, gp](const Vec2& q) { return Vec2(-nu_eff * lap(q) + gp(q)); };
  if (name == "potential_flow") {
    // (u . grad) u balances the pressure gradient exactly
    s.f_ns = [](const Vec2&) { return Vec2::Zero(); };
  } else {
    const auto f = s.f;
    const auto u = s.u;
    const auto gu = s.grad_u;
    s.f_ns = [f, u, gu](const Vec2& q) { return Vec2(f(q) + gu(q) * u(q)); };
  }
  return s;
}

namespace {

template <typename CellTerm>
double integrate_squared(const Mesh& mesh, int quad_degree, CellTerm term) {
  const QuadRule& rule = triangle_rule(quad_degree);
  double total = 0.0;
  std::vector<Vec2> pts(rule.size());
  for (int q = 0; q < rule.size(); ++q) pts[q] = Vec2(rule.x(q), rule.y(q));
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const double det = mesh.jacobian(t).determinant();
    total += det * term(t, pts, rule);
  }
  return std::sqrt(total);
}

}  // namespace

double error_h1(const VectorFunction& u_h, const ExactSolution& exact, int quad_degree) {
  const FeSpace& sp = *u_h.space;
  const DiscreteFunction ux{&sp, u_h.component(0)}, uy{&sp, u_h.component(1)};
  return integrate_squared(*sp.mesh, quad_degree,
                           [&](int t, const std::vector<Vec2>& pts, const QuadRule& rule) {
                             const Eigen::MatrixXd gx = evaluate(ux, t, pts, EvalWhat::Gradient);
                             const Eigen::MatrixXd gy = evaluate(uy, t, pts, EvalWhat::Gradient);
                             double acc = 0.0;
                             for (size_t q = 0; q < pts.size(); ++q) {
                               const Vec2 phys = sp.mesh->map_to_physical(t, pts[q]);
                               Eigen::Matrix2d gh;
                               gh << gx(q, 0), gx(q, 1), gy(q, 0), gy(q, 1);
                               acc += rule.weights[q] *
                                      (exact.grad_u(phys) - gh).squaredNorm();
                             }
                             return acc;
                           });
}

double error_l2(const VectorFunction& u_h, const ExactSolution& exact, int quad_degree) {
  const FeSpace& sp = *u_h.space;
  const DiscreteFunction ux{&sp, u_h.component(0)}, uy{&sp, u_h.component(1)};
  return integrate_squared(*sp.mesh, quad_degree,
                           [&](int t, const std::vector<Vec2>& pts, const QuadRule& rule) {
                             const Eigen::MatrixXd vx = evaluate(ux, t, pts, EvalWhat::Value);
                             const Eigen::MatrixXd vy = evaluate(uy, t, pts, EvalWhat::Value);
                             double acc = 0.0;
                             for (size_t q = 0; q < pts.size(); ++q) {
                               const Vec2 phys = sp.mesh->map_to_physical(t, pts[q]);
                               acc += rule.weights[q] *
                                      (exact.u(phys) - Vec2(vx(q, 0), vy(q, 0))).squaredNorm();
                             }
                             return acc;
                           });
}

double error_l2_pressure(const DiscreteFunction& p_h, const ExactSolution& exact,
                         int quad_degree) {
  const FeSpace& sp = *p_h.space;
  return integrate_squared(*sp.mesh, quad_degree,
                           [&](int t, const std::vector<Vec2>& pts, const QuadRule& rule) {
                             const Eigen::MatrixXd v = evaluate(p_h, t, pts, EvalWhat::Value);
                             double acc = 0.0;
                             for (size_t q = 0; q < pts.size(); ++q) {
                               const Vec2 phys = sp.mesh->map_to_physical(t, pts[q]);
                               acc += rule.weights[q] * pow2(exact.p(phys) - v(q, 0));
                             }
                             return acc;
                           });
}

double norm_h1(const VectorFunction& u_h, int quad_degree) {
  const FeSpace& sp = *u_h.space;
  const DiscreteFunction ux{&sp, u_h.component(0)}, uy{&sp, u_h.component(1)};
  return integrate_squared(*sp.mesh, quad_degree,
                           [&](int t, const std::vector<Vec2>& pts, const QuadRule& rule) {
                             const Eigen::MatrixXd gx = evaluate(ux, t, pts, EvalWhat::Gradient);
                             const Eigen::MatrixXd gy = evaluate(uy, t, pts, EvalWhat::Gradient);
                             double acc = 0.0;
                             for (size_t q = 0; q < pts.size(); ++q)
                               acc += rule.weights[q] * (pow2(gx(q, 0)) + pow2(gx(q, 1)) +
                                                         pow2(gy(q, 0)) + pow2(gy(q, 1)));
                             return acc;
                           });
}

std::vector<std::optional<double>> eoc(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<std::optional<double>> rates;
  for (size_t i = 1; i < pairs.size(); ++i) {
    const auto [h0, e0] = pairs[i - 1];
    const auto [h1, e1] = pairs[i];
    if (e0 <= 0.0 || e1 <= 0.0 || h0 <= h1)
      rates.push_back(std::nullopt);
    else
      rates.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  return rates;
}

}  // namespace stokesrec
