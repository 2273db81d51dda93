#include "stokesrec/reference.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace stokesrec {

const std::vector<std::array<int, 2>>& monomials(int degree) {
  static std::map<int, std::vector<std::array<int, 2>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  std::vector<std::array<int, 2>> m;
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) m.push_back({a, d - a});
  return cache.emplace(degree, std::move(m)).first->second;
}

double shifted_legendre(int i, double t) {
  const double u = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = u;
  if (i == 0) return p0;
  if (i == 1) return p1;
  for (int n = 1; n < i; ++n) {
    const double p2 = ((2 * n + 1) * u * p1 - n * p0) / (n + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

Eigen::VectorXd mono_eval(int degree, const Vec2& p) {
  const auto& m = monomials(degree);
  Eigen::VectorXd v(m.size());
  for (size_t i = 0; i < m.size(); ++i) v[i] = ipow(p.x(), m[i][0]) * ipow(p.y(), m[i][1]);
  return v;
}

Eigen::MatrixXd mono_grad(int degree, const Vec2& p) {
  const auto& m = monomials(degree);
  Eigen::MatrixXd g(m.size(), 2);
  for (size_t i = 0; i < m.size(); ++i) {
    const int a = m[i][0], b = m[i][1];
    g(i, 0) = a == 0 ? 0.0 : a * ipow(p.x(), a - 1) * ipow(p.y(), b);
    g(i, 1) = b == 0 ? 0.0 : b * ipow(p.x(), a) * ipow(p.y(), b - 1);
  }
  return g;
}

// Bernstein basis of degree k on barycentric coordinates; numerically stable
// where the monomial basis is not (all terms nonnegative inside the triangle)
struct BernsteinBasis {
  int k;
  std::vector<std::array<int, 3>> exps;  // (i,j,l) with i+j+l = k
  std::vector<double> scale;             // multinomial coefficients

  explicit BernsteinBasis(int k_) : k(k_) {
    for (int i = k; i >= 0; --i)
      for (int j = k - i; j >= 0; --j) {
        const int l = k - i - j;
        double c = 1.0;
        for (int p = 1; p <= k; ++p) c *= p;
        for (int p = 1; p <= i; ++p) c /= p;
        for (int p = 1; p <= j; ++p) c /= p;
        for (int p = 1; p <= l; ++p) c /= p;
        exps.push_back({i, j, l});
        scale.push_back(c);
      }
  }

  Eigen::VectorXd eval(const Vec2& p) const {
    const double l0 = 1.0 - p.x() - p.y(), l1 = p.x(), l2 = p.y();
    Eigen::VectorXd v(exps.size());
    for (size_t m = 0; m < exps.size(); ++m)
      v[m] = scale[m] * ipow(l0, exps[m][0]) * ipow(l1, exps[m][1]) * ipow(l2, exps[m][2]);
    return v;
  }

  Eigen::MatrixXd grad(const Vec2& p) const {
    const double l0 = 1.0 - p.x() - p.y(), l1 = p.x(), l2 = p.y();
    Eigen::MatrixXd g(exps.size(), 2);
    for (size_t m = 0; m < exps.size(); ++m) {
      const int i = exps[m][0], j = exps[m][1], l = exps[m][2];
      const double d0 = i == 0 ? 0.0 : i * ipow(l0, i - 1) * ipow(l1, j) * ipow(l2, l);
      const double d1 = j == 0 ? 0.0 : j * ipow(l0, i) * ipow(l1, j - 1) * ipow(l2, l);
      const double d2 = l == 0 ? 0.0 : l * ipow(l0, i) * ipow(l1, j) * ipow(l2, l - 1);
      g(m, 0) = scale[m] * (d1 - d0);  // dl1/dx = 1, dl0/dx = -1
      g(m, 1) = scale[m] * (d2 - d0);
    }
    return g;
  }
};

const BernsteinBasis& bernstein(int k) {
  static std::map<int, BernsteinBasis> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  return cache.emplace(k, BernsteinBasis(k)).first->second;
}

std::vector<Vec2> lagrange_nodes(int k) {
  std::vector<Vec2> nodes;
  const Vec2 v[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (int i = 0; i < 3; ++i) nodes.push_back(v[i]);
  for (int e = 0; e < 3; ++e) {
    const auto ev = ref_edge_vertices(e);
    for (int j = 1; j < k; ++j)
      nodes.push_back(v[ev[0]] + (double(j) / k) * (v[ev[1]] - v[ev[0]]));
  }
  for (int a = 1; a <= k - 2; ++a)
    for (int b = 1; a + b <= k - 1; ++b) nodes.push_back(Vec2(double(a) / k, double(b) / k));
  return nodes;
}

// Newton refinement of an approximate inverse; recovers accuracy lost to the
// conditioning of the monomial Vandermonde at higher orders
Eigen::MatrixXd refined_inverse(const Eigen::MatrixXd& a) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("basis Vandermonde singular");
  Eigen::MatrixXd inv = lu.inverse();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int it = 0; it < 2; ++it) inv = inv * (2.0 * id - a * inv);
  return inv;
}

LagrangeRef build_lagrange(int k) {
  LagrangeRef ref;
  ref.order = k;
  ref.dim = poly_dim(k);
  ref.nodes = lagrange_nodes(k);
  if (static_cast<int>(ref.nodes.size()) != ref.dim)
    throw std::logic_error("lagrange node count mismatch");
  Eigen::MatrixXd vand(ref.dim, ref.dim);
  for (int j = 0; j < ref.dim; ++j) vand.row(j) = bernstein(k).eval(ref.nodes[j]).transpose();
  ref.coeff = refined_inverse(vand);
  return ref;
}

// span of RT_m: ([monomials_m] 0), (0 [monomials_m]), then x * (homogeneous
// degree m); values and divergence evaluated analytically
struct RTSpan {
  int m;
  int dim_pk;
  int dim;
  explicit RTSpan(int m_) : m(m_), dim_pk(poly_dim(m_)), dim((m_ + 1) * (m_ + 3)) {}

  Eigen::MatrixXd eval(const Vec2& p) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, 2);
    const Eigen::VectorXd mv = mono_eval(m, p);
    for (int s = 0; s < dim_pk; ++s) {
      out(s, 0) = mv[s];
      out(dim_pk + s, 1) = mv[s];
    }
    for (int i = 0; i <= m; ++i) {
      const double h = ipow(p.x(), m - i) * ipow(p.y(), i);
      out(2 * dim_pk + i, 0) = p.x() * h;
      out(2 * dim_pk + i, 1) = p.y() * h;
    }
    return out;
  }

  Eigen::VectorXd eval_div(const Vec2& p) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    const Eigen::MatrixXd mg = mono_grad(m, p);
    for (int s = 0; s < dim_pk; ++s) {
      out[s] = mg(s, 0);
      out[dim_pk + s] = mg(s, 1);
    }
    for (int i = 0; i <= m; ++i)
      out[2 * dim_pk + i] = (m + 2) * ipow(p.x(), m - i) * ipow(p.y(), i);
    return out;
  }
};

RTRef build_rt(int m) {
  RTRef ref;
  ref.order = m;
  ref.dim = (m + 1) * (m + 3);
  ref.n_edge_dofs = m + 1;
  const RTSpan span(m);
  const Vec2 v[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};

  Eigen::MatrixXd vand = Eigen::MatrixXd::Zero(ref.dim, ref.dim);
  const QuadRule& erule = edge_rule(2 * m + 2);
  for (int e = 0; e < 3; ++e) {
    const auto ev = ref_edge_vertices(e);
    const Vec2 tangent = v[ev[1]] - v[ev[0]];
    const double len = tangent.norm();
    const Vec2 n_out(tangent.y() / len, -tangent.x() / len);  // ccw traversal -> outward
    for (int q = 0; q < erule.size(); ++q) {
      const double t = erule.t(q);
      const Vec2 p = v[ev[0]] + t * tangent;
      const Eigen::VectorXd flux = span.eval(p) * Eigen::Vector2d(n_out);
      for (int i = 0; i <= m; ++i)
        vand.row(e * (m + 1) + i) += erule.weights[q] * len * shifted_legendre(i, t) * flux.transpose();
    }
  }
  const int n_int = m * (m + 1) / 2;  // per component
  if (m > 0) {
    const QuadRule& trule = triangle_rule(2 * m + 2);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 p(trule.x(q), trule.y(q));
      const Eigen::MatrixXd sv = span.eval(p);
      const Eigen::VectorXd mv = mono_eval(m - 1, p);
      for (int b = 0; b < n_int; ++b) {
        vand.row(3 * (m + 1) + b) += trule.weights[q] * mv[b] * sv.col(0).transpose();
        vand.row(3 * (m + 1) + n_int + b) += trule.weights[q] * mv[b] * sv.col(1).transpose();
      }
    }
  }
  ref.coeff = refined_inverse(vand);
  return ref;
}

}  // namespace

Eigen::VectorXd LagrangeRef::eval(const Vec2& p) const {
  return coeff.transpose() * bernstein(order).eval(p);
}

Eigen::MatrixXd LagrangeRef::eval_grad(const Vec2& p) const {
  return coeff.transpose() * bernstein(order).grad(p);
}

double LagrangeRef::node_bary(int j, int v) const {
  const Vec2& p = nodes[j];
  switch (v) {
    case 0: return 1.0 - p.x() - p.y();
    case 1: return p.x();
    default: return p.y();
  }
}

namespace {
std::mutex table_mtx;

template <typename Ref, typename Fill>
const Eigen::MatrixXd& table_at(const Ref& ref, const QuadRule& rule, int slot, Fill fill) {
  std::lock_guard<std::mutex> lock(table_mtx);
  if (rule.degree >= static_cast<int>(ref.tables_.size())) ref.tables_.resize(rule.degree + 1);
  Eigen::MatrixXd& tab = ref.tables_[rule.degree][slot];
  if (tab.size() == 0) {
    tab.resize(rule.size(), ref.dim);
    for (int q = 0; q < rule.size(); ++q) fill(tab, q, Vec2(rule.x(q), rule.y(q)));
  }
  return tab;
}
}  // namespace

const Eigen::MatrixXd& LagrangeRef::values_at(const QuadRule& rule) const {
  return table_at(*this, rule, 0,
                  [this](Eigen::MatrixXd& t, int q, const Vec2& p) { t.row(q) = eval(p).transpose(); });
}
const Eigen::MatrixXd& LagrangeRef::grad_x_at(const QuadRule& rule) const {
  return table_at(*this, rule, 1, [this](Eigen::MatrixXd& t, int q, const Vec2& p) {
    t.row(q) = eval_grad(p).col(0).transpose();
  });
}
const Eigen::MatrixXd& LagrangeRef::grad_y_at(const QuadRule& rule) const {
  return table_at(*this, rule, 2, [this](Eigen::MatrixXd& t, int q, const Vec2& p) {
    t.row(q) = eval_grad(p).col(1).transpose();
  });
}

Eigen::MatrixXd RTRef::eval(const Vec2& p) const {
  return coeff.transpose() * RTSpan(order).eval(p);
}

Eigen::VectorXd RTRef::eval_div(const Vec2& p) const {
  return coeff.transpose() * RTSpan(order).eval_div(p);
}

const Eigen::MatrixXd& RTRef::values_x_at(const QuadRule& rule) const {
  return table_at(*this, rule, 0,
                  [this](Eigen::MatrixXd& t, int q, const Vec2& p) { t.row(q) = eval(p).col(0).transpose(); });
}
const Eigen::MatrixXd& RTRef::values_y_at(const QuadRule& rule) const {
  return table_at(*this, rule, 1,
                  [this](Eigen::MatrixXd& t, int q, const Vec2& p) { t.row(q) = eval(p).col(1).transpose(); });
}
const Eigen::MatrixXd& RTRef::div_at(const QuadRule& rule) const {
  return table_at(*this, rule, 2,
                  [this](Eigen::MatrixXd& t, int q, const Vec2& p) { t.row(q) = eval_div(p).transpose(); });
}

const LagrangeRef& lagrange_ref(int k) {
  if (k < 1 || k > 8) throw std::runtime_error("lagrange_ref: order out of range");
  static std::vector<std::unique_ptr<LagrangeRef>> store(9);
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (!store[k]) store[k] = std::make_unique<LagrangeRef>(build_lagrange(k));
  return *store[k];
}

const RTRef& rt_ref(int m) {
  if (m < 0 || m > 6) throw std::runtime_error("rt_ref: order out of range");
  static std::vector<std::unique_ptr<RTRef>> store(7);
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (!store[m]) store[m] = std::make_unique<RTRef>(build_rt(m));
  return *store[m];
}

}  // namespace stokesrec
