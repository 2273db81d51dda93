#include "stokesrec/spaces.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace stokesrec {

namespace {

// dof layout of continuous Lagrange: vertices, then (k-1) per edge ordered
// along the global lo->hi direction, then cell interiors
int lagrange_local_to_global(const Mesh& mesh, int k, int cell, int l) {
  const int nv = mesh.n_vertices();
  const int per_edge = k - 1;
  if (l < 3) return mesh.cells[cell][l];
  if (l < 3 + 3 * per_edge) {
    const int le = (l - 3) / per_edge;
    const int jj = (l - 3) % per_edge;
    const int e = mesh.cell_edges[cell][le];
    const int slot = mesh.cell_edge_aligned[cell][le] ? jj : per_edge - 1 - jj;
    return nv + e * per_edge + slot;
  }
  const int n_int = poly_dim(k) - 3 - 3 * per_edge;
  const int li = l - 3 - 3 * per_edge;
  return nv + mesh.n_edges() * per_edge + cell * n_int + li;
}

}  // namespace

FeSpace lagrange_space(const Mesh& mesh, int k, bool continuous) {
  if (k < 1 || k > 6) throw std::runtime_error("lagrange_space: order out of range");
  FeSpace sp;
  sp.kind = continuous ? SpaceKind::LagrangeContinuous : SpaceKind::LagrangeDiscontinuous;
  sp.order = k;
  sp.mesh = &mesh;
  sp.local_dim = poly_dim(k);
  sp.dof_map.resize(mesh.n_cells() * sp.local_dim);
  sp.dof_sign.assign(mesh.n_cells() * sp.local_dim, 1.0);
  if (continuous) {
    const int n_int = sp.local_dim - 3 - 3 * (k - 1);
    sp.n_dofs = mesh.n_vertices() + mesh.n_edges() * (k - 1) + mesh.n_cells() * n_int;
    for (int t = 0; t < mesh.n_cells(); ++t)
      for (int l = 0; l < sp.local_dim; ++l)
        sp.dof_map[t * sp.local_dim + l] = lagrange_local_to_global(mesh, k, t, l);
    std::vector<char> on_boundary(sp.n_dofs, 0);
    for (int v = 0; v < mesh.n_vertices(); ++v)
      if (mesh.boundary_vertex[v]) on_boundary[v] = 1;
    for (int e = 0; e < mesh.n_edges(); ++e)
      if (mesh.boundary_edge[e])
        for (int j = 0; j < k - 1; ++j) on_boundary[mesh.n_vertices() + e * (k - 1) + j] = 1;
    for (int d = 0; d < sp.n_dofs; ++d)
      if (on_boundary[d]) sp.boundary_dofs.push_back(d);
  } else {
    sp.n_dofs = mesh.n_cells() * sp.local_dim;
    for (int i = 0; i < sp.n_dofs; ++i) sp.dof_map[i] = i;
  }
  return sp;
}

FeSpace mini_space(const Mesh& mesh, int k) {
  if (k < 1 || k > 4) throw std::runtime_error("mini_space: order out of range");
  FeSpace lag = lagrange_space(mesh, k, true);
  FeSpace sp;
  sp.kind = SpaceKind::MiniVelocity;
  sp.order = k;
  sp.mesh = &mesh;
  const int n_bub = poly_dim(k - 1);  // dim(P^{k+2} cap H^1_0(T))
  sp.local_dim = lag.local_dim + n_bub;
  sp.n_dofs = lag.n_dofs + mesh.n_cells() * n_bub;
  sp.dof_map.resize(mesh.n_cells() * sp.local_dim);
  sp.dof_sign.assign(mesh.n_cells() * sp.local_dim, 1.0);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int l = 0; l < lag.local_dim; ++l)
      sp.dof_map[t * sp.local_dim + l] = lag.dof(t, l);
    for (int b = 0; b < n_bub; ++b)
      sp.dof_map[t * sp.local_dim + lag.local_dim + b] = lag.n_dofs + t * n_bub + b;
  }
  sp.boundary_dofs = lag.boundary_dofs;  // bubbles vanish on cell boundaries
  return sp;
}

FeSpace rt_space(const Mesh& mesh, int m, const std::vector<int>& zero_normal_edges) {
  if (m < 0 || m > 5) throw std::runtime_error("rt_space: order out of range");
  FeSpace sp;
  sp.kind = SpaceKind::RaviartThomas;
  sp.order = m;
  sp.mesh = &mesh;
  sp.local_dim = (m + 1) * (m + 3);
  const int per_edge = m + 1;
  const int per_cell = m * (m + 1);
  const int n_full = mesh.n_edges() * per_edge + mesh.n_cells() * per_cell;

  std::vector<int> renumber(n_full);
  std::vector<char> removed(n_full, 0);
  for (int e : zero_normal_edges)
    for (int i = 0; i < per_edge; ++i) removed[e * per_edge + i] = 1;
  int next = 0;
  for (int d = 0; d < n_full; ++d) renumber[d] = removed[d] ? -1 : next++;
  sp.n_dofs = next;

  sp.dof_map.resize(mesh.n_cells() * sp.local_dim);
  sp.dof_sign.assign(mesh.n_cells() * sp.local_dim, 1.0);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.cell_edges[t][le];
      const bool aligned = mesh.cell_edge_aligned[t][le];
      for (int i = 0; i < per_edge; ++i) {
        const int l = le * per_edge + i;
        sp.dof_map[t * sp.local_dim + l] = renumber[e * per_edge + i];
        // under a flipped edge parametrization the moment against the i-th
        // Legendre polynomial picks up (-1)^i, the normal another -1
        sp.dof_sign[t * sp.local_dim + l] = aligned ? 1.0 : ((i % 2 == 0) ? -1.0 : 1.0);
      }
    }
    for (int b = 0; b < per_cell; ++b)
      sp.dof_map[t * sp.local_dim + 3 * per_edge + b] =
          renumber[mesh.n_edges() * per_edge + t * per_cell + b];
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.boundary_edge[e])
      for (int i = 0; i < per_edge; ++i)
        if (renumber[e * per_edge + i] >= 0) sp.boundary_dofs.push_back(renumber[e * per_edge + i]);
  return sp;
}

Eigen::VectorXd MiniRef::eval(const Vec2& p) const {
  Eigen::VectorXd out(dim);
  out.head(lag->dim) = lag->eval(p);
  const double bubble = 27.0 * (1.0 - p.x() - p.y()) * p.x() * p.y();
  const auto& mono = monomials(n_bubbles > 0 ? lag->order - 1 : -1);
  for (int b = 0; b < n_bubbles; ++b) {
    double mv = 1.0;
    for (int i = 0; i < mono[b][0]; ++i) mv *= p.x();
    for (int i = 0; i < mono[b][1]; ++i) mv *= p.y();
    out[lag->dim + b] = bubble * mv;
  }
  return out;
}

Eigen::MatrixXd MiniRef::eval_grad(const Vec2& p) const {
  Eigen::MatrixXd out(dim, 2);
  out.topRows(lag->dim) = lag->eval_grad(p);
  const double x = p.x(), y = p.y();
  const double bubble = 27.0 * (1.0 - x - y) * x * y;
  const double bx = 27.0 * y * (1.0 - 2.0 * x - y);
  const double by = 27.0 * x * (1.0 - x - 2.0 * y);
  const auto& mono = monomials(n_bubbles > 0 ? lag->order - 1 : -1);
  for (int b = 0; b < n_bubbles; ++b) {
    const int a = mono[b][0], c = mono[b][1];
    double mv = 1.0, mdx = 0.0, mdy = 0.0;
    for (int i = 0; i < a; ++i) mv *= x;
    for (int i = 0; i < c; ++i) mv *= y;
    if (a > 0) {
      mdx = a;
      for (int i = 0; i < a - 1; ++i) mdx *= x;
      for (int i = 0; i < c; ++i) mdx *= y;
    }
    if (c > 0) {
      mdy = c;
      for (int i = 0; i < a; ++i) mdy *= x;
      for (int i = 0; i < c - 1; ++i) mdy *= y;
    }
    out(lag->dim + b, 0) = bx * mv + bubble * mdx;
    out(lag->dim + b, 1) = by * mv + bubble * mdy;
  }
  return out;
}

const MiniRef& mini_ref(int k) {
  static std::vector<std::unique_ptr<MiniRef>> store(5);
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (k < 1 || k > 4) throw std::runtime_error("mini_ref: order out of range");
  if (!store[k]) {
    auto ref = std::make_unique<MiniRef>();
    ref->lag = &lagrange_ref(k);
    ref->n_bubbles = poly_dim(k - 1);
    ref->dim = ref->lag->dim + ref->n_bubbles;
    store[k] = std::move(ref);
  }
  return *store[k];
}

Eigen::VectorXd scalar_basis_values(const FeSpace& space, const Vec2& p) {
  if (space.kind == SpaceKind::MiniVelocity) return mini_ref(space.order).eval(p);
  return lagrange_ref(space.order).eval(p);
}

Eigen::MatrixXd scalar_basis_grads(const FeSpace& space, const Vec2& p) {
  if (space.kind == SpaceKind::MiniVelocity) return mini_ref(space.order).eval_grad(p);
  return lagrange_ref(space.order).eval_grad(p);
}

Eigen::VectorXd local_coeffs(const DiscreteFunction& f, int cell) {
  const FeSpace& sp = *f.space;
  Eigen::VectorXd loc(sp.local_dim);
  for (int l = 0; l < sp.local_dim; ++l) {
    const int g = sp.dof(cell, l);
    loc[l] = (g < 0) ? 0.0 : sp.sign(cell, l) * f.coeffs[g];
  }
  return loc;
}

Eigen::MatrixXd evaluate(const DiscreteFunction& f, int cell, const std::vector<Vec2>& ref_points,
                         EvalWhat what) {
  const FeSpace& sp = *f.space;
  const Eigen::VectorXd loc = local_coeffs(f, cell);
  const int np = static_cast<int>(ref_points.size());
  const Eigen::Matrix2d jac = sp.mesh->jacobian(cell);
  const double det = jac.determinant();

  if (sp.kind == SpaceKind::RaviartThomas) {
    const RTRef& ref = rt_ref(sp.order);
    if (what == EvalWhat::Divergence) {
      Eigen::MatrixXd out(np, 1);
      for (int q = 0; q < np; ++q) out(q, 0) = ref.eval_div(ref_points[q]).dot(loc) / det;
      return out;
    }
    if (what != EvalWhat::Value) throw std::runtime_error("evaluate: RT supports value/divergence");
    Eigen::MatrixXd out(np, 2);
    for (int q = 0; q < np; ++q) {
      const Eigen::Vector2d ref_val = ref.eval(ref_points[q]).transpose() * loc;
      out.row(q) = ((1.0 / det) * jac * ref_val).transpose();
    }
    return out;
  }

  if (what == EvalWhat::Value) {
    Eigen::MatrixXd out(np, 1);
    for (int q = 0; q < np; ++q) out(q, 0) = scalar_basis_values(sp, ref_points[q]).dot(loc);
    return out;
  }
  if (what != EvalWhat::Gradient) throw std::runtime_error("evaluate: scalar supports value/gradient");
  const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
  Eigen::MatrixXd out(np, 2);
  for (int q = 0; q < np; ++q) {
    const Eigen::Vector2d ref_grad = scalar_basis_grads(sp, ref_points[q]).transpose() * loc;
    out.row(q) = (jinv_t * ref_grad).transpose();
  }
  return out;
}

DiscreteFunction interpolate(const FeSpace& space, const ScalarField& field) {
  DiscreteFunction f;
  f.space = &space;
  f.coeffs.setZero(space.n_dofs);
  const Mesh& mesh = *space.mesh;
  if (space.kind == SpaceKind::RaviartThomas)
    throw std::runtime_error("interpolate: use interpolate_rt for RT spaces");

  const LagrangeRef& ref = lagrange_ref(space.order);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int l = 0; l < ref.dim; ++l)
      f.coeffs[space.dof(t, l)] = field(mesh.map_to_physical(t, ref.nodes[l]));
    if (space.kind == SpaceKind::MiniVelocity) {
      if (space.order != 1)
        throw std::runtime_error("interpolate: mini interpolation implemented for k=1");
      // bubble coefficient matches the value at the barycenter
      const Vec2 bary(1.0 / 3.0, 1.0 / 3.0);
      double lag_part = 0.0;
      const Eigen::VectorXd vals = ref.eval(bary);
      for (int l = 0; l < ref.dim; ++l)
        lag_part += vals[l] * f.coeffs[space.dof(t, l)];
      f.coeffs[space.dof(t, ref.dim)] = field(mesh.map_to_physical(t, bary)) - lag_part;
    }
  }
  return f;
}

DiscreteFunction interpolate_rt(const FeSpace& space, const VectorField& field, int quad_degree) {
  if (space.kind != SpaceKind::RaviartThomas)
    throw std::runtime_error("interpolate_rt: RT space expected");
  const Mesh& mesh = *space.mesh;
  const int m = space.order;
  DiscreteFunction f;
  f.space = &space;
  f.coeffs.setZero(space.n_dofs);

  // edge moments against shifted Legendre polynomials in the global (lo->hi)
  // parametrization
  const QuadRule& erule = edge_rule(quad_degree);
  const int per_edge = m + 1;
  std::vector<int> edge_dof(mesh.n_edges() * per_edge, -1);
  for (int t = 0; t < mesh.n_cells(); ++t)
    for (int le = 0; le < 3; ++le)
      for (int i = 0; i < per_edge; ++i)
        edge_dof[mesh.cell_edges[t][le] * per_edge + i] = space.dof(t, le * per_edge + i);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec2 a = mesh.vertices[mesh.edges[e][0]];
    const Vec2 b = mesh.vertices[mesh.edges[e][1]];
    const Vec2 tangent = b - a;
    const double len = tangent.norm();
    const Vec2 n(tangent.y() / len, -tangent.x() / len);
    for (int i = 0; i < per_edge; ++i) {
      double moment = 0.0;
      for (int q = 0; q < erule.size(); ++q) {
        const double t = erule.t(q);
        moment += erule.weights[q] * len * field(a + t * tangent).dot(n) * shifted_legendre(i, t);
      }
      const int g = edge_dof[e * per_edge + i];
      if (g >= 0) f.coeffs[g] = moment;
    }
  }

  if (m > 0) {
    const QuadRule& trule = triangle_rule(quad_degree);
    const int n_int = m * (m + 1) / 2;
    for (int t = 0; t < mesh.n_cells(); ++t) {
      const Eigen::Matrix2d jac = mesh.jacobian(t);
      const double det = jac.determinant();
      const Eigen::Matrix2d jinv = jac.inverse();
      Eigen::VectorXd moments = Eigen::VectorXd::Zero(2 * n_int);
      for (int q = 0; q < trule.size(); ++q) {
        const Vec2 ref_p(trule.x(q), trule.y(q));
        const Vec2 sigma_hat = det * jinv * field(mesh.map_to_physical(t, ref_p));
        const Eigen::VectorXd mono = [&] {
          const auto& mlist = monomials(m - 1);
          Eigen::VectorXd v(mlist.size());
          for (size_t b = 0; b < mlist.size(); ++b) {
            double mv = 1.0;
            for (int i = 0; i < mlist[b][0]; ++i) mv *= ref_p.x();
            for (int i = 0; i < mlist[b][1]; ++i) mv *= ref_p.y();
            v[b] = mv;
          }
          return v;
        }();
        moments.head(n_int) += trule.weights[q] * sigma_hat.x() * mono;
        moments.tail(n_int) += trule.weights[q] * sigma_hat.y() * mono;
      }
      for (int b = 0; b < 2 * n_int; ++b) {
        const int g = space.dof(t, 3 * per_edge + b);
        if (g >= 0) f.coeffs[g] = moments[b];
      }
    }
  }
  return f;
}

VectorFunction interpolate_vector(const FeSpace& space, const VectorField& field) {
  VectorFunction v;
  v.space = &space;
  v.coeffs.resize(2 * space.n_dofs);
  const DiscreteFunction fx = interpolate(space, [&](const Vec2& p) { return field(p).x(); });
  const DiscreteFunction fy = interpolate(space, [&](const Vec2& p) { return field(p).y(); });
  v.coeffs.head(space.n_dofs) = fx.coeffs;
  v.coeffs.tail(space.n_dofs) = fy.coeffs;
  return v;
}

}  // namespace stokesrec
