#include "stokesrec/projectors.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "stokesrec/quadrature.hpp"

namespace stokesrec {

namespace {

int vertex_local_index(const Mesh& mesh, int cell, int vertex) {
  for (int i = 0; i < 3; ++i)
    if (mesh.cells[cell][i] == vertex) return i;
  throw std::logic_error("vertex not in cell");
}

// values of the source cell basis at the nodes of the target reference
Eigen::MatrixXd cross_node_values(const FeSpace& src, const LagrangeRef& target_ref) {
  const LagrangeRef& src_ref = lagrange_ref(src.order);
  Eigen::MatrixXd t(target_ref.dim, src_ref.dim);
  for (int l = 0; l < target_ref.dim; ++l)
    t.row(l) = src_ref.eval(target_ref.nodes[l]).transpose();
  return t;
}

}  // namespace

DiscreteFunction oswald(const DiscreteFunction& q_disc, const FeSpace& cont_target) {
  const FeSpace& src = *q_disc.space;
  if (src.kind != SpaceKind::LagrangeDiscontinuous)
    throw std::runtime_error("oswald: discontinuous source expected");
  if (cont_target.kind != SpaceKind::LagrangeContinuous || cont_target.order > src.order)
    throw std::runtime_error("oswald: continuous target of order <= source expected");
  const Mesh& mesh = *src.mesh;
  const LagrangeRef& tref = lagrange_ref(cont_target.order);
  const Eigen::MatrixXd t = cross_node_values(src, tref);

  DiscreteFunction out{&cont_target, Eigen::VectorXd::Zero(cont_target.n_dofs)};
  Eigen::VectorXd count = Eigen::VectorXd::Zero(cont_target.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd vals = t * local_coeffs(q_disc, c);
    for (int l = 0; l < tref.dim; ++l) {
      out.coeffs[cont_target.dof(c, l)] += vals[l];
      count[cont_target.dof(c, l)] += 1.0;
    }
  }
  out.coeffs.array() /= count.array();
  return out;
}

DiscreteFunction embed_discontinuous(const DiscreteFunction& q_cont, const FeSpace& disc_space) {
  const FeSpace& src = *q_cont.space;
  if (disc_space.order < src.order)
    throw std::runtime_error("embed_discontinuous: target order too low");
  const LagrangeRef& dref = lagrange_ref(disc_space.order);
  const LagrangeRef& sref = lagrange_ref(src.order);
  Eigen::MatrixXd t(dref.dim, sref.dim);
  for (int l = 0; l < dref.dim; ++l) t.row(l) = sref.eval(dref.nodes[l]).transpose();

  DiscreteFunction out{&disc_space, Eigen::VectorXd::Zero(disc_space.n_dofs)};
  for (int c = 0; c < src.mesh->n_cells(); ++c) {
    const Eigen::VectorXd vals = t * local_coeffs(q_cont, c);
    for (int l = 0; l < dref.dim; ++l) out.coeffs[disc_space.dof(c, l)] = vals[l];
  }
  return out;
}

DiscreteFunction bubble_project(const VertexPatch& patch, const DiscreteFunction& q_disc) {
  const FeSpace& sp = *q_disc.space;
  if (sp.kind != SpaceKind::LagrangeDiscontinuous)
    throw std::runtime_error("bubble_project: discontinuous source expected");
  const Mesh& mesh = *sp.mesh;
  const LagrangeRef& ref = lagrange_ref(sp.order);
  DiscreteFunction out{&sp, Eigen::VectorXd::Zero(sp.n_dofs)};
  for (int c : patch.cells) {
    const int vloc = vertex_local_index(mesh, c, patch.vertex);
    for (int l = 0; l < ref.dim; ++l)
      out.coeffs[sp.dof(c, l)] = q_disc.coeffs[sp.dof(c, l)] * ref.node_bary(l, vloc);
  }
  return out;
}

Eigen::MatrixXd patch_bubble_oswald_matrix(const VertexPatch& patch, const FeSpace& q_disc,
                                           const FeSpace& cont_target) {
  const Mesh& mesh = *q_disc.mesh;
  const LagrangeRef& sref = lagrange_ref(q_disc.order);
  const LagrangeRef& tref = lagrange_ref(cont_target.order);
  const Eigen::MatrixXd src_at_target = cross_node_values(q_disc, tref);
  Eigen::MatrixXd target_at_src(sref.dim, tref.dim);
  for (int l = 0; l < sref.dim; ++l)
    target_at_src.row(l) = tref.eval(sref.nodes[l]).transpose();

  const int nc = static_cast<int>(patch.cells.size());
  const int nq = nc * sref.dim;

  // patch-local continuous numbering with per-node incidence counts
  std::unordered_map<int, int> cont_local;
  std::vector<double> count;
  for (int c : patch.cells)
    for (int l = 0; l < tref.dim; ++l) {
      const int g = cont_target.dof(c, l);
      if (cont_local.emplace(g, static_cast<int>(cont_local.size())).second) count.push_back(0.0);
      count[cont_local[g]] += 1.0;
    }

  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(cont_local.size(), nq);
  Eigen::MatrixXd embed = Eigen::MatrixXd::Zero(nq, cont_local.size());
  for (int ci = 0; ci < nc; ++ci) {
    const int c = patch.cells[ci];
    for (int l = 0; l < tref.dim; ++l) {
      const int idx = cont_local[cont_target.dof(c, l)];
      avg.block(idx, ci * sref.dim, 1, sref.dim) += src_at_target.row(l) / count[idx];
      embed.col(idx).segment(ci * sref.dim, sref.dim) += target_at_src.col(l);
    }
  }

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(nq, nq) - embed * avg;
  for (int ci = 0; ci < nc; ++ci) {
    const int vloc = vertex_local_index(mesh, patch.cells[ci], patch.vertex);
    for (int l = 0; l < sref.dim; ++l)
      result.row(ci * sref.dim + l) *= sref.node_bary(l, vloc);
  }
  return result;
}

Eigen::MatrixXd KoszulBasis::eval(const Vec2& p) const {
  const Vec2 s = (p - center) / scale;
  const Vec2 rot(-s.y(), s.x());
  const auto& mono = monomials(worder);
  Eigen::MatrixXd out(dim, 2);
  for (int i = 0; i < dim; ++i) {
    double m = 1.0;
    for (int j = 0; j < mono[i][0]; ++j) m *= s.x();
    for (int j = 0; j < mono[i][1]; ++j) m *= s.y();
    out(i, 0) = rot.x() * m;
    out(i, 1) = rot.y() * m;
  }
  return out;
}

KoszulBasis koszul_fields(const Mesh& mesh, const VertexPatch& patch, int worder) {
  KoszulBasis b;
  b.vertex = patch.vertex;
  b.center = mesh.vertices[patch.vertex];
  b.scale = patch.h_v > 0.0 ? patch.h_v : 1.0;
  b.worder = worder;
  b.dim = poly_dim(worder);
  return b;
}

KoszulBasis koszul_basis(const Mesh& mesh, const VertexPatch& patch, int k) {
  if (k < 2) throw std::runtime_error("koszul_basis: k >= 2 expected");
  KoszulBasis b = koszul_fields(mesh, patch, k - 3);
  b.order = k;
  return b;
}

Vec2 PatchPoly::eval(const Vec2& p) const {
  const Vec2 s = (p - center) / scale;
  const auto& mono = monomials(order);
  Vec2 out = Vec2::Zero();
  for (size_t i = 0; i < mono.size(); ++i) {
    double m = 1.0;
    for (int j = 0; j < mono[i][0]; ++j) m *= s.x();
    for (int j = 0; j < mono[i][1]; ++j) m *= s.y();
    out += m * Vec2(coeff(i, 0), coeff(i, 1));
  }
  return out;
}

PatchPoly patch_poly_project(const Mesh& mesh, const VertexPatch& patch,
                             const CellVectorField& g, int m, int quad_degree) {
  PatchPoly poly;
  poly.center = mesh.vertices[patch.vertex];
  poly.scale = patch.h_v > 0.0 ? patch.h_v : 1.0;
  poly.order = m;
  const auto& mono = monomials(m);
  const int dim = poly_dim(m);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, 2);
  const QuadRule& rule = triangle_rule(quad_degree);
  Eigen::VectorXd mv(dim);
  for (int c : patch.cells) {
    const double det = mesh.jacobian(c).determinant();
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 ref(rule.x(q), rule.y(q));
      const Vec2 phys = mesh.map_to_physical(c, ref);
      const Vec2 s = (phys - poly.center) / poly.scale;
      for (int i = 0; i < dim; ++i) {
        double v = 1.0;
        for (int j = 0; j < mono[i][0]; ++j) v *= s.x();
        for (int j = 0; j < mono[i][1]; ++j) v *= s.y();
        mv[i] = v;
      }
      const double w = rule.weights[q] * det;
      gram += w * mv * mv.transpose();
      const Vec2 gv = g(c, ref, phys);
      rhs.col(0) += w * gv.x() * mv;
      rhs.col(1) += w * gv.y() * mv;
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("patch_poly_project: singular Gram matrix on patch of vertex " +
                             std::to_string(patch.vertex));
  poly.coeff = ldlt.solve(rhs);
  return poly;
}

PatchPoly patch_poly_project(const Mesh& mesh, const VertexPatch& patch, const VectorField& g,
                             int m, int quad_degree) {
  return patch_poly_project(
      mesh, patch, [&g](int, const Vec2&, const Vec2& phys) { return g(phys); }, m, quad_degree);
}

KoszulDecompositionReport koszul_decomposition_check(int k) {
  if (k < 2 || k > 6) throw std::runtime_error("koszul_decomposition_check: 2 <= k <= 6");
  KoszulDecompositionReport rep;
  rep.k = k;
  rep.dim_full = 2 * poly_dim(k - 2);
  rep.dim_grad = poly_dim(k - 1) - 1;
  rep.dim_koszul = poly_dim(k - 3);

  const Vec2 center(0.37, 0.41);
  const int nfields = rep.dim_grad + rep.dim_koszul;
  const int npts = 4 * rep.dim_full + 8;
  Eigen::MatrixXd samples(2 * npts, nfields);
  const auto& grad_mono = monomials(k - 1);
  const auto& kos_mono = monomials(k - 3);
  for (int p = 0; p < npts; ++p) {
    // sunflower layout gives well-spread deterministic sample points
    const double r = 0.45 * std::sqrt((p + 0.5) / npts);
    const double x = 0.5 + r * std::cos(2.39996 * p);
    const double y = 0.5 + r * std::sin(2.39996 * p);
    const Vec2 s(x - center.x(), y - center.y());
    int col = 0;
    for (size_t i = 1; i < grad_mono.size(); ++i, ++col) {  // skip the constant
      const int a = grad_mono[i][0], b = grad_mono[i][1];
      samples(2 * p, col) = a == 0 ? 0.0 : a * std::pow(s.x(), a - 1) * std::pow(s.y(), b);
      samples(2 * p + 1, col) = b == 0 ? 0.0 : b * std::pow(s.x(), a) * std::pow(s.y(), b - 1);
    }
    for (size_t i = 0; i < kos_mono.size(); ++i, ++col) {
      const double m = std::pow(s.x(), kos_mono[i][0]) * std::pow(s.y(), kos_mono[i][1]);
      samples(2 * p, col) = -s.y() * m;
      samples(2 * p + 1, col) = s.x() * m;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(samples);
  const double tol = 1e-9 * svd.singularValues()[0];
  rep.rank = static_cast<int>((svd.singularValues().array() > tol).count());
  rep.ok = (rep.dim_grad + rep.dim_koszul == rep.dim_full) && (rep.rank == rep.dim_full);
  return rep;
}

}  // namespace stokesrec
