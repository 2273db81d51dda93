#include "stokesrec/reconstruction.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "stokesrec/assembly.hpp"
#include "stokesrec/quadrature.hpp"

namespace stokesrec {

namespace {

struct PatchIndex {
  std::unordered_map<int, int> rt_local;     // global RT dof -> local sigma index
  std::vector<int> sigma_dofs;               // inverse map
  std::unordered_map<int, int> cell_slot;    // cell id -> position in patch.cells
};

PatchIndex build_patch_index(const Mesh& mesh, const VertexPatch& patch, const FeSpace& rt) {
  PatchIndex idx;
  const int m = rt.order;
  const int per_edge = m + 1;
  const int per_cell = m * (m + 1);
  for (int e : patch.interior_edges)
    for (int i = 0; i < per_edge; ++i) {
      idx.rt_local.emplace(e * per_edge + i, static_cast<int>(idx.sigma_dofs.size()));
      idx.sigma_dofs.push_back(e * per_edge + i);
    }
  for (size_t ci = 0; ci < patch.cells.size(); ++ci) {
    idx.cell_slot.emplace(patch.cells[ci], static_cast<int>(ci));
    for (int b = 0; b < per_cell; ++b) {
      const int g = mesh.n_edges() * per_edge + patch.cells[ci] * per_cell + b;
      idx.rt_local.emplace(g, static_cast<int>(idx.sigma_dofs.size()));
      idx.sigma_dofs.push_back(g);
    }
  }
  return idx;
}

}  // namespace

ReconstructionSpaces make_reconstruction_spaces(const Mesh& mesh, const ElementChoice& element) {
  ReconstructionSpaces s;
  s.rt = rt_space(mesh, rt_order(element));
  s.qdisc = lagrange_space(mesh, local_q_order(element), false);
  s.qcont = lagrange_space(mesh, oswald_order(element), true);
  return s;
}

PatchSystem assemble_patch_system(const Mesh& mesh, const VertexPatch& patch,
                                  const ElementChoice& element,
                                  const ReconstructionSpaces& spaces) {
  PatchSystem sys;
  sys.patch = &patch;
  sys.element = element;
  const int m = rt_order(element);
  const PatchIndex idx = build_patch_index(mesh, patch, spaces.rt);
  const KoszulBasis koszul = koszul_fields(mesh, patch, koszul_order(element));
  const LagrangeRef& qref = lagrange_ref(local_q_order(element));

  sys.n_sigma = static_cast<int>(idx.sigma_dofs.size());
  sys.n_q = static_cast<int>(patch.cells.size()) * qref.dim;
  sys.n_w = koszul.dim;
  sys.sigma_dofs = idx.sigma_dofs;
  sys.bubble_matrix = patch_bubble_oswald_matrix(patch, spaces.qdisc, spaces.qcont);

  const int n = sys.size();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  const int off_q = sys.n_sigma;
  const int off_w = sys.n_sigma + sys.n_q;
  const int off_c = off_w + sys.n_w;

  const QuadRule& rule = triangle_rule(2 * m + 4);
  const RTRef& rtref = rt_ref(m);
  const Eigen::MatrixXd& vx = rtref.values_x_at(rule);
  const Eigen::MatrixXd& vy = rtref.values_y_at(rule);
  const Eigen::MatrixXd& dv = rtref.div_at(rule);
  const Eigen::MatrixXd& qv = qref.values_at(rule);

  const int nq_pts = rule.size();
  for (size_t ci = 0; ci < patch.cells.size(); ++ci) {
    const int t = patch.cells[ci];
    const Eigen::Matrix2d jac = mesh.jacobian(t);
    const double det = jac.determinant();

    // local sigma indices and signs for this cell's RT dofs
    std::vector<int> loc(spaces.rt.local_dim, -1);
    std::vector<double> sgn(spaces.rt.local_dim, 1.0);
    for (int l = 0; l < spaces.rt.local_dim; ++l) {
      const auto it = idx.rt_local.find(spaces.rt.dof(t, l));
      if (it != idx.rt_local.end()) {
        loc[l] = it->second;
        sgn[l] = spaces.rt.sign(t, l);
      }
    }

    // physical RT values (times sqrt of quadrature weight folded in later)
    Eigen::MatrixXd px(nq_pts, spaces.rt.local_dim), py(nq_pts, spaces.rt.local_dim);
    for (int q = 0; q < nq_pts; ++q)
      for (int l = 0; l < spaces.rt.local_dim; ++l) {
        const Eigen::Vector2d v = jac * Eigen::Vector2d(vx(q, l), vy(q, l)) / det;
        px(q, l) = v.x();
        py(q, l) = v.y();
      }

    Eigen::MatrixXd kx(nq_pts, sys.n_w), ky(nq_pts, sys.n_w);
    for (int q = 0; q < nq_pts; ++q) {
      const Vec2 phys = mesh.map_to_physical(t, Vec2(rule.x(q), rule.y(q)));
      const Eigen::MatrixXd kv = koszul.eval(phys);
      for (int r = 0; r < sys.n_w; ++r) {
        kx(q, r) = kv(r, 0);
        ky(q, r) = kv(r, 1);
      }
    }

    Eigen::VectorXd wdet(nq_pts);
    for (int q = 0; q < nq_pts; ++q) wdet[q] = rule.weights[q] * det;

    Eigen::VectorXd wref(nq_pts);
    for (int q = 0; q < nq_pts; ++q) wref[q] = rule.weights[q];

    const Eigen::MatrixXd mass =
        px.transpose() * wdet.asDiagonal() * px + py.transpose() * wdet.asDiagonal() * py;
    // div integrals are det-free: phys div = ref div / det
    const Eigen::MatrixXd bdiv = qv.transpose() * wref.asDiagonal() * dv;
    const Eigen::MatrixXd cw =
        px.transpose() * wdet.asDiagonal() * kx + py.transpose() * wdet.asDiagonal() * ky;
    const Eigen::VectorXd qint = qv.transpose() * wdet;

    for (int i = 0; i < spaces.rt.local_dim; ++i) {
      if (loc[i] < 0) continue;
      for (int j = 0; j < spaces.rt.local_dim; ++j) {
        if (loc[j] < 0) continue;
        mat(loc[i], loc[j]) += sgn[i] * sgn[j] * mass(i, j);
      }
      for (int l = 0; l < qref.dim; ++l) {
        const int lq = off_q + static_cast<int>(ci) * qref.dim + l;
        mat(loc[i], lq) += sgn[i] * bdiv(l, i);  // (div tau, phi)
        mat(lq, loc[i]) += sgn[i] * bdiv(l, i);  // (div sigma, psi)
      }
      for (int r = 0; r < sys.n_w; ++r) {
        mat(loc[i], off_w + r) += sgn[i] * cw(i, r);  // (tau, lambda)
        mat(off_w + r, loc[i]) += sgn[i] * cw(i, r);  // (sigma, mu)
      }
    }
    for (int l = 0; l < qref.dim; ++l) {
      const int lq = off_q + static_cast<int>(ci) * qref.dim + l;
      mat(lq, off_c) += qint[l];  // multiplier of the zero-mean constraint
      mat(off_c, lq) += qint[l];
    }
  }

  sys.lu.compute(mat);
  const Eigen::VectorXd diag = sys.lu.matrixLU().diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  sys.pivot_ratio = dmax > 0.0 ? diag.minCoeff() / dmax : 0.0;
  if (sys.pivot_ratio < 1e-12)
    throw std::runtime_error("assemble_patch_system: singular local system on patch of vertex " +
                             std::to_string(patch.vertex));
  return sys;
}

Eigen::VectorXd patch_rhs(const Mesh& mesh, const PatchSystem& system,
                          const ReconstructionSpaces& spaces, const FeSpace& velocity,
                          const VectorFunction& w) {
  const VertexPatch& patch = *system.patch;
  const LagrangeRef& qref = lagrange_ref(spaces.qdisc.order);
  const QuadRule& rule = triangle_rule(2 * spaces.qdisc.order + 2);
  const Eigen::MatrixXd& qv = qref.values_at(rule);

  Eigen::VectorXd div_moments = Eigen::VectorXd::Zero(system.n_q);
  const DiscreteFunction wx{&velocity, w.component(0)}, wy{&velocity, w.component(1)};
  for (size_t ci = 0; ci < patch.cells.size(); ++ci) {
    const int t = patch.cells[ci];
    const Eigen::Matrix2d jinv_t = mesh.jacobian(t).inverse().transpose();
    const double det = mesh.jacobian(t).determinant();
    const Eigen::VectorXd lx = local_coeffs(wx, t), ly = local_coeffs(wy, t);
    Eigen::VectorXd divw(rule.size());
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::MatrixXd g = scalar_basis_grads(velocity, Vec2(rule.x(q), rule.y(q)));
      double d = 0.0;
      for (int l = 0; l < velocity.local_dim; ++l) {
        const Eigen::Vector2d pg = jinv_t * g.row(l).transpose();
        d += pg.x() * lx[l] + pg.y() * ly[l];
      }
      divw[q] = d;
    }
    Eigen::VectorXd wdet(rule.size());
    for (int q = 0; q < rule.size(); ++q) wdet[q] = rule.weights[q] * det;
    div_moments.segment(ci * qref.dim, qref.dim) = qv.transpose() * (wdet.asDiagonal() * divw);
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.size());
  rhs.segment(system.n_sigma, system.n_q) = system.bubble_matrix.transpose() * div_moments;
  return rhs;
}

Eigen::VectorXd solve_patch(const PatchSystem& system, const Eigen::VectorXd& rhs) {
  const Eigen::VectorXd sol = system.lu.solve(rhs);
  return sol.head(system.n_sigma);
}

ReconstructionMap build_reconstruction(const Mesh& mesh, const std::vector<VertexPatch>& patches,
                                       const FeSpace& velocity, const ElementChoice& element) {
  ReconstructionMap map;
  map.element = element;
  map.velocity = &velocity;
  map.spaces = make_reconstruction_spaces(mesh, element);
  const int ns = velocity.n_dofs;
  const LagrangeRef& qref = lagrange_ref(map.spaces.qdisc.order);
  const QuadRule& rule = triangle_rule(2 * map.spaces.qdisc.order + 2);
  const Eigen::MatrixXd& qv = qref.values_at(rule);

  std::vector<Eigen::Triplet<double>> trips;
  for (const VertexPatch& patch : patches) {
    PatchSystem sys = assemble_patch_system(mesh, patch, element, map.spaces);
    map.diagnostics.push_back(
        {patch.vertex, sys.n_sigma, sys.n_q, sys.n_w, sys.size(), sys.pivot_ratio});

    // local velocity dofs supported on the patch, both components
    std::unordered_map<int, int> vel_local;
    std::vector<int> vel_dofs;
    for (int t : patch.cells)
      for (int l = 0; l < velocity.local_dim; ++l)
        if (vel_local.emplace(velocity.dof(t, l), static_cast<int>(vel_dofs.size())).second)
          vel_dofs.push_back(velocity.dof(t, l));
    const int nv = static_cast<int>(vel_dofs.size());

    // moments (div phi_j e_c, psi_l) over the patch
    Eigen::MatrixXd dmom = Eigen::MatrixXd::Zero(sys.n_q, 2 * nv);
    for (size_t ci = 0; ci < patch.cells.size(); ++ci) {
      const int t = patch.cells[ci];
      const Eigen::Matrix2d jinv_t = mesh.jacobian(t).inverse().transpose();
      const double det = mesh.jacobian(t).determinant();
      Eigen::MatrixXd gx(rule.size(), velocity.local_dim), gy(rule.size(), velocity.local_dim);
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::MatrixXd g = scalar_basis_grads(velocity, Vec2(rule.x(q), rule.y(q)));
        for (int l = 0; l < velocity.local_dim; ++l) {
          const Eigen::Vector2d pg = jinv_t * g.row(l).transpose();
          gx(q, l) = pg.x();
          gy(q, l) = pg.y();
        }
      }
      Eigen::VectorXd wdet(rule.size());
      for (int q = 0; q < rule.size(); ++q) wdet[q] = rule.weights[q] * det;
      const Eigen::MatrixXd mx = qv.transpose() * wdet.asDiagonal() * gx;
      const Eigen::MatrixXd my = qv.transpose() * wdet.asDiagonal() * gy;
      for (int l = 0; l < velocity.local_dim; ++l) {
        const int col = vel_local[velocity.dof(t, l)];
        dmom.block(ci * qref.dim, col, qref.dim, 1) += mx.col(l);
        dmom.block(ci * qref.dim, nv + col, qref.dim, 1) += my.col(l);
      }
    }

    Eigen::MatrixXd full_rhs = Eigen::MatrixXd::Zero(sys.size(), 2 * nv);
    full_rhs.middleRows(sys.n_sigma, sys.n_q) = sys.bubble_matrix.transpose() * dmom;
    const Eigen::MatrixXd sol = sys.lu.solve(full_rhs);
    for (int i = 0; i < sys.n_sigma; ++i)
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < nv; ++j) {
          const double v = sol(i, c * nv + j);
          if (v != 0.0) trips.emplace_back(sys.sigma_dofs[i], c * ns + vel_dofs[j], v);
        }
  }
  map.R.resize(map.spaces.rt.n_dofs, 2 * ns);
  map.R.setFromTriplets(trips.begin(), trips.end());
  return map;
}

Eigen::VectorXd sigma_of(const ReconstructionMap& map, const VectorFunction& w) {
  return map.R * w.coeffs;
}

DiscreteFunction reconstructed_divergence(const ReconstructionMap& map, const VectorFunction& w) {
  const Mesh& mesh = *map.velocity->mesh;
  const FeSpace& qdisc = map.spaces.qdisc;
  const LagrangeRef& qref = lagrange_ref(qdisc.order);
  const DiscreteFunction sigma{&map.spaces.rt, sigma_of(map, w)};
  const DiscreteFunction wx{map.velocity, w.component(0)}, wy{map.velocity, w.component(1)};
  const RTRef& rtref = rt_ref(map.spaces.rt.order);

  DiscreteFunction out{&qdisc, Eigen::VectorXd::Zero(qdisc.n_dofs)};
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const Eigen::Matrix2d jac = mesh.jacobian(t);
    const double det = jac.determinant();
    const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
    const Eigen::VectorXd lx = local_coeffs(wx, t), ly = local_coeffs(wy, t);
    const Eigen::VectorXd ls = local_coeffs(sigma, t);
    for (int l = 0; l < qref.dim; ++l) {
      const Vec2 node = qref.nodes[l];
      const Eigen::MatrixXd g = scalar_basis_grads(*map.velocity, node);
      double d = 0.0;
      for (int j = 0; j < map.velocity->local_dim; ++j) {
        const Eigen::Vector2d pg = jinv_t * g.row(j).transpose();
        d += pg.x() * lx[j] + pg.y() * ly[j];
      }
      d -= rtref.eval_div(node).dot(ls) / det;
      out.coeffs[qdisc.dof(t, l)] = d;
    }
  }
  return out;
}

Eigen::VectorXd reconstructed_load(const ReconstructionMap& map, const VectorField& f,
                                   int quad_degree) {
  const Eigen::VectorXd standard = assemble_load(*map.velocity, f, quad_degree);
  const Eigen::VectorXd f_rt = assemble_rt_load(map.spaces.rt, f, quad_degree);
  return standard - map.R.transpose() * f_rt;
}

double data_oscillation(const Mesh& mesh, const std::vector<VertexPatch>& patches,
                        const VectorField& g, int m, int quad_degree) {
  const QuadRule& rule = triangle_rule(quad_degree);
  double total = 0.0;
  for (const VertexPatch& patch : patches) {
    const PatchPoly poly = patch_poly_project(mesh, patch, g, m, quad_degree);
    double patch_err = 0.0;
    for (int t : patch.cells) {
      const double det = mesh.jacobian(t).determinant();
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 phys = mesh.map_to_physical(t, Vec2(rule.x(q), rule.y(q)));
        patch_err += rule.weights[q] * det * (g(phys) - poly.eval(phys)).squaredNorm();
      }
    }
    total += patch.h_v * patch.h_v * patch_err;
  }
  return std::sqrt(total);
}

}  // namespace stokesrec
