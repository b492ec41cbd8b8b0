#include "hpmg/localops.hpp"

#include "hpmg/errors.hpp"

#include <cmath>
#include <sstream>

namespace hpmg {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Digit a of a tensor index with n1 entries per axis.
std::size_t digit(std::size_t i, std::size_t n1, int a) {
  for (int k = 0; k < a; ++k) i /= n1;
  return i % n1;
}

std::vector<int> tangential_axes(int dim, int axis) {
  std::vector<int> t;
  for (int b = 0; b < dim; ++b)
    if (b != axis) t.push_back(b);
  return t;
}

// (j, i) -> normal[i_axis] * prod_k tang[j_k][i_{t_k}]
Matrix facet_cell_block(int dim, std::size_t n1, int axis, const std::vector<double>& normal,
                        const Matrix& tang) {
  const std::size_t n = ipow(n1, dim);
  const std::size_t nf = ipow(n1, dim - 1);
  const auto tan = tangential_axes(dim, axis);
  Matrix b(nf, n);
  for (std::size_t j = 0; j < nf; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double v = normal[digit(i, n1, axis)];
      for (std::size_t k = 0; k < tan.size(); ++k) v *= tang(digit(j, n1, static_cast<int>(k)), digit(i, n1, tan[k]));
      b(j, i) = v;
    }
  return b;
}

// Acc from the physical 1D mass and stiffness matrices.
Matrix volume_block(int dim, const Matrix& m1, const Matrix& k1) {
  const std::size_t n1 = m1.rows();
  const std::size_t n = ipow(n1, dim);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (int ax = 0; ax < dim; ++ax) {
        double t = 1.0;
        for (int b = 0; b < dim; ++b) {
          const std::size_t ib = digit(i, n1, b);
          const std::size_t jb = digit(j, n1, b);
          t *= (b == ax) ? k1(ib, jb) : m1(ib, jb);
        }
        s += t;
      }
      a(i, j) = s;
    }
  return a;
}

// Interior-cell face term Σ_F Acf·Aff_own·Afc.
Matrix face_sum(const LocalBlocks& b, unsigned boundary_mask) {
  Matrix s(b.cell_dofs, b.cell_dofs);
  for (int face = 0; face < b.faces(); ++face) {
    const bool bnd = (boundary_mask >> face) & 1u;
    const double own = bnd ? 1.0 : 0.5;
    s += own * (b.lifting(face, bnd) * b.projection(face, bnd));
  }
  return s;
}

Matrix flux_matrix(std::size_t nf, bool boundary) {
  Matrix a(2 * nf, 4 * nf);
  for (std::size_t k = 0; k < 2 * nf; ++k) {
    a(k, k) = boundary ? 1.0 : 0.5;
    if (!boundary) a(k, 2 * nf + k) = 0.5;
  }
  return a;
}

} // namespace

FaceRole face_role(int face, bool boundary) {
  FaceRole r{};
  r.axis = face / 2;
  r.side = face % 2;
  r.boundary = boundary;
  r.outward_sign = r.side == 1 ? 1 : -1;
  r.minus = r.side == 1 || boundary;
  r.normal_sign = boundary ? r.outward_sign : 1;
  r.sigma = r.minus ? -1.0 : 1.0;
  return r;
}

double penalty_parameter(int p, double h, double penalty_const) {
  return penalty_const * (p + 1.0) * (p + 1.0) / h;
}

LocalBlocks build_local_blocks(const NodalBasis1D& basis, int dim, double h, double theta, double penalty_const) {
  if (dim != 2 && dim != 3) throw InvalidArgument("build_local_blocks: dim must be 2 or 3");
  if (!(h > 0.0)) throw InvalidArgument("build_local_blocks: h must be positive");
  if (!(penalty_const > 0.0)) throw InvalidArgument("build_local_blocks: penalty constant must be positive");

  const Ref1DMatrices r = ref_matrices(basis);
  const auto n1 = static_cast<std::size_t>(basis.size());
  LocalBlocks b;
  b.dim = dim;
  b.degree = basis.degree();
  b.kind = basis.kind();
  b.h = h;
  b.theta = theta;
  b.penalty_const = penalty_const;
  b.gamma = penalty_parameter(basis.degree(), h, penalty_const);
  b.cell_dofs = ipow(n1, dim);
  b.facet_dofs = ipow(n1, dim - 1);

  const Matrix m1 = h * r.mass;
  const Matrix k1 = (1.0 / h) * r.stiffness;
  b.acc = volume_block(dim, m1, k1);

  // Facet mass inverse folded into the projection (tangential factor M^-1 M).
  const Matrix tang_proj = invert(m1) * m1;
  const std::size_t nf = b.facet_dofs;
  const std::size_t n = b.cell_dofs;

  b.afc.resize(static_cast<std::size_t>(4 * dim));
  b.acf.resize(static_cast<std::size_t>(4 * dim));
  for (int face = 0; face < 2 * dim; ++face) {
    for (int bnd = 0; bnd < 2; ++bnd) {
      const FaceRole role = face_role(face, bnd == 1);
      const auto& e = role.side == 1 ? r.e1 : r.e0;
      const auto& g = role.side == 1 ? r.g1 : r.g0;
      const double val_sign = role.minus ? 1.0 : -1.0;

      std::vector<double> val(n1), der(n1), w_col(n1), wd_col(n1);
      for (std::size_t i = 0; i < n1; ++i) {
        val[i] = val_sign * e[i];
        der[i] = role.normal_sign * g[i] / h;
        w_col[i] = role.sigma * (-theta * role.outward_sign * g[i] / h - b.gamma * e[i]);
        wd_col[i] = role.sigma * e[i];
      }
      const Matrix pv = facet_cell_block(dim, n1, role.axis, val, tang_proj);
      const Matrix pd = facet_cell_block(dim, n1, role.axis, der, tang_proj);
      const Matrix lw = facet_cell_block(dim, n1, role.axis, w_col, m1);
      const Matrix ld = facet_cell_block(dim, n1, role.axis, wd_col, m1);

      Matrix proj(2 * nf, n);
      Matrix lift(n, 2 * nf);
      for (std::size_t j = 0; j < nf; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          proj(j, i) = pv(j, i);
          proj(nf + j, i) = pd(j, i);
          lift(i, j) = lw(j, i);
          lift(i, nf + j) = ld(j, i);
        }
      const int v = face_variant(face, bnd == 1);
      b.afc[v] = std::move(proj);
      b.acf[v] = std::move(lift);
    }
  }
  b.aff_interior = flux_matrix(nf, false);
  b.aff_boundary = flux_matrix(nf, true);
  b.schur = b.acc + face_sum(b, 0u);
  b.schur_inverse = invert(b.schur);
  return b;
}

void apply_flux(std::span<const double> minus, std::span<const double> plus, bool boundary, std::span<double> out) {
  if (boundary) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = minus[k];
  } else {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (minus[k] + plus[k]);
  }
}

Matrix cell_matrix(const LocalBlocks& blocks, unsigned boundary_mask) {
  return blocks.acc + face_sum(blocks, boundary_mask);
}

Matrix neighbour_block(const LocalBlocks& blocks, int face) {
  const int opposite = face ^ 1;
  return 0.5 * (blocks.lifting(face, false) * blocks.projection(opposite, false));
}

ReferenceBlocks build_reference_blocks(const NodalBasis1D& basis, int dim, double theta, double penalty_const) {
  ReferenceBlocks ref;
  ref.unit = build_local_blocks(basis, dim, 1.0, theta, penalty_const);
  ref.volume = ref.unit.acc;
  ref.face = face_sum(ref.unit, 0u);
  ref.volume_power = dim - 2;
  ref.face_power = dim - 2;
  return ref;
}

LocalBlocks scale_blocks(const ReferenceBlocks& ref, double h) {
  if (!(h > 0.0)) throw InvalidArgument("scale_blocks: h must be positive");
  LocalBlocks b = ref.unit;
  const int d = b.dim;
  const std::size_t nf = b.facet_dofs;
  b.h = h;
  b.gamma = penalty_parameter(b.degree, h, b.penalty_const);
  b.acc *= std::pow(h, d - 2);
  const double s_der = 1.0 / h;
  const double s_w = std::pow(h, d - 2);
  const double s_wd = std::pow(h, d - 1);
  for (auto& p : b.afc)
    for (std::size_t j = nf; j < 2 * nf; ++j)
      for (double& v : p.row(j)) v *= s_der;
  for (auto& l : b.acf)
    for (std::size_t i = 0; i < l.rows(); ++i) {
      auto row = l.row(i);
      for (std::size_t j = 0; j < nf; ++j) row[j] *= s_w;
      for (std::size_t j = nf; j < 2 * nf; ++j) row[j] *= s_wd;
    }
  b.schur = assemble_schur(ref, h);
  b.schur_inverse = invert(b.schur);
  return b;
}

Matrix assemble_schur(const ReferenceBlocks& ref, double h) {
  return std::pow(h, ref.volume_power) * ref.volume + std::pow(h, ref.face_power) * ref.face;
}

CoarseOps build_coarse_ops(const NodalBasis1D& basis, int dim, double h) {
  if (!(h > 0.0)) throw InvalidArgument("build_coarse_ops: h must be positive");
  const Ref1DMatrices q1 = ref_matrices(make_basis(NodeKind::GaussLobatto, 1));
  CoarseOps ops;
  ops.dim = dim;
  ops.h = h;
  ops.element_stiffness = volume_block(dim, h * q1.mass, (1.0 / h) * q1.stiffness);

  const auto n1 = static_cast<std::size_t>(basis.size());
  const std::size_t n = ipow(n1, dim);
  const std::size_t corners = ipow(2, dim);
  ops.prolongation = Matrix(n, corners);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < corners; ++c) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a) {
        const double x = basis.nodes()[digit(i, n1, a)];
        v *= ((c >> a) & 1u) ? x : 1.0 - x;
      }
      ops.prolongation(i, c) = v;
    }
  return ops;
}

std::int64_t memory_access_model(AccessAlgorithm alg, int dim, int p) {
  if (p < 1) throw InvalidArgument("memory_access_model: p must be >= 1");
  if (dim != 2 && dim != 3) throw InvalidArgument("memory_access_model: dim must be 2 or 3");
  const auto cell = static_cast<std::int64_t>(ipow(static_cast<std::size_t>(p + 1), dim));
  const auto facet = static_cast<std::int64_t>(ipow(static_cast<std::size_t>(p + 1), dim - 1));
  switch (alg) {
  case AccessAlgorithm::Vanilla: return (2 * dim + 5) * cell;
  case AccessAlgorithm::AuxiliaryFacets: return 3 * cell + 7 * dim * facet;
  case AccessAlgorithm::AuxiliaryFacetsStandalone: return 5 * cell + 7 * dim * facet;
  }
  return 0;
}

std::string blocks_csv(const LocalBlocks& blocks) {
  std::ostringstream os;
  os << "# acc\n";
  write_csv(os, blocks.acc);
  for (int face = 0; face < blocks.faces(); ++face)
    for (int bnd = 0; bnd < 2; ++bnd) {
      os << "# afc face=" << face << " boundary=" << bnd << '\n';
      write_csv(os, blocks.projection(face, bnd == 1));
      os << "# acf face=" << face << " boundary=" << bnd << '\n';
      write_csv(os, blocks.lifting(face, bnd == 1));
    }
  os << "# schur\n";
  write_csv(os, blocks.schur);
  os << "# schur_inverse\n";
  write_csv(os, blocks.schur_inverse);
  return os.str();
}

} // namespace hpmg
