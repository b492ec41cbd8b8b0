#pragma once

/// \file localops.hpp
/// Per-entity operator blocks of the facet-augmented interior-penalty system
///
///   [ Acc  Acf ] [u]   [b]
///   [ Afc  -I  ] [ũ] = [0],   w = Aff ũ,
///
/// the Schur block S = Acc + Σ_F Acf·Aff·Afc with its inverse, the bilinear
/// CG operators used for p-coarsening, and the memory-access model.
///
/// Facet data per side is a record [value (nf), normal derivative (nf)] with
/// nf = (p+1)^(d-1) nodes ordered over the tangential axes (ascending, first
/// fastest). Projections use ũ⁻ = u⁻, ũ⁺ = -u⁺ and ũ'^± = ∇u^±·n_F, so the
/// averaged flux carries w = ½⟦u⟧ and w' = {∇u·n_F}.
///
/// Blocks depend on the local face (2*axis + side) and on whether that face
/// is on the domain boundary; a `variant` index 2*face + boundary selects them.

#include "hpmg/basis.hpp"
#include "hpmg/dense.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hpmg {

inline constexpr double kDefaultTheta = 1.0;
inline constexpr double kDefaultPenalty = 2.0;

constexpr int face_variant(int face, bool boundary) { return 2 * face + (boundary ? 1 : 0); }

/// How a cell sees one of its faces.
struct FaceRole {
  int axis;
  int side;          ///< 0 lower, 1 upper
  bool boundary;
  bool minus;        ///< cell is K⁻ of the facet
  int normal_sign;   ///< n_F = normal_sign * e_axis
  int outward_sign;  ///< cell outward normal = outward_sign * e_axis
  double sigma;      ///< -1 for K⁻, +1 for K⁺
};

FaceRole face_role(int face, bool boundary);

/// Penalty γ̄ = penalty_const (p+1)^2 / h.
double penalty_parameter(int p, double h, double penalty_const);

struct LocalBlocks {
  int dim = 2;
  int degree = 1;
  NodeKind kind = NodeKind::GaussLobatto;
  double h = 1.0;
  double theta = kDefaultTheta;
  double penalty_const = kDefaultPenalty;
  double gamma = 0.0; ///< γ̄
  std::size_t cell_dofs = 0;
  std::size_t facet_dofs = 0;

  Matrix acc;              ///< cell_dofs x cell_dofs
  std::vector<Matrix> afc; ///< per variant, (2 nf) x cell_dofs: [value rows; derivative rows]
  std::vector<Matrix> acf; ///< per variant, cell_dofs x (2 nf): [w cols, w' cols]
  Matrix aff_interior;     ///< (2 nf) x (4 nf) acting on [ũ⁻, ũ'⁻, ũ⁺, ũ'⁺]
  Matrix aff_boundary;     ///< same layout, ⁺ columns zero
  Matrix schur;            ///< S of a cell with all faces interior
  Matrix schur_inverse;

  const Matrix& projection(int face, bool boundary) const { return afc[face_variant(face, boundary)]; }
  const Matrix& lifting(int face, bool boundary) const { return acf[face_variant(face, boundary)]; }
  int faces() const { return 2 * dim; }
};

/// Direct assembly at cell size h from tensor products of the 1D matrices.
/// Throws AssemblyError when S is singular.
LocalBlocks build_local_blocks(const NodalBasis1D& basis, int dim, double h,
                               double theta = kDefaultTheta, double penalty_const = kDefaultPenalty);

/// Numerical flux from the two side records (each 2 nf long: value, derivative).
void apply_flux(std::span<const double> minus, std::span<const double> plus, bool boundary,
                std::span<double> out);

/// Exact diagonal block A_{K←K} of a cell whose boundary faces are flagged in
/// `boundary_mask` (bit `face`).
Matrix cell_matrix(const LocalBlocks& blocks, unsigned boundary_mask);

/// Coupling A_{K←K'} to the neighbour across interior local face `face` of K.
Matrix neighbour_block(const LocalBlocks& blocks, int face);

/// Blocks built once at h = 1 plus the split S(h) = h^qv B_vol + h^qf B_face.
struct ReferenceBlocks {
  LocalBlocks unit;
  Matrix volume;
  Matrix face;
  int volume_power = 0;
  int face_power = 0;
};

ReferenceBlocks build_reference_blocks(const NodalBasis1D& basis, int dim,
                                       double theta = kDefaultTheta, double penalty_const = kDefaultPenalty);

/// Blocks at size h predicted from the reference blocks by h-scaling.
LocalBlocks scale_blocks(const ReferenceBlocks& ref, double h);

/// Σ_α h^{q_α} B_α for an interior cell.
Matrix assemble_schur(const ReferenceBlocks& ref, double h);

/// Bilinear continuous operators on the same mesh.
struct CoarseOps {
  int dim = 2;
  double h = 1.0;
  Matrix element_stiffness; ///< 2^d x 2^d, corner bit a = upper end along axis a
  Matrix prolongation;      ///< cell_dofs x 2^d, bilinear interpolation to the DG nodes
};

CoarseOps build_coarse_ops(const NodalBasis1D& basis, int dim, double h);

enum class AccessAlgorithm {
  Vanilla,                  ///< (2d+5)(p+1)^d
  AuxiliaryFacets,          ///< 3(p+1)^d + 7d(p+1)^(d-1)
  AuxiliaryFacetsStandalone ///< 5(p+1)^d + 7d(p+1)^(d-1)
};

std::int64_t memory_access_model(AccessAlgorithm alg, int dim, int p);

/// Dense dump of every block, for debugging.
std::string blocks_csv(const LocalBlocks& blocks);

} // namespace hpmg
