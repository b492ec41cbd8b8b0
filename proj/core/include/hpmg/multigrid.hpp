#pragma once

/// \file multigrid.hpp
/// hp-multigrid for the DG level: ν block-Jacobi pre-smoothing steps, then a
/// correction from the bilinear continuous space on the same mesh, whose
/// equation is solved (approximately) by geometric V-cycles with point
/// Jacobi over the base-3 mesh hierarchy.

#include "hpmg/fields.hpp"
#include "hpmg/localops.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/smoother.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hpmg {

enum class CoarseMode {
  Exact,       ///< V-cycles until the CG residual drops by 1e-14
  SingleVCycle ///< one V-cycle from a zero initial guess
};

enum class Criterion { Preconditioned, Unpreconditioned };

std::string to_string(CoarseMode m);
CoarseMode coarse_mode_from_string(const std::string& name);
std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& name);

struct MgConfig {
  int nu = 3;
  CoarseMode coarse = CoarseMode::SingleVCycle;
  int cg_pre = 2;
  int cg_post = 2;
  double cg_omega = 1.0;
  int coarsest_iterations = 100;
  double exact_tolerance = 1e-14;
  int max_cycles = 300;
  double tolerance = 1e-7;
  Criterion criterion = Criterion::Preconditioned;

  void validate() const;
};

/// Bilinear CG operators on every mesh of a hierarchy (finest first). Vertex
/// vectors are lexicographic; boundary vertices are held at zero.
class CgHierarchy {
public:
  explicit CgHierarchy(const std::vector<Mesh>& meshes);

  std::size_t levels() const { return levels_.size(); }
  std::size_t vertices(std::size_t k) const { return levels_[k].boundary.size(); }
  const Matrix& element_matrix(std::size_t k) const { return levels_[k].element; }
  std::span<const double> diagonal(std::size_t k) const { return levels_[k].diag; }
  bool boundary(std::size_t k, std::size_t v) const { return levels_[k].boundary[v] != 0; }

  /// y = K x with boundary rows zeroed.
  void apply(std::size_t k, std::span<const double> x, std::span<double> y) const;
  /// Dual-vector restriction from level k to k+1 (R = Pᵀ), masked.
  void restrict_to_coarse(std::size_t k, std::span<const double> fine, std::span<double> coarse) const;
  /// fine += P coarse (bilinear interpolation of vertex values), masked.
  void prolongate_add(std::size_t k, std::span<const double> coarse, std::span<double> fine) const;
  /// `steps` damped point-Jacobi iterations.
  void jacobi(std::size_t k, std::span<const double> b, std::span<double> x, int steps, double omega) const;
  void mask(std::size_t k, std::span<double> x) const;

private:
  struct Level {
    int dim;
    std::size_t n; ///< cells per axis
    Matrix element;
    std::vector<double> diag;
    std::vector<std::uint8_t> boundary;
    std::vector<std::size_t> cell_vertices; ///< lexicographic cells x 2^d
  };
  std::vector<Level> levels_;
};

/// One V-cycle starting from x (in place) on level k.
void h_vcycle(const CgHierarchy& cg, std::size_t k, std::span<const double> b, std::span<double> x,
              const MgConfig& cfg);
/// One V-cycle from a zero initial guess on the finest level.
VertexField h_vcycle(const CgHierarchy& cg, const Mesh& finest, const VertexField& b, const MgConfig& cfg);
/// Solve of the finest CG system per cfg.coarse. Throws ConvergenceError if
/// the residual grows over 50 V-cycles in exact mode.
void cg_solve(const CgHierarchy& cg, std::span<const double> b, std::span<double> x, const MgConfig& cfg);

struct CycleRecord {
  int cycle = 0;
  double r_l2 = 0.0;     ///< ‖b - A u_k‖ / ‖b - A u_0‖
  double r_linf = 0.0;
  double rprec_l2 = 0.0; ///< ‖u_k - u_{k-1}‖ / ‖u_1 - u_0‖
  double rprec_linf = 0.0;
};

struct CycleTrace {
  double r0_l2 = 0.0;
  double r0_linf = 0.0;
  double rprec1_l2 = 0.0;
  double rprec1_linf = 0.0;
  std::vector<CycleRecord> records;

  void write_csv(std::ostream& os) const;
};

struct SolveResult {
  CellField u;
  CycleTrace trace;
  bool converged = false;
  int cycles = 0;
  std::uint64_t traversals = 0; ///< solver traversals (monitoring excluded)
};

class HpMultigrid {
public:
  /// `meshes` finest first; the DG level lives on meshes.front().
  HpMultigrid(const std::vector<Mesh>& meshes, const Partition& part, const NodalBasis1D& basis,
              const ReferenceBlocks& ref, SmootherConfig smoother_cfg, MgConfig cfg);

  Smoother& smoother() { return smoother_; }
  const CgHierarchy& cg() const { return cg_; }
  const CoarseOps& coarse_ops() const { return coarse_; }
  const MgConfig& config() const { return cfg_; }

  /// Pᵀ r accumulated cell by cell, boundary vertices masked.
  VertexField restrict_residual(const CellField& r) const;
  /// P e per cell.
  CellField prolongate(const VertexField& e) const;

  /// δu = P e_c with e_c from the CG solve of Pᵀ(b - A u). Resets the
  /// smoother state to (u, b).
  CellField coarse_grid_correction(const CellField& u, const CellField& b);

  /// Replaces the residual test: iteration stops once it returns true.
  using StopRule = std::function<bool(const CellField& u, const CycleRecord& rec)>;

  /// Multigrid iteration from u0 until the selected relative residual is
  /// below cfg.tolerance (or `stop` fires) or cfg.max_cycles is reached.
  SolveResult solve(const CellField& b, const CellField& u0, const StopRule& stop = {});

  /// Block-Jacobi alone (no coarse correction) for `iterations` steps,
  /// recording the same residual flavours per step.
  SolveResult smooth_only(const CellField& b, const CellField& u0, int iterations);

private:
  /// Sums per-cell corner contributions into vertices in lexicographic cell
  /// order, so the result does not depend on the partition.
  void gather(std::span<const double> contrib, std::span<double> vertex_values) const;

  const Mesh& mesh_;
  MgConfig cfg_;
  CgHierarchy cg_;
  CoarseOps coarse_;
  Smoother smoother_;
  std::size_t corners_;
  std::vector<std::size_t> cell_vertices_;     ///< per SFC cell x corner
  std::vector<std::size_t> lex_cells_;         ///< cells in lexicographic order
  std::vector<double> contributions_;          ///< per cell x corner
};

} // namespace hpmg
