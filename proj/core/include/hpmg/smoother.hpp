#pragma once

/// \file smoother.hpp
/// Block-Jacobi smoothing of the DG level,
///
///   u_K += ω S⁻¹ (b - A u)_K   for all cells K simultaneously,
///
/// in four realisations that produce the same iterates:
///  - Vanilla: backup u_old, then per cell the residual from the exact
///    diagonal block and the neighbour coupling blocks.
///  - ThreeStage: projection traversal, flux traversal, residual+update
///    traversal.
///  - Fused: one traversal per step. Projections are kept current at sweep
///    entry (a warm-up projection traversal runs first); each cell computes
///    the fluxes of facets it touches first, accumulates its residual,
///    updates and re-projects.
///  - Tasked: as Fused, with the cell-local residual b - Acc·u (and the
///    on-the-fly inverse in per-cell mode) deferred to executor threads right
///    after the cell's update and awaited on the next visit.
///
/// Each subdomain of the partition is traversed by its own thread; interface
/// projections are exchanged after every traversal.

#include "hpmg/fields.hpp"
#include "hpmg/localops.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/task_pool.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace hpmg {

enum class SmootherVariant { Vanilla, ThreeStage, Fused, Tasked };
enum class InverseMode { Precomputed, PerCell };

std::string to_string(SmootherVariant v);
SmootherVariant smoother_variant_from_string(const std::string& name);
std::string to_string(InverseMode m);
InverseMode inverse_mode_from_string(const std::string& name);

/// Kinds of work in a traversal. Only CellResidual and MatrixInversion are
/// ever deferred to executors.
enum class TaskKind {
  Projection,
  NumericalFlux,
  CellResidual,
  FacetResidual,
  SolutionUpdate,
  MatrixAssembly,
  MatrixInversion
};

constexpr bool is_deferred(TaskKind k) { return k == TaskKind::CellResidual || k == TaskKind::MatrixInversion; }

inline constexpr double kDefaultOmega = 0.9;

struct SmootherConfig {
  SmootherVariant variant = SmootherVariant::Fused;
  double omega = kDefaultOmega;
  InverseMode inverse = InverseMode::Precomputed;
  /// Total threads: one traversal worker per subdomain, the rest execute
  /// deferred tasks (Tasked only).
  int workers = 1;
};

/// Access counts. Cell quantities are counted in cell blocks ((p+1)^d
/// values), facet quantities in one-sided facet records ((p+1)^(d-1)).
struct SweepCounters {
  std::uint64_t cell_reads = 0;
  std::uint64_t cell_writes = 0;
  std::uint64_t neighbour_reads = 0;        ///< subset of cell_reads (Vanilla)
  std::uint64_t cell_facet_reads = 0;       ///< facet records read from a cell's perspective
  std::uint64_t cell_facet_writes = 0;      ///< projections written by cells
  std::uint64_t interior_flux_accesses = 0; ///< reads+writes of flux evaluations on interior facets
  std::uint64_t boundary_flux_accesses = 0;
  std::uint64_t flux_evaluations = 0;
  std::uint64_t tasks_spawned = 0;
  std::uint64_t tasks_executed = 0;
  std::uint64_t traversals = 0;

  SweepCounters& operator+=(const SweepCounters& o);
};

/// Accesses per cell in the units of the memory-access model. The model
/// assumes every cell has 2d neighbours and the mesh has d facets per cell;
/// neighbour reads are therefore normalised per interior-facet incidence and
/// flux work per interior facet (boundary flux work is excluded).
double accesses_per_cell(const SweepCounters& c, const Mesh& mesh, int p);

class Smoother {
public:
  Smoother(const Mesh& mesh, const Partition& part, const ReferenceBlocks& ref, SmootherConfig cfg);
  ~Smoother();

  Smoother(const Smoother&) = delete;
  Smoother& operator=(const Smoother&) = delete;

  const SmootherConfig& config() const { return cfg_; }
  const LocalBlocks& blocks() const { return blocks_; }
  const Mesh& mesh() const { return mesh_; }
  const Partition& partition() const { return part_; }

  const CellField& solution() const { return u_; }
  const CellField& rhs() const { return b_; }
  void set_rhs(const CellField& b);
  void set_solution(const CellField& u);
  const FacetField& projections() const { return proj_; }
  const FacetField& fluxes() const { return flux_; }

  using CellHook = std::function<void(std::size_t cell, std::span<double> u)>;
  using ResidualHook = std::function<void(std::size_t cell, std::span<const double> r)>;

  /// Projection traversal. `before` may modify u|_K right before it is
  /// projected (used to fuse the prolongation). In Tasked mode the first
  /// round of deferred tasks is spawned.
  void warm_up(const CellHook& before = {});
  bool warm() const { return warm_; }

  /// One smoothing step of the configured variant.
  void sweep();
  void sweep_vanilla();
  void sweep_three_stage();
  void sweep_fused();
  void sweep_tasked();

  /// r = b - A u without touching u. Fused/Tasked require warm().
  /// `hook` is called once per cell with its residual block.
  void residual(CellField& r, const ResidualHook& hook = {});

  const SweepCounters& last_counters() const { return last_; }
  const SweepCounters& total_counters() const { return total_; }
  void reset_counters();

private:
  void run_parts(const std::function<void(int part, SweepCounters& c)>& body);
  void drain();
  void cell_residual(std::size_t c, std::span<double> r) const;
  void inverse_for(std::size_t c, std::span<const double> r, std::span<double> out) const;
  void project_cell(std::size_t c, SweepCounters& cnt);
  void spawn_tasks(std::size_t c, SweepCounters& cnt);
  void wait_task(std::size_t c);
  void fused_traversal(bool update, const ResidualHook& hook, CellField* r_out, bool tasked);
  void stage_projection();
  void stage_fluxes();
  std::size_t slot(std::size_t c, int face) const { return slot_[c * faces_ + face]; }
  bool boundary(std::size_t c, int face) const { return (mask_[c] >> face) & 1u; }

  const Mesh& mesh_;
  const Partition& part_;
  const ReferenceBlocks& ref_;
  SmootherConfig cfg_;
  LocalBlocks blocks_;
  FacetSlots slots_;
  int faces_;
  std::size_t n_;
  std::size_t nf_;

  std::vector<std::size_t> slot_;
  std::vector<std::size_t> neighbour_;
  std::vector<unsigned> mask_;
  std::vector<unsigned> computes_flux_;
  std::vector<std::vector<std::size_t>> part_facets_; ///< facets touched per subdomain (slot order)

  CellField u_, b_, u_old_, rcell_;
  FacetField proj_, flux_;
  bool warm_ = false;

  // Vanilla
  std::map<unsigned, Matrix> cell_matrices_;
  std::vector<Matrix> neighbour_blocks_;

  // Tasked
  std::unique_ptr<TaskPool> pool_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> task_state_;
  std::vector<double> inverses_;
  std::atomic<std::uint64_t> tasks_executed_{0};
  std::mutex task_error_mutex_;
  std::exception_ptr task_error_;

  SweepCounters last_, total_;
};

/// b - A u on one subdomain via projection / flux / residual, independent of
/// any smoother state.
CellField compute_residual(const Mesh& mesh, const LocalBlocks& blocks, const CellField& u, const CellField& b);
/// A u.
CellField apply_operator(const Mesh& mesh, const LocalBlocks& blocks, const CellField& u);

} // namespace hpmg
