#pragma once
// Experiment drivers behind the `hpmg` command line tool. Every driver takes a
// SolverConfig, returns plain result structs, and can write them as CSV.

#include "hpmg/basis.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/multigrid.hpp"
#include "hpmg/problems.hpp"
#include "hpmg/smoother.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hpmg::bench {

/// Every knob that changes iterates.
struct SolverConfig {
  int p = 2;
  NodeKind basis = NodeKind::GaussLobatto;
  double theta = kDefaultTheta;
  double penalty = kDefaultPenalty;
  SmootherConfig smoother;
  MgConfig mg;
  int subdomains = 1;
  PartitionMode partition = PartitionMode::Balanced;

  void validate() const;
};

nlohmann::json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);

/// Identifier of the build (git describe at configure time).
std::string build_id();

struct RunManifest {
  std::string experiment;
  SolverConfig config;
  std::string problem;
  std::vector<int> p_list;
  std::vector<int> levels;
  std::uint64_t seed = 0;
  std::string build;
  double wall_seconds = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void write(const std::filesystem::path& file) const;
  static RunManifest read(const std::filesystem::path& file);
};

/// Mesh, hierarchy, partition and operators for one (config, level).
class Discretisation {
public:
  Discretisation(const SolverConfig& cfg, int level);
  Discretisation(const Discretisation&) = delete;
  Discretisation& operator=(const Discretisation&) = delete;

  const Mesh& mesh() const { return meshes_.front(); }
  const NodalBasis1D& basis() const { return basis_; }
  HpMultigrid& multigrid() { return *mg_; }

private:
  std::vector<Mesh> meshes_;
  Partition part_;
  NodalBasis1D basis_;
  ReferenceBlocks ref_;
  std::unique_ptr<HpMultigrid> mg_;
};

// --- convergence -----------------------------------------------------------

struct ConvergenceRow {
  int p = 0;
  int level = 0;
  double h = 0.0;
  int cycles = 0;
  bool converged = false;
  double l2 = 0.0;
  double linf = 0.0;
};

struct ConvergenceStudy {
  std::string problem;
  std::vector<ConvergenceRow> rows;
  struct Slope {
    int p = 0;
    double l2 = 0.0;
    double linf = 0.0;
  };
  std::vector<Slope> slopes; ///< per p, NaN with fewer than 3 levels

  void write_csv(std::ostream& os) const;
  void write_slopes_csv(std::ostream& os) const;
};

/// Solves each (p, level) to 1e-10 on the preconditioned criterion (at most
/// 300 cycles) and records the discretisation error.
ConvergenceStudy run_convergence_study(const SolverConfig& cfg, const std::vector<int>& p_list,
                                       const std::vector<int>& levels, const ManufacturedProblem& problem);

// --- cycle counts ----------------------------------------------------------

/// Published cycle counts for side-by-side comparison, if the table has the
/// entry (levels 2..5, p 2..6).
std::optional<int> published_cycle_count(ProblemKind problem, Criterion criterion, NodeKind basis, int level, int p);

struct CycleEntry {
  int level = 0;
  int p = 0;
  int cycles = 0;
  bool converged = false;
  std::optional<int> published;
};

struct CycleTable {
  std::string problem;
  Criterion criterion = Criterion::Preconditioned;
  NodeKind basis = NodeKind::GaussLobatto;
  std::vector<CycleEntry> entries;

  const CycleEntry* find(int level, int p) const;
  void write_csv(std::ostream& os) const;
};

/// Cycles to reduce the selected relative residual by 1e-7; 500-cycle cap.
CycleTable run_cycle_count_table(const SolverConfig& cfg, const std::vector<int>& p_list,
                                 const std::vector<int>& levels, const ManufacturedProblem& problem,
                                 Criterion criterion, NodeKind basis);

// --- residual history ------------------------------------------------------

struct ResidualHistory {
  struct Run {
    std::string solver; ///< "smoother", "exact", "vcycle"
    SolveResult result;
  };
  std::vector<Run> runs;

  const Run& run(const std::string& solver) const;
  void write_csv(std::ostream& os) const;
};

/// Smoother alone for `smoother_iterations` steps, then two-grid cycles with
/// exact and with single V-cycle coarse solves, both to cfg.mg.tolerance.
ResidualHistory run_residual_history(const SolverConfig& cfg, const ManufacturedProblem& problem, int level,
                                     int smoother_iterations);

// --- residual vs error -----------------------------------------------------

inline constexpr double kErrorThreshold = 5e-9;

struct ResidualVsErrorRow {
  int p = 0;
  int level = 0;
  int cycles = 0;
  bool reached = false;
  double error = 0.0;    ///< ‖u‖₂ / ‖u_ini‖₂
  double rprec = 0.0;    ///< relative preconditioned residual, ℓ₂
  double r = 0.0;        ///< relative residual, ℓ₂
};

struct ResidualVsError {
  std::vector<ResidualVsErrorRow> rows;
  const ResidualVsErrorRow* find(int level, int p) const;
  void write_csv(std::ostream& os) const;
};

/// A u = 0 from the interpolated two-peak function, iterated until the
/// solution (which is the error) has shrunk by kErrorThreshold.
ResidualVsError run_residual_vs_error(const SolverConfig& cfg, const std::vector<int>& p_list,
                                      const std::vector<int>& levels);

// --- equivalence and counters ---------------------------------------------

struct EquivalenceRow {
  SmootherVariant variant = SmootherVariant::Fused;
  InverseMode inverse = InverseMode::Precomputed;
  int subdomains = 1;
  PartitionMode partition = PartitionMode::Balanced;
  int workers = 1;
  double deviation = 0.0; ///< max relative deviation from the reference
  bool pass = false;
};

struct CounterRow {
  int dim = 2;
  int p = 0;
  SmootherVariant variant = SmootherVariant::Fused;
  double measured = 0.0;
  std::int64_t model = 0;
  bool pass = false;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  std::vector<CounterRow> counters;
  bool pass() const;
  void write_csv(std::ostream& os) const;
  void write_counters_csv(std::ostream& os) const;
};

struct EquivalenceSpec {
  int level = 3;
  int iterations = 10;
  std::vector<int> subdomains{1, 2, 4, 8};
  std::vector<PartitionMode> partitions{PartitionMode::Balanced, PartitionMode::Geometric};
  std::vector<SmootherVariant> variants{SmootherVariant::Vanilla, SmootherVariant::ThreeStage,
                                        SmootherVariant::Fused, SmootherVariant::Tasked};
  std::vector<InverseMode> inverses{InverseMode::Precomputed};
  std::vector<int> workers{1, 4};
  std::vector<int> counter_degrees{1, 2, 3, 4, 5, 6};
  double tolerance = 1e-12;
  std::uint64_t seed = 1; ///< random initial guess
};

/// Iterates of `iterations` smoother steps for every combination in `spec`
/// compared with the single-subdomain fused sweep, plus instrumented access
/// counters against the closed-form model.
EquivalenceReport run_equivalence_and_scaling_suite(const SolverConfig& cfg, const ManufacturedProblem& problem,
                                                    const EquivalenceSpec& spec);

/// `iterations` smoother sweeps from a uniform random initial guess in
/// [-1, 1] drawn with `seed`.
CellField smoother_iterate(const SolverConfig& cfg, const ManufacturedProblem& problem, int level, int iterations,
                           std::uint64_t seed);

/// Volumetric accesses per cell of one instrumented sweep.
double measured_accesses_per_cell(SmootherVariant variant, int p, int level);

// --- memory model ----------------------------------------------------------

/// Published access counts (d = 2, 3; p = 1..10).

std::int64_t published_access_count(AccessAlgorithm alg, int dim, int p);

void write_model_csv(std::ostream& os);

// --- output ----------------------------------------------------------------

/// CSV number formatting: 17 significant digits, '.' decimal point.
std::string csv_number(double v);

} // namespace hpmg::bench
