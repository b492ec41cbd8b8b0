#include "hpmg/bench/experiments.hpp"

#include "hpmg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace hpmg::bench {

std::string csv_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

std::size_t cells_per_axis(int level) {
  std::size_t n = 1;
  for (int i = 0; i < level; ++i) n *= 3;
  return n;
}

} // namespace

// --- Discretisation ---------------------------------------------------------

Discretisation::Discretisation(const SolverConfig& cfg, int level)
    : meshes_(build_hierarchy(2, level)),
      part_(partition(meshes_.front(), cfg.partition, cfg.subdomains)),
      basis_(make_basis(cfg.basis, cfg.p)),
      ref_(build_reference_blocks(basis_, 2, cfg.theta, cfg.penalty)) {
  cfg.validate();
  mg_ = std::make_unique<HpMultigrid>(meshes_, part_, basis_, ref_, cfg.smoother, cfg.mg);
}

// --- convergence -----------------------------------------------------------

void ConvergenceStudy::write_csv(std::ostream& os) const {
  os << "problem,p,level,h,cycles,converged,error_l2,error_linf\n";
  for (const ConvergenceRow& r : rows)
    os << problem << ',' << r.p << ',' << r.level << ',' << csv_number(r.h) << ',' << r.cycles << ','
       << flag(r.converged) << ',' << csv_number(r.l2) << ',' << csv_number(r.linf) << '\n';
}

void ConvergenceStudy::write_slopes_csv(std::ostream& os) const {
  os << "problem,p,slope_l2,slope_linf\n";
  for (const Slope& s : slopes)
    os << problem << ',' << s.p << ',' << csv_number(s.l2) << ',' << csv_number(s.linf) << '\n';
}

ConvergenceStudy run_convergence_study(const SolverConfig& base, const std::vector<int>& p_list,
                                       const std::vector<int>& levels, const ManufacturedProblem& problem) {
  SolverConfig cfg = base;
  cfg.mg.criterion = Criterion::Preconditioned;
  cfg.mg.tolerance = 1e-10;
  cfg.mg.max_cycles = 300;

  ConvergenceStudy study;
  study.problem = problem.name();
  for (int p : p_list) {
    cfg.p = p;
    std::vector<double> hs, e2, einf;
    for (int level : levels) {
      Discretisation disc(cfg, level);
      const Mesh& mesh = disc.mesh();
      const CellField b = build_rhs(problem, mesh, disc.basis());
      const SolveResult res = disc.multigrid().solve(b, CellField(mesh.num_cells(), b.block()));
      const ErrorNorms err = discretisation_error(res.u, problem, mesh, disc.basis());
      study.rows.push_back({p, level, mesh.h(), res.cycles, res.converged, err.l2, err.linf});
      hs.push_back(mesh.h());
      e2.push_back(err.l2);
      einf.push_back(err.linf);
    }
    ConvergenceStudy::Slope s;
    s.p = p;
    const bool fit = hs.size() >= 3 && std::all_of(e2.begin(), e2.end(), [](double e) { return e > 0.0; }) &&
                     std::all_of(einf.begin(), einf.end(), [](double e) { return e > 0.0; });
    s.l2 = fit ? fit_slope(hs, e2) : std::numeric_limits<double>::quiet_NaN();
    s.linf = fit ? fit_slope(hs, einf) : std::numeric_limits<double>::quiet_NaN();
    study.slopes.push_back(s);
  }
  return study;
}

// --- cycle counts ----------------------------------------------------------

const CycleEntry* CycleTable::find(int level, int p) const {
  for (const CycleEntry& e : entries)
    if (e.level == level && e.p == p) return &e;
  return nullptr;
}

void CycleTable::write_csv(std::ostream& os) const {
  os << "problem,criterion,basis,level,cells_per_axis,p,cycles,converged,paper\n";
  for (const CycleEntry& e : entries) {
    os << problem << ',' << to_string(criterion) << ',' << to_string(basis) << ',' << e.level << ','
       << cells_per_axis(e.level) << ',' << e.p << ',' << e.cycles << ',' << flag(e.converged) << ',';
    if (e.published) os << *e.published;
    os << '\n';
  }
}

CycleTable run_cycle_count_table(const SolverConfig& base, const std::vector<int>& p_list,
                                 const std::vector<int>& levels, const ManufacturedProblem& problem,
                                 Criterion criterion, NodeKind basis) {
  SolverConfig cfg = base;
  cfg.basis = basis;
  cfg.mg.criterion = criterion;
  cfg.mg.tolerance = 1e-7;
  cfg.mg.max_cycles = 500;

  CycleTable table;
  table.problem = problem.name();
  table.criterion = criterion;
  table.basis = basis;
  for (int level : levels)
    for (int p : p_list) {
      cfg.p = p;
      Discretisation disc(cfg, level);
      const Mesh& mesh = disc.mesh();
      const CellField b = build_rhs(problem, mesh, disc.basis());
      const SolveResult res = disc.multigrid().solve(b, CellField(mesh.num_cells(), b.block()));
      table.entries.push_back(
          {level, p, res.cycles, res.converged, published_cycle_count(problem.kind(), criterion, basis, level, p)});
    }
  return table;
}

// --- residual history ------------------------------------------------------

const ResidualHistory::Run& ResidualHistory::run(const std::string& solver) const {
  for (const Run& r : runs)
    if (r.solver == solver) return r;
  throw InvalidArgument("ResidualHistory: no run named " + solver);
}

void ResidualHistory::write_csv(std::ostream& os) const {
  os << "solver,cycle,r_l2,r_linf,rprec_l2,rprec_linf\n";
  for (const Run& run : runs)
    for (const CycleRecord& r : run.result.trace.records)
      os << run.solver << ',' << r.cycle << ',' << csv_number(r.r_l2) << ',' << csv_number(r.r_linf) << ','
         << csv_number(r.rprec_l2) << ',' << csv_number(r.rprec_linf) << '\n';
}

ResidualHistory run_residual_history(const SolverConfig& base, const ManufacturedProblem& problem, int level,
                                     int smoother_iterations) {
  ResidualHistory hist;
  {
    Discretisation disc(base, level);
    const CellField b = build_rhs(problem, disc.mesh(), disc.basis());
    hist.runs.push_back(
        {"smoother", disc.multigrid().smooth_only(b, CellField(disc.mesh().num_cells(), b.block()), smoother_iterations)});
  }
  for (CoarseMode mode : {CoarseMode::Exact, CoarseMode::SingleVCycle}) {
    SolverConfig cfg = base;
    cfg.mg.coarse = mode;
    Discretisation disc(cfg, level);
    const CellField b = build_rhs(problem, disc.mesh(), disc.basis());
    hist.runs.push_back({to_string(mode), disc.multigrid().solve(b, CellField(disc.mesh().num_cells(), b.block()))});
  }
  return hist;
}

// --- residual vs error -----------------------------------------------------

const ResidualVsErrorRow* ResidualVsError::find(int level, int p) const {
  for (const ResidualVsErrorRow& r : rows)
    if (r.level == level && r.p == p) return &r;
  return nullptr;
}

void ResidualVsError::write_csv(std::ostream& os) const {
  os << "p,level,cycles,reached,error_l2,rprec_l2,r_l2\n";
  for (const ResidualVsErrorRow& r : rows)
    os << r.p << ',' << r.level << ',' << r.cycles << ',' << flag(r.reached) << ',' << csv_number(r.error) << ','
       << csv_number(r.rprec) << ',' << csv_number(r.r) << '\n';
}

ResidualVsError run_residual_vs_error(const SolverConfig& base, const std::vector<int>& p_list,
                                      const std::vector<int>& levels) {
  SolverConfig cfg = base;
  cfg.mg.max_cycles = 500;
  const ManufacturedProblem two_peak(ProblemKind::TwoPeak);

  ResidualVsError out;
  for (int p : p_list) {
    cfg.p = p;
    for (int level : levels) {
      Discretisation disc(cfg, level);
      const Mesh& mesh = disc.mesh();
      const CellField u_ini = interpolate_exact(two_peak, mesh, disc.basis());
      const double norm_ini = u_ini.norm(NormKind::L2);
      const CellField zero(mesh.num_cells(), u_ini.block());
      double error = 1.0;
      const SolveResult res = disc.multigrid().solve(zero, u_ini, [&](const CellField& u, const CycleRecord&) {
        error = u.norm(NormKind::L2) / norm_ini;
        return error <= kErrorThreshold;
      });
      ResidualVsErrorRow row;
      row.p = p;
      row.level = level;
      row.cycles = res.cycles;
      row.reached = res.converged;
      row.error = error;
      if (!res.trace.records.empty()) {
        row.rprec = res.trace.records.back().rprec_l2;
        row.r = res.trace.records.back().r_l2;
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

// --- equivalence -----------------------------------------------------------

CellField smoother_iterate(const SolverConfig& cfg, const ManufacturedProblem& problem, int level, int iterations,
                           std::uint64_t seed) {
  cfg.validate();
  const Mesh mesh(2, level);
  const Partition part = partition(mesh, cfg.partition, cfg.subdomains);
  const NodalBasis1D basis = make_basis(cfg.basis, cfg.p);
  const ReferenceBlocks ref = build_reference_blocks(basis, 2, cfg.theta, cfg.penalty);
  Smoother smoother(mesh, part, ref, cfg.smoother);
  const CellField b = build_rhs(problem, mesh, basis);
  smoother.set_rhs(b);
  CellField u0(mesh.num_cells(), b.block());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : u0.values()) v = dist(rng);
  smoother.set_solution(u0);
  if (cfg.smoother.variant == SmootherVariant::Fused || cfg.smoother.variant == SmootherVariant::Tasked)
    smoother.warm_up();
  for (int k = 0; k < iterations; ++k) smoother.sweep();
  return smoother.solution();
}

double measured_accesses_per_cell(SmootherVariant variant, int p, int level) {
  const Mesh mesh(2, level);
  const Partition part = partition(mesh, PartitionMode::Balanced, 1);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, p);
  const ReferenceBlocks ref = build_reference_blocks(basis, 2);
  SmootherConfig sc;
  sc.variant = variant;
  Smoother smoother(mesh, part, ref, sc);
  smoother.set_rhs(CellField(mesh.num_cells(), ref.unit.cell_dofs));
  smoother.set_solution(CellField(mesh.num_cells(), ref.unit.cell_dofs));
  if (variant == SmootherVariant::Fused || variant == SmootherVariant::Tasked) smoother.warm_up();
  smoother.sweep();
  return accesses_per_cell(smoother.last_counters(), mesh, p);
}

bool EquivalenceReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const EquivalenceRow& r) { return r.pass; }) &&
         std::all_of(counters.begin(), counters.end(), [](const CounterRow& r) { return r.pass; });
}

void EquivalenceReport::write_csv(std::ostream& os) const {
  os << "variant,inverse,subdomains,partition,workers,max_rel_deviation,pass\n";
  for (const EquivalenceRow& r : rows)
    os << to_string(r.variant) << ',' << to_string(r.inverse) << ',' << r.subdomains << ',' << to_string(r.partition)
       << ',' << r.workers << ',' << csv_number(r.deviation) << ',' << flag(r.pass) << '\n';
}

void EquivalenceReport::write_counters_csv(std::ostream& os) const {
  os << "dim,p,variant,measured_per_cell,model_per_cell,pass\n";
  for (const CounterRow& r : counters)
    os << r.dim << ',' << r.p << ',' << to_string(r.variant) << ',' << csv_number(r.measured) << ',' << r.model << ','
       << flag(r.pass) << '\n';
}

EquivalenceReport run_equivalence_and_scaling_suite(const SolverConfig& base, const ManufacturedProblem& problem,
                                                    const EquivalenceSpec& spec) {
  SolverConfig ref_cfg = base;
  ref_cfg.smoother.variant = SmootherVariant::Fused;
  ref_cfg.smoother.inverse = InverseMode::Precomputed;
  ref_cfg.smoother.workers = 1;
  ref_cfg.subdomains = 1;
  ref_cfg.partition = PartitionMode::Balanced;
  const CellField reference = smoother_iterate(ref_cfg, problem, spec.level, spec.iterations, spec.seed);
  const double scale = reference.norm(NormKind::Linf);

  EquivalenceReport report;
  for (SmootherVariant variant : spec.variants)
    for (InverseMode inverse : spec.inverses)
      for (int parts : spec.subdomains)
        for (PartitionMode mode : spec.partitions) {
          if (parts == 1 && mode != spec.partitions.front()) continue; // one part is one part
          for (int workers : spec.workers) {
            SolverConfig cfg = base;
            cfg.smoother.variant = variant;
            cfg.smoother.inverse = inverse;
            cfg.smoother.workers = std::max(workers, parts);
            cfg.subdomains = parts;
            cfg.partition = mode;
            const CellField u = smoother_iterate(cfg, problem, spec.level, spec.iterations, spec.seed);
            double dev = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
              dev = std::max(dev, std::abs(u.values()[i] - reference.values()[i]));
            if (scale > 0.0) dev /= scale;
            report.rows.push_back({variant, inverse, parts, mode, cfg.smoother.workers, dev, dev <= spec.tolerance});
          }
        }

  for (int p : spec.counter_degrees)
    for (auto [variant, alg] : {std::pair{SmootherVariant::Fused, AccessAlgorithm::AuxiliaryFacets},
                                std::pair{SmootherVariant::Vanilla, AccessAlgorithm::Vanilla}}) {
      CounterRow row;
      row.p = p;
      row.variant = variant;
      row.measured = measured_accesses_per_cell(variant, p, spec.level);
      row.model = memory_access_model(alg, 2, p);
      row.pass = std::abs(row.measured - static_cast<double>(row.model)) <= 1e-9 * static_cast<double>(row.model);
      report.counters.push_back(row);
    }
  return report;
}

// --- memory model ----------------------------------------------------------

void write_model_csv(std::ostream& os) {
  os << "dim,p,algorithm,model,paper,match\n";
  const std::pair<AccessAlgorithm, const char*> algs[] = {
      {AccessAlgorithm::Vanilla, "vanilla"},
      {AccessAlgorithm::AuxiliaryFacets, "auxiliary_facets"},
      {AccessAlgorithm::AuxiliaryFacetsStandalone, "auxiliary_facets_standalone"}};
  for (int d = 2; d <= 3; ++d)
    for (const auto& [alg, name] : algs)
      for (int p = 1; p <= 10; ++p) {
        const std::int64_t model = memory_access_model(alg, d, p);
        const std::int64_t published = published_access_count(alg, d, p);
        os << d << ',' << p << ',' << name << ',' << model << ',' << published << ',' << flag(model == published) << '\n';
      }
}

} // namespace hpmg::bench
