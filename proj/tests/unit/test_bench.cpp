#include "hpmg/bench/experiments.hpp"
#include "hpmg/bench/runner.hpp"
#include "hpmg/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hpmg;
using namespace hpmg::bench;
namespace fs = std::filesystem;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hpmg_test_bench_" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST(Bench, CsvNumbersUseSeventeenDigits) {
  EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_number(-2.5e-9), "-2.5000000000000001e-09");
}

TEST(Bench, PublishedCycleCounts) {
  using P = ProblemKind;
  using C = Criterion;
  EXPECT_EQ(published_cycle_count(P::SinProduct, C::Unpreconditioned, NodeKind::GaussLobatto, 5, 2), 13);
  EXPECT_EQ(published_cycle_count(P::TwoPeak, C::Preconditioned, NodeKind::GaussLobatto, 2, 2), 16);
  EXPECT_EQ(published_cycle_count(P::SinProduct, C::Preconditioned, NodeKind::GaussLobatto, 3, 2), 9);
  EXPECT_EQ(published_cycle_count(P::TwoPeak, C::Unpreconditioned, NodeKind::GaussLobatto, 5, 6), 106);
  EXPECT_EQ(published_cycle_count(P::TwoPeak, C::Unpreconditioned, NodeKind::GaussLegendre, 2, 6), 131);
  EXPECT_EQ(published_cycle_count(P::TwoPeak, C::Preconditioned, NodeKind::GaussLegendre, 4, 3), 13);
  EXPECT_FALSE(published_cycle_count(P::TwoPeak, C::Preconditioned, NodeKind::GaussLegendre, 5, 6));
  EXPECT_FALSE(published_cycle_count(P::SinProduct, C::Preconditioned, NodeKind::GaussLegendre, 3, 2));
  EXPECT_FALSE(published_cycle_count(P::SinProduct, C::Preconditioned, NodeKind::GaussLobatto, 1, 2));
}

TEST(Bench, AccessModelReproducesPublishedTable) {
  const AccessAlgorithm algs[] = {AccessAlgorithm::Vanilla, AccessAlgorithm::AuxiliaryFacets,
                                  AccessAlgorithm::AuxiliaryFacetsStandalone};
  int entries = 0;
  for (int d : {2, 3})
    for (AccessAlgorithm a : algs)
      for (int p = 1; p <= 10; ++p) {
        EXPECT_EQ(memory_access_model(a, d, p), published_access_count(a, d, p)) << d << ' ' << p;
        ++entries;
      }
  EXPECT_EQ(entries, 60);
  EXPECT_EQ(published_access_count(AccessAlgorithm::AuxiliaryFacets, 2, 4), 145);
  EXPECT_EQ(published_access_count(AccessAlgorithm::Vanilla, 3, 10), 14641);
  EXPECT_THROW(published_access_count(AccessAlgorithm::Vanilla, 2, 11), InvalidArgument);
  std::ostringstream os;
  write_model_csv(os);
  EXPECT_EQ(first_line(os.str()), "dim,p,algorithm,model,paper,match");
  EXPECT_EQ(os.str().find(",0\n"), std::string::npos);
}

TEST(Bench, FusedCounterMatchesModel) {
  EXPECT_DOUBLE_EQ(measured_accesses_per_cell(SmootherVariant::Fused, 4, 2), 145.0);
  EXPECT_DOUBLE_EQ(measured_accesses_per_cell(SmootherVariant::Vanilla, 4, 2), 225.0);
}

TEST(Bench, ManifestRoundTrip) {
  RunManifest m;
  m.experiment = "cycles";
  m.config.p = 4;
  m.config.basis = NodeKind::GaussLegendre;
  m.config.theta = -1.0;
  m.config.penalty = 3.5;
  m.config.smoother.variant = SmootherVariant::Tasked;
  m.config.smoother.omega = 0.7;
  m.config.smoother.inverse = InverseMode::PerCell;
  m.config.smoother.workers = 5;
  m.config.subdomains = 2;
  m.config.partition = PartitionMode::Geometric;
  m.config.mg.nu = 4;
  m.config.mg.coarse = CoarseMode::Exact;
  m.config.mg.cg_pre = 1;
  m.config.mg.cg_post = 3;
  m.config.mg.cg_omega = 0.8;
  m.config.mg.criterion = Criterion::Unpreconditioned;
  m.problem = "sin_product";
  m.p_list = {2, 4};
  m.levels = {2, 3};
  m.seed = 42;
  m.extra["x"] = 1;
  const fs::path dir = scratch_dir("manifest");
  fs::create_directories(dir);
  m.write(dir / "m.json");
  const RunManifest r = RunManifest::read(dir / "m.json");
  EXPECT_EQ(r.to_json(), m.to_json());
  EXPECT_EQ(to_json(r.config), to_json(m.config));
  EXPECT_EQ(r.config.smoother.variant, SmootherVariant::Tasked);
  EXPECT_EQ(r.config.mg.cg_post, 3);
  EXPECT_EQ(r.config.partition, PartitionMode::Geometric);
  const nlohmann::json j = m.to_json();
  // Mesh descriptions for every level of the run.
  ASSERT_EQ(j.at("meshes").size(), 2u);
  EXPECT_EQ(j.at("meshes")[1].at("cells"), 729);
  for (const char* key : {"omega", "variant", "inverse", "workers"})
    EXPECT_TRUE(j.at("config").at("smoother").contains(key)) << key;
  for (const char* key : {"nu", "coarse", "cg_pre", "cg_post", "cg_omega", "criterion", "tolerance"})
    EXPECT_TRUE(j.at("config").at("multigrid").contains(key)) << key;
}

TEST(Bench, ConfigValidation) {
  SolverConfig c;
  c.subdomains = 4;
  c.smoother.workers = 2;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.smoother.workers = 4;
  EXPECT_NO_THROW(c.validate());
  c.p = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Bench, ConvergenceStudyOfZeroProblem) {
  const ConvergenceStudy s =
      run_convergence_study(SolverConfig{}, {1, 2}, {1, 2}, ManufacturedProblem(ProblemKind::Zero));
  ASSERT_EQ(s.rows.size(), 4u);
  for (const auto& r : s.rows) {
    EXPECT_EQ(r.l2, 0.0);
    EXPECT_EQ(r.linf, 0.0);
    EXPECT_EQ(r.cycles, 0);
  }
  std::ostringstream os;
  s.write_csv(os);
  EXPECT_EQ(first_line(os.str()), "problem,p,level,h,cycles,converged,error_l2,error_linf");
}

TEST(Bench, TwoPeakErrorsDecrease) {
  const ConvergenceStudy s =
      run_convergence_study(SolverConfig{}, {2}, {1, 2, 3}, ManufacturedProblem(ProblemKind::TwoPeak));
  ASSERT_EQ(s.rows.size(), 3u);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_TRUE(s.rows[k].converged);
    EXPECT_LT(s.rows[k].l2, s.rows[k - 1].l2);
    EXPECT_LT(s.rows[k].linf, s.rows[k - 1].linf);
  }
}

TEST(Bench, CycleTableCarriesPublishedColumn) {
  const CycleTable t = run_cycle_count_table(SolverConfig{}, {2, 3}, {2}, ManufacturedProblem(ProblemKind::TwoPeak),
                                             Criterion::Preconditioned, NodeKind::GaussLobatto);
  const CycleEntry* e = t.find(2, 2);
  ASSERT_NE(e, nullptr);
  EXPECT_TRUE(e->converged);
  EXPECT_EQ(e->published, 16);
  EXPECT_LT(e->cycles, t.find(2, 3)->cycles);
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(first_line(os.str()), "problem,criterion,basis,level,cells_per_axis,p,cycles,converged,paper");
  EXPECT_NE(os.str().find("two_peak,prec,lobatto,2,9,2,"), std::string::npos);
}

TEST(Bench, ResidualHistory) {
  const ResidualHistory h =
      run_residual_history(SolverConfig{}, ManufacturedProblem(ProblemKind::TwoPeak), 2, 100);
  const auto& smoother = h.run("smoother").result;
  const auto& exact = h.run("exact").result;
  const auto& vcycle = h.run("vcycle").result;
  EXPECT_EQ(smoother.trace.records.size(), 100u);
  EXPECT_FALSE(smoother.converged);
  ASSERT_TRUE(exact.converged && vcycle.converged);
  EXPECT_DOUBLE_EQ(exact.trace.records.front().rprec_l2, 1.0);
  EXPECT_DOUBLE_EQ(vcycle.trace.records.front().rprec_l2, 1.0);
  EXPECT_LE(std::abs(exact.cycles - vcycle.cycles), 2);
  std::ostringstream os;
  h.write_csv(os);
  EXPECT_EQ(first_line(os.str()), "solver,cycle,r_l2,r_linf,rprec_l2,rprec_linf");
  EXPECT_THROW(h.run("w-cycle"), InvalidArgument);
}

TEST(Bench, ResidualVsErrorAtSmallScale) {
  const ResidualVsError r = run_residual_vs_error(SolverConfig{}, {2}, {1, 2});
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.reached);
    EXPECT_LE(row.error, kErrorThreshold);
    EXPECT_GT(row.r, 0.0);
  }
  std::ostringstream os;
  r.write_csv(os);
  EXPECT_EQ(first_line(os.str()), "p,level,cycles,reached,error_l2,rprec_l2,r_l2");
}

TEST(Bench, EquivalenceSuitePasses) {
  EquivalenceSpec spec;
  spec.level = 2;
  spec.subdomains = {1, 4};
  spec.inverses = {InverseMode::Precomputed, InverseMode::PerCell};
  spec.counter_degrees = {1, 4};
  SolverConfig cfg;
  cfg.p = 3;
  const EquivalenceReport rep = run_equivalence_and_scaling_suite(cfg, ManufacturedProblem(ProblemKind::TwoPeak), spec);
  EXPECT_TRUE(rep.pass());
  // 4 variants x 2 inverses x 2 workers x (1 + 2 partitions of 4 parts).
  EXPECT_EQ(rep.rows.size(), 48u);
  EXPECT_FALSE(rep.counters.empty());
  std::ostringstream os;
  rep.write_csv(os);
  EXPECT_EQ(first_line(os.str()), "variant,inverse,subdomains,partition,workers,max_rel_deviation,pass");
}

TEST(Bench, SmootherIterateIndependentOfGeometricPartition) {
  SolverConfig one;
  one.p = 2;
  SolverConfig eight = one;
  eight.subdomains = 8;
  eight.partition = PartitionMode::Geometric;
  eight.smoother.workers = 8;
  const ManufacturedProblem tp(ProblemKind::TwoPeak);
  EXPECT_EQ(smoother_iterate(one, tp, 2, 10, 3), smoother_iterate(eight, tp, 2, 10, 3));
  EXPECT_FALSE(smoother_iterate(one, tp, 2, 10, 3) == smoother_iterate(one, tp, 2, 10, 4));
}

TEST(Bench, ManifestRerunIsBitwiseIdentical) {
  RunManifest m;
  m.experiment = "convergence";
  m.p_list = {1};
  m.levels = {1, 2};
  std::ostringstream log;
  const fs::path a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  const RunOutcome ra = run_experiment(m, a, log);
  const RunOutcome rb = run_experiment(RunManifest::read(ra.manifest_file), b, log);
  ASSERT_EQ(ra.csv_files.size(), rb.csv_files.size());
  for (std::size_t k = 0; k < ra.csv_files.size(); ++k) EXPECT_EQ(slurp(ra.csv_files[k]), slurp(rb.csv_files[k]));
  // Defaults are recorded so the manifest is complete.
  const RunManifest back = RunManifest::read(ra.manifest_file);
  EXPECT_EQ(back.problem, "sin_product");
}

TEST(Bench, RunnerRejectsUnknownExperiment) {
  RunManifest m;
  m.experiment = "plots";
  std::ostringstream log;
  EXPECT_THROW(run_experiment(m, scratch_dir("unknown"), log), InvalidArgument);
  EXPECT_EQ(experiment_names().size(), 6u);
}
