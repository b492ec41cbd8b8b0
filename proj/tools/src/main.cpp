// hpmg: experiment runner. Each subcommand writes <name>.csv and a
// <name>.json manifest into --out.

#include "hpmg/bench/runner.hpp"
#include "hpmg/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hpmg;
using namespace hpmg::bench;

namespace {

struct Options {
  std::vector<int> p;
  std::vector<int> levels;
  std::string problem;
  std::string basis = "lobatto";
  double theta = kDefaultTheta;
  double penalty = kDefaultPenalty;
  double omega = kDefaultOmega;
  int nu = MgConfig{}.nu;
  std::string coarse = to_string(MgConfig{}.coarse);
  std::string criterion = "prec";
  std::string variant = "fused";
  std::string inverse = "precomputed";
  int subdomains = 1;
  std::string partition = "balanced";
  int workers = 0; // 0: one per subdomain
  std::string out = ".";
  std::uint64_t seed = 1;
  std::string manifest;
  int iterations = 0;
  std::vector<int> subdomain_list{1, 2, 4, 8};
  std::vector<int> worker_list{1, 4};
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--p", o.p, "polynomial degrees")->delimiter(',');
  app->add_option("--levels", o.levels, "mesh levels (3^level cells per axis)")->delimiter(',');
  app->add_option("--problem", o.problem, "sin_product | two_peak | zero");
  app->add_option("--basis", o.basis, "lobatto | legendre");
  app->add_option("--theta", o.theta, "symmetry parameter of the interior penalty form");
  app->add_option("--penalty", o.penalty, "penalty constant c in c (p+1)^2 / h");
  app->add_option("--omega", o.omega, "block-Jacobi damping");
  app->add_option("--nu", o.nu, "DG smoothing steps per cycle");
  app->add_option("--coarse", o.coarse, "exact | vcycle");
  app->add_option("--criterion", o.criterion, "prec | unprec");
  app->add_option("--variant", o.variant, "vanilla | stages | fused | tasked");
  app->add_option("--inverse", o.inverse, "precomputed | percell");
  app->add_option("--subdomains", o.subdomains, "SFC subdomains (one traversal worker each)");
  app->add_option("--partition", o.partition, "balanced | geometric");
  app->add_option("--workers", o.workers, "total workers; those beyond --subdomains execute tasks");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "seed for random initial guesses");
  app->add_option("--manifest", o.manifest, "rerun from a manifest; other flags are ignored");
}

SolverConfig to_config(const Options& o) {
  SolverConfig c;
  c.p = o.p.empty() ? 2 : o.p.front();
  c.basis = node_kind_from_string(o.basis);
  c.theta = o.theta;
  c.penalty = o.penalty;
  c.smoother.variant = smoother_variant_from_string(o.variant);
  c.smoother.omega = o.omega;
  c.smoother.inverse = inverse_mode_from_string(o.inverse);
  c.subdomains = o.subdomains;
  c.smoother.workers = o.workers > 0 ? o.workers : o.subdomains;
  c.partition = partition_mode_from_string(o.partition);
  c.mg.nu = o.nu;
  c.mg.coarse = coarse_mode_from_string(o.coarse);
  c.mg.criterion = criterion_from_string(o.criterion);
  c.validate();
  return c;
}

RunManifest make_manifest(const std::string& experiment, const Options& o) {
  if (!o.manifest.empty()) {
    RunManifest m = RunManifest::read(o.manifest);
    if (m.experiment != experiment)
      throw InvalidArgument("manifest is for '" + m.experiment + "', not '" + experiment + "'");
    return m;
  }
  RunManifest m;
  m.experiment = experiment;
  m.config = to_config(o);
  m.p_list = o.p;
  m.levels = o.levels;
  m.problem = o.problem;
  m.seed = o.seed;
  if (experiment == "history" && o.iterations > 0) m.extra["smoother_iterations"] = o.iterations;
  if (experiment == "equivalence") {
    if (o.iterations > 0) m.extra["iterations"] = o.iterations;
    m.extra["subdomains"] = o.subdomain_list;
    m.extra["workers"] = o.worker_list;
  }
  return m;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hp-multigrid for interior penalty DG on base-3 Cartesian meshes"};
  app.require_subcommand(1);
  Options o;

  auto* conv = app.add_subcommand("convergence", "discretisation error and fitted orders");
  auto* cycles = app.add_subcommand("cycles", "cycle counts for a 1e-7 residual reduction");
  auto* hist = app.add_subcommand("history", "per-cycle residuals: smoother alone and two-grid variants");
  auto* rve = app.add_subcommand("residual-vs-error", "residual norms once the error is below 5e-9");
  auto* equiv = app.add_subcommand("equivalence", "iterate invariance across variants, partitions and workers");
  auto* model = app.add_subcommand("model", "memory access model table");
  for (auto* sub : {conv, cycles, hist, rve, equiv}) add_common(sub, o);
  model->add_option("--out", o.out, "output directory");
  model->add_option("--manifest", o.manifest, "rerun from a manifest");
  hist->add_option("--iterations", o.iterations, "smoother-only iterations (default 2000)");
  equiv->add_option("--iterations", o.iterations, "smoother iterations compared (default 10)");
  equiv->add_option("--subdomain-list", o.subdomain_list, "subdomain counts")->delimiter(',');
  equiv->add_option("--worker-list", o.worker_list, "worker counts")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const fs::path dir(o.out);
    const RunOutcome r = run_experiment(make_manifest(sub->get_name(), o), dir, std::cout);
    if (sub == model) {
      std::ifstream in(r.csv_files.front());
      std::cout << in.rdbuf();
    }
    std::cout << "wrote " << r.manifest_file.string() << '\n';
    return r.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hpmg: %s\n", e.what());
    return 2;
  }
}
