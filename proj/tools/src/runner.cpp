#include "hpmg/bench/runner.hpp"

#include "hpmg/errors.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

namespace fs = std::filesystem;

namespace hpmg::bench {

namespace {

struct Defaults {
  std::vector<int> p;
  std::vector<int> levels;
  const char* problem;
};

Defaults defaults_for(const std::string& experiment) {
  if (experiment == "convergence") return {{1, 2, 3}, {2, 3, 4}, "sin_product"};
  if (experiment == "cycles") return {{2, 3, 4, 5, 6}, {2, 3, 4, 5}, "two_peak"};
  if (experiment == "history") return {{2}, {3}, "two_peak"};
  if (experiment == "residual-vs-error") return {{2, 3}, {2, 3, 4}, "two_peak"};
  if (experiment == "equivalence") return {{3}, {3}, "two_peak"};
  if (experiment == "model") return {{}, {}, "zero"};
  throw InvalidArgument("unknown experiment: " + experiment);
}

template <class Write>
fs::path write_file(const fs::path& path, Write&& write) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  write(os);
  return path;
}

void set_default(nlohmann::json& j, const char* key, const nlohmann::json& value) {
  if (!j.contains(key)) j[key] = value;
}

} // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"convergence", "cycles",      "history",
                                              "residual-vs-error", "equivalence", "model"};
  return names;
}

void fill_defaults(RunManifest& m) {
  const Defaults d = defaults_for(m.experiment);
  if (m.p_list.empty()) m.p_list = d.p;
  if (m.levels.empty()) m.levels = d.levels;
  if (m.problem.empty()) m.problem = d.problem;
  if (!m.extra.is_object()) m.extra = nlohmann::json::object();
  if (m.experiment == "history") set_default(m.extra, "smoother_iterations", 2000);
  if (m.experiment == "equivalence") {
    set_default(m.extra, "iterations", 10);
    set_default(m.extra, "subdomains", std::vector<int>{1, 2, 4, 8});
    set_default(m.extra, "workers", std::vector<int>{1, 4});
  }
}

RunOutcome run_experiment(RunManifest m, const fs::path& dir, std::ostream& log) {
  fill_defaults(m);
  m.config.validate();
  fs::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  const std::string& name = m.experiment;
  RunOutcome out;
  auto csv = [&](const std::string& file, auto&& write) { out.csv_files.push_back(write_file(dir / file, write)); };

  if (name == "convergence") {
    const ConvergenceStudy s =
        run_convergence_study(m.config, m.p_list, m.levels, ManufacturedProblem::from_name(m.problem));
    csv("convergence.csv", [&](std::ostream& os) { s.write_csv(os); });
    csv("convergence_slopes.csv", [&](std::ostream& os) { s.write_slopes_csv(os); });
    for (const auto& sl : s.slopes) log << "p=" << sl.p << "  slope l2 " << sl.l2 << "  linf " << sl.linf << '\n';
  } else if (name == "cycles") {
    const CycleTable t = run_cycle_count_table(m.config, m.p_list, m.levels, ManufacturedProblem::from_name(m.problem),
                                               m.config.mg.criterion, m.config.basis);
    csv("cycles.csv", [&](std::ostream& os) { t.write_csv(os); });
    for (int level : m.levels) {
      log << "level " << level << ':';
      for (int p : m.p_list) {
        const CycleEntry* e = t.find(level, p);
        log << ' ' << e->cycles << (e->converged ? "" : "!");
        if (e->published) log << " (" << *e->published << ')';
      }
      log << '\n';
    }
  } else if (name == "history") {
    SolverConfig cfg = m.config;
    cfg.p = m.p_list.front();
    const ResidualHistory h = run_residual_history(cfg, ManufacturedProblem::from_name(m.problem), m.levels.front(),
                                                   m.extra.at("smoother_iterations").get<int>());
    csv("history.csv", [&](std::ostream& os) { h.write_csv(os); });
    for (const auto& run : h.runs)
      log << run.solver << ": " << run.result.trace.records.size() << " records, final r_l2 "
          << (run.result.trace.records.empty() ? 0.0 : run.result.trace.records.back().r_l2) << '\n';
  } else if (name == "residual-vs-error") {
    const ResidualVsError r = run_residual_vs_error(m.config, m.p_list, m.levels);
    csv("residual-vs-error.csv", [&](std::ostream& os) { r.write_csv(os); });
    for (const auto& row : r.rows)
      log << "p=" << row.p << " level=" << row.level << " cycles=" << row.cycles << " rprec=" << row.rprec
          << " r=" << row.r << '\n';
  } else if (name == "equivalence") {
    EquivalenceSpec spec;
    spec.level = m.levels.front();
    spec.iterations = m.extra.at("iterations").get<int>();
    spec.subdomains = m.extra.at("subdomains").get<std::vector<int>>();
    spec.workers = m.extra.at("workers").get<std::vector<int>>();
    spec.inverses = {InverseMode::Precomputed, InverseMode::PerCell};
    spec.seed = m.seed;
    SolverConfig cfg = m.config;
    cfg.p = m.p_list.front();
    const EquivalenceReport rep = run_equivalence_and_scaling_suite(cfg, ManufacturedProblem::from_name(m.problem), spec);
    csv("equivalence.csv", [&](std::ostream& os) { rep.write_csv(os); });
    csv("equivalence_counters.csv", [&](std::ostream& os) { rep.write_counters_csv(os); });
    double worst = 0.0;
    for (const auto& r : rep.rows) worst = std::max(worst, r.deviation);
    log << rep.rows.size() << " configurations, max relative deviation " << worst << ", "
        << (rep.pass() ? "PASS" : "FAIL") << '\n';
    out.pass = rep.pass();
  } else if (name == "model") {
    csv("model.csv", [](std::ostream& os) { write_model_csv(os); });
  }

  m.build = build_id();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.manifest_file = dir / (name + ".json");
  m.write(out.manifest_file);
  return out;
}

} // namespace hpmg::bench
