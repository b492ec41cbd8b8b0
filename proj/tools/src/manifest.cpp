#include "hpmg/bench/experiments.hpp"

#include "hpmg/errors.hpp"

#include <fstream>

#ifndef HPMG_BUILD_ID
#define HPMG_BUILD_ID "unknown"
#endif

namespace hpmg::bench {

using nlohmann::json;

void SolverConfig::validate() const {
  if (p < 1 || p > kMaxDegree) throw InvalidArgument("SolverConfig: p out of range");
  if (!(penalty > 0.0)) throw InvalidArgument("SolverConfig: penalty must be positive");
  if (subdomains < 1) throw InvalidArgument("SolverConfig: need at least one subdomain");
  if (smoother.workers < subdomains)
    throw InvalidArgument("SolverConfig: workers must cover one traversal worker per subdomain");
  mg.validate();
}

json to_json(const SolverConfig& c) {
  return {
      {"p", c.p},
      {"basis", to_string(c.basis)},
      {"theta", c.theta},
      {"penalty", c.penalty},
      {"smoother",
       {{"variant", to_string(c.smoother.variant)},
        {"omega", c.smoother.omega},
        {"inverse", to_string(c.smoother.inverse)},
        {"workers", c.smoother.workers},
        {"traversal_workers", c.subdomains},
        {"task_executors", c.smoother.workers - c.subdomains}}},
      {"multigrid",
       {{"nu", c.mg.nu},
        {"coarse", to_string(c.mg.coarse)},
        {"cg_pre", c.mg.cg_pre},
        {"cg_post", c.mg.cg_post},
        {"cg_omega", c.mg.cg_omega},
        {"coarsest_iterations", c.mg.coarsest_iterations},
        {"exact_tolerance", c.mg.exact_tolerance},
        {"max_cycles", c.mg.max_cycles},
        {"tolerance", c.mg.tolerance},
        {"criterion", to_string(c.mg.criterion)}}},
      {"partition", {{"subdomains", c.subdomains}, {"mode", to_string(c.partition)}}},
  };
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig c;
  c.p = j.at("p").get<int>();
  c.basis = node_kind_from_string(j.at("basis").get<std::string>());
  c.theta = j.at("theta").get<double>();
  c.penalty = j.at("penalty").get<double>();
  const json& s = j.at("smoother");
  c.smoother.variant = smoother_variant_from_string(s.at("variant").get<std::string>());
  c.smoother.omega = s.at("omega").get<double>();
  c.smoother.inverse = inverse_mode_from_string(s.at("inverse").get<std::string>());
  c.smoother.workers = s.at("workers").get<int>();
  const json& m = j.at("multigrid");
  c.mg.nu = m.at("nu").get<int>();
  c.mg.coarse = coarse_mode_from_string(m.at("coarse").get<std::string>());
  c.mg.cg_pre = m.at("cg_pre").get<int>();
  c.mg.cg_post = m.at("cg_post").get<int>();
  c.mg.cg_omega = m.at("cg_omega").get<double>();
  c.mg.coarsest_iterations = m.at("coarsest_iterations").get<int>();
  c.mg.exact_tolerance = m.at("exact_tolerance").get<double>();
  c.mg.max_cycles = m.at("max_cycles").get<int>();
  c.mg.tolerance = m.at("tolerance").get<double>();
  c.mg.criterion = criterion_from_string(m.at("criterion").get<std::string>());
  const json& part = j.at("partition");
  c.subdomains = part.at("subdomains").get<int>();
  c.partition = partition_mode_from_string(part.at("mode").get<std::string>());
  return c;
}

std::string build_id() { return HPMG_BUILD_ID; }

json RunManifest::to_json() const {
  json mesh = json::array();
  for (int level : levels) {
    const Mesh m(2, level);
    mesh.push_back(json::parse(m.summary_json()));
  }
  return {
      {"experiment", experiment},
      {"config", bench::to_json(config)},
      {"problem", problem},
      {"p_list", p_list},
      {"levels", levels},
      {"meshes", mesh},
      {"seed", seed},
      {"build", build},
      {"wall_seconds", wall_seconds},
      {"extra", extra},
  };
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.experiment = j.at("experiment").get<std::string>();
  m.config = solver_config_from_json(j.at("config"));
  m.problem = j.at("problem").get<std::string>();
  m.p_list = j.at("p_list").get<std::vector<int>>();
  m.levels = j.at("levels").get<std::vector<int>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.build = j.value("build", std::string{});
  m.wall_seconds = j.value("wall_seconds", 0.0);
  m.extra = j.value("extra", json::object());
  return m;
}

void RunManifest::write(const std::filesystem::path& file) const {
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << to_json().dump(2) << '\n';
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot read " + file.string());
  return from_json(json::parse(is));
}

} // namespace hpmg::bench
