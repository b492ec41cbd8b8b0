#include "hpmg/basis.hpp"
#include "hpmg/localops.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/smoother.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hpmg;

namespace {

// One sweep of `variant` on 3^level x 3^level cells; args: p, level, subdomains, workers.
void BM_Sweep(benchmark::State& state, SmootherVariant variant, InverseMode inverse) {
  const int p = static_cast<int>(state.range(0));
  const int level = static_cast<int>(state.range(1));
  const int parts = static_cast<int>(state.range(2));
  const Mesh mesh(2, level);
  const Partition part = partition(mesh, PartitionMode::Balanced, parts);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, p);
  const ReferenceBlocks ref = build_reference_blocks(basis, 2);
  SmootherConfig cfg;
  cfg.variant = variant;
  cfg.inverse = inverse;
  cfg.workers = static_cast<int>(state.range(3));
  Smoother s(mesh, part, ref, cfg);
  CellField b(mesh.num_cells(), ref.unit.cell_dofs);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : b.values()) v = dist(rng);
  s.set_rhs(b);
  if (variant == SmootherVariant::Fused || variant == SmootherVariant::Tasked) s.warm_up();
  for (auto _ : state) {
    s.sweep();
    benchmark::DoNotOptimize(s.solution().values().data());
  }
  const double dofs = static_cast<double>(mesh.num_cells() * ref.unit.cell_dofs);
  state.counters["dofs/s"] = benchmark::Counter(dofs, benchmark::Counter::kIsIterationInvariantRate);
  state.counters["accesses/cell"] = accesses_per_cell(s.last_counters(), mesh, p);
}

void sweep_args(benchmark::internal::Benchmark* b) {
  for (int p : {1, 2, 4, 6}) b->Args({p, 4, 1, 1});
  b->Args({3, 4, 4, 4});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void tasked_args(benchmark::internal::Benchmark* b) {
  for (int p : {1, 2, 4, 6}) b->Args({p, 4, 1, 2});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK_CAPTURE(BM_Sweep, vanilla, SmootherVariant::Vanilla, InverseMode::Precomputed)->Apply(sweep_args);
BENCHMARK_CAPTURE(BM_Sweep, stages, SmootherVariant::ThreeStage, InverseMode::Precomputed)->Apply(sweep_args);
BENCHMARK_CAPTURE(BM_Sweep, fused, SmootherVariant::Fused, InverseMode::Precomputed)->Apply(sweep_args);
BENCHMARK_CAPTURE(BM_Sweep, fused_percell, SmootherVariant::Fused, InverseMode::PerCell)->Apply(sweep_args);
BENCHMARK_CAPTURE(BM_Sweep, tasked, SmootherVariant::Tasked, InverseMode::Precomputed)->Apply(tasked_args);
BENCHMARK_CAPTURE(BM_Sweep, tasked_percell, SmootherVariant::Tasked, InverseMode::PerCell)->Apply(tasked_args);
BENCHMARK_MAIN();
