#include "hpmg/basis.hpp"
#include "hpmg/localops.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/multigrid.hpp"
#include "hpmg/problems.hpp"

#include <benchmark/benchmark.h>

using namespace hpmg;

namespace {

void BM_ApplyOperator(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Mesh mesh(2, 4);
  const LocalBlocks blocks = build_local_blocks(make_basis(NodeKind::GaussLobatto, p), 2, mesh.h());
  CellField u(mesh.num_cells(), blocks.cell_dofs);
  u.fill(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(apply_operator(mesh, blocks, u));
  state.counters["dofs/s"] =
      benchmark::Counter(static_cast<double>(u.size()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ApplyOperator)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_HVCycle(benchmark::State& state) {
  const std::vector<Mesh> meshes = build_hierarchy(2, static_cast<int>(state.range(0)));
  const CgHierarchy cg(meshes);
  VertexField b(meshes.front());
  b.fill(1.0);
  b.apply_mask();
  for (auto _ : state) benchmark::DoNotOptimize(h_vcycle(cg, meshes.front(), b, MgConfig{}));
}
BENCHMARK(BM_HVCycle)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

// Full solve to 1e-7 on the preconditioned criterion; args: p, level.
void BM_Solve(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const std::vector<Mesh> meshes = build_hierarchy(2, static_cast<int>(state.range(1)));
  const Partition part = partition(meshes.front(), PartitionMode::Balanced, 1);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, p);
  const ReferenceBlocks ref = build_reference_blocks(basis, 2);
  HpMultigrid mg(meshes, part, basis, ref, SmootherConfig{}, MgConfig{});
  const CellField b = build_rhs(ManufacturedProblem(ProblemKind::TwoPeak), meshes.front(), basis);
  const CellField u0(b.cells(), b.block());
  int cycles = 0;
  for (auto _ : state) cycles = mg.solve(b, u0).cycles;
  state.counters["cycles"] = cycles;
}
BENCHMARK(BM_Solve)->Args({2, 3})->Args({4, 3})->Args({2, 4})->Unit(benchmark::kMillisecond);

} // namespace
