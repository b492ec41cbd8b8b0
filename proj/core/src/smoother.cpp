#include "hpmg/smoother.hpp"

#include "hpmg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace hpmg {

namespace {

// out = A r for a row-major n x n array; same summation order as gemv().
void apply_dense(const double* a, std::size_t n, std::span<const double> r, std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i, a += n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[j] * r[j];
    out[i] = s;
  }
}

} // namespace

std::string to_string(SmootherVariant v) {
  switch (v) {
  case SmootherVariant::Vanilla: return "vanilla";
  case SmootherVariant::ThreeStage: return "stages";
  case SmootherVariant::Fused: return "fused";
  case SmootherVariant::Tasked: return "tasked";
  }
  return "?";
}

SmootherVariant smoother_variant_from_string(const std::string& name) {
  if (name == "vanilla") return SmootherVariant::Vanilla;
  if (name == "stages" || name == "three-stage") return SmootherVariant::ThreeStage;
  if (name == "fused") return SmootherVariant::Fused;
  if (name == "tasked") return SmootherVariant::Tasked;
  throw InvalidArgument("unknown smoother variant: " + name);
}

std::string to_string(InverseMode m) { return m == InverseMode::Precomputed ? "precomputed" : "percell"; }

InverseMode inverse_mode_from_string(const std::string& name) {
  if (name == "precomputed") return InverseMode::Precomputed;
  if (name == "percell") return InverseMode::PerCell;
  throw InvalidArgument("unknown inverse mode: " + name);
}

SweepCounters& SweepCounters::operator+=(const SweepCounters& o) {
  cell_reads += o.cell_reads;
  cell_writes += o.cell_writes;
  neighbour_reads += o.neighbour_reads;
  cell_facet_reads += o.cell_facet_reads;
  cell_facet_writes += o.cell_facet_writes;
  interior_flux_accesses += o.interior_flux_accesses;
  boundary_flux_accesses += o.boundary_flux_accesses;
  flux_evaluations += o.flux_evaluations;
  tasks_spawned += o.tasks_spawned;
  tasks_executed += o.tasks_executed;
  traversals += o.traversals;
  return *this;
}

double accesses_per_cell(const SweepCounters& c, const Mesh& mesh, int p) {
  const double cells = static_cast<double>(mesh.num_cells());
  const double interior = static_cast<double>(mesh.num_interior_facets());
  const int d = mesh.dim();
  double cell_units = static_cast<double>(c.cell_reads - c.neighbour_reads + c.cell_writes) / cells;
  double facet_units = static_cast<double>(c.cell_facet_reads + c.cell_facet_writes) / cells;
  if (interior > 0.0) {
    cell_units += static_cast<double>(c.neighbour_reads) / (2.0 * interior) * (2.0 * d);
    facet_units += static_cast<double>(c.interior_flux_accesses) / interior * d;
  }
  const double cell_block = std::pow(p + 1.0, d);
  const double facet_block = std::pow(p + 1.0, d - 1);
  return cell_units * cell_block + facet_units * facet_block;
}

Smoother::Smoother(const Mesh& mesh, const Partition& part, const ReferenceBlocks& ref, SmootherConfig cfg)
    : mesh_(mesh), part_(part), ref_(ref), cfg_(cfg), blocks_(scale_blocks(ref, mesh.h())), slots_(mesh, part),
      faces_(mesh.faces_per_cell()), n_(blocks_.cell_dofs), nf_(blocks_.facet_dofs) {
  if (ref.unit.dim != mesh.dim()) throw InvalidArgument("Smoother: block and mesh dimension differ");
  if (!(cfg.omega >= 0.0 && cfg.omega <= 1.0)) throw InvalidArgument("Smoother: omega must lie in [0,1]");
  if (cfg.workers < 1) throw InvalidArgument("Smoother: need at least one worker");

  const std::size_t cells = mesh.num_cells();
  slot_.resize(cells * static_cast<std::size_t>(faces_));
  neighbour_.resize(cells * static_cast<std::size_t>(faces_));
  mask_.resize(cells);
  computes_flux_.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    mask_[c] = mesh.boundary_mask(c);
    const int owner = part.owner(c);
    unsigned first = 0;
    for (int face = 0; face < faces_; ++face) {
      const std::size_t f = mesh.cell_facet(c, face);
      const std::size_t k = c * static_cast<std::size_t>(faces_) + static_cast<std::size_t>(face);
      slot_[k] = slots_.slot(f, owner);
      const std::size_t nb = mesh.neighbour(c, face);
      neighbour_[k] = nb;
      // The first cell of this subdomain's traversal to touch the facet
      // evaluates its flux.
      if (nb == kNoCell || part.owner(nb) != owner || nb > c) first |= 1u << face;
    }
    computes_flux_[c] = first;
  }

  part_facets_.resize(static_cast<std::size_t>(part.parts()));
  for (int s = 0; s < part.parts(); ++s) {
    auto& list = part_facets_[static_cast<std::size_t>(s)];
    for (std::size_t c = part.begin(s); c < part.end(s); ++c)
      for (int face = 0; face < faces_; ++face)
        if ((computes_flux_[c] >> face) & 1u) list.push_back(mesh.cell_facet(c, face));
    std::sort(list.begin(), list.end());
  }

  u_ = CellField(cells, n_);
  b_ = CellField(cells, n_);
  proj_ = FacetField(slots_.num_slots(), nf_, FacetLayout::Projections);
  flux_ = FacetField(slots_.num_slots(), nf_, FacetLayout::Fluxes);

  if (cfg_.variant == SmootherVariant::Vanilla) {
    u_old_ = CellField(cells, n_);
    for (std::size_t c = 0; c < cells; ++c)
      if (!cell_matrices_.count(mask_[c])) cell_matrices_.emplace(mask_[c], cell_matrix(blocks_, mask_[c]));
    for (int face = 0; face < faces_; ++face) neighbour_blocks_.push_back(neighbour_block(blocks_, face));
  }
  if (cfg_.variant == SmootherVariant::Tasked) {
    rcell_ = CellField(cells, n_);
    task_state_ = std::make_unique<std::atomic<std::uint8_t>[]>(cells);
    for (std::size_t c = 0; c < cells; ++c) task_state_[c].store(0, std::memory_order_relaxed);
    if (cfg_.inverse == InverseMode::PerCell) inverses_.assign(cells * n_ * n_, 0.0);
    pool_ = std::make_unique<TaskPool>(std::max(0, cfg_.workers - part.parts()));
  }
}

Smoother::~Smoother() { drain(); }

void Smoother::set_rhs(const CellField& b) {
  if (b.size() != b_.size()) throw InvalidArgument("Smoother::set_rhs: size mismatch");
  drain();
  b_ = b;
  // Deferred residuals depend on b.
  if (cfg_.variant == SmootherVariant::Tasked) warm_ = false;
}

void Smoother::set_solution(const CellField& u) {
  if (u.size() != u_.size()) throw InvalidArgument("Smoother::set_solution: size mismatch");
  drain();
  u_ = u;
  warm_ = false;
}

void Smoother::reset_counters() {
  last_ = {};
  total_ = {};
  tasks_executed_.store(0);
}

void Smoother::run_parts(const std::function<void(int, SweepCounters&)>& body) {
  const int parts = part_.parts();
  std::vector<SweepCounters> cnt(static_cast<std::size_t>(parts));
  if (parts == 1) {
    body(0, cnt[0]);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(parts));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(parts - 1));
    auto guarded = [&](int s) {
      try {
        body(s, cnt[static_cast<std::size_t>(s)]);
      } catch (...) {
        errors[static_cast<std::size_t>(s)] = std::current_exception();
      }
    };
    for (int s = 1; s < parts; ++s) threads.emplace_back(guarded, s);
    guarded(0);
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  SweepCounters sum;
  for (const auto& c : cnt) sum += c;
  last_ += sum;
  total_ += sum;
}

void Smoother::cell_residual(std::size_t c, std::span<double> r) const {
  const auto u = u_.cell(c);
  const auto b = b_.cell(c);
  const double* a = blocks_.acc.data();
  for (std::size_t i = 0; i < n_; ++i, a += n_) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += a[j] * u[j];
    r[i] = b[i] - s;
  }
}

void Smoother::inverse_for(std::size_t c, std::span<const double> r, std::span<double> out) const {
  if (cfg_.inverse == InverseMode::Precomputed) {
    apply_dense(blocks_.schur_inverse.data(), n_, r, out);
  } else if (cfg_.variant == SmootherVariant::Tasked) {
    apply_dense(inverses_.data() + c * n_ * n_, n_, r, out);
  } else {
    const Matrix inv = invert(assemble_schur(ref_, mesh_.h()));
    apply_dense(inv.data(), n_, r, out);
  }
}

void Smoother::project_cell(std::size_t c, SweepCounters& cnt) {
  const auto u = u_.cell(c);
  for (int face = 0; face < faces_; ++face) {
    const bool bnd = boundary(c, face);
    const FaceRole role = face_role(face, bnd);
    gemv(blocks_.projection(face, bnd), u, proj_.side(slot(c, face), role.minus ? 0 : 1));
    ++cnt.cell_facet_writes;
  }
}

void Smoother::spawn_tasks(std::size_t c, SweepCounters& cnt) {
  const bool percell = cfg_.inverse == InverseMode::PerCell;
  task_state_[c].store(1, std::memory_order_relaxed);
  cnt.tasks_spawned += percell ? 2 : 1;
  pool_->submit([this, c, percell] {
    try {
      cell_residual(c, rcell_.cell(c));
      if (percell) {
        const Matrix inv = invert(assemble_schur(ref_, mesh_.h()));
        std::copy(inv.data(), inv.data() + n_ * n_, inverses_.begin() + static_cast<std::ptrdiff_t>(c * n_ * n_));
      }
    } catch (...) {
      std::lock_guard lock(task_error_mutex_);
      if (!task_error_) task_error_ = std::current_exception();
    }
    tasks_executed_.fetch_add(percell ? 2 : 1, std::memory_order_relaxed);
    task_state_[c].store(2, std::memory_order_release);
    task_state_[c].notify_all();
  });
}

void Smoother::wait_task(std::size_t c) {
  std::uint8_t s = task_state_[c].load(std::memory_order_acquire);
  while (s == 1) {
    task_state_[c].wait(1, std::memory_order_acquire);
    s = task_state_[c].load(std::memory_order_acquire);
  }
  if (s == 0) throw ContractViolation("tasked sweep: cell waits on a task that was never spawned");
  task_state_[c].store(0, std::memory_order_relaxed);
  std::lock_guard lock(task_error_mutex_);
  if (task_error_) std::rethrow_exception(task_error_);
}

void Smoother::drain() {
  if (!task_state_) return;
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    while (task_state_[c].load(std::memory_order_acquire) == 1) task_state_[c].wait(1, std::memory_order_acquire);
    task_state_[c].store(0, std::memory_order_relaxed);
  }
}

void Smoother::warm_up(const CellHook& before) {
  drain();
  last_ = {};
  const bool tasked = cfg_.variant == SmootherVariant::Tasked;
  run_parts([&](int s, SweepCounters& cnt) {
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      ++cnt.cell_reads;
      if (before) {
        before(c, u_.cell(c));
        ++cnt.cell_writes;
      }
      project_cell(c, cnt);
      if (tasked) spawn_tasks(c, cnt);
    }
    if (s == 0) ++cnt.traversals;
  });
  exchange_interface(proj_, slots_);
  warm_ = true;
  last_.tasks_executed = tasks_executed_.load();
}

void Smoother::sweep() {
  switch (cfg_.variant) {
  case SmootherVariant::Vanilla: sweep_vanilla(); break;
  case SmootherVariant::ThreeStage: sweep_three_stage(); break;
  case SmootherVariant::Fused: sweep_fused(); break;
  case SmootherVariant::Tasked: sweep_tasked(); break;
  }
}

void Smoother::sweep_vanilla() {
  if (cfg_.variant != SmootherVariant::Vanilla) throw ContractViolation("sweep_vanilla: smoother not built for Vanilla");
  drain();
  last_ = {};
  run_parts([&](int s, SweepCounters& cnt) {
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      auto src = u_.cell(c);
      std::copy(src.begin(), src.end(), u_old_.cell(c).begin());
      ++cnt.cell_reads;
      ++cnt.cell_writes;
    }
  });
  const double omega = cfg_.omega;
  run_parts([&](int s, SweepCounters& cnt) {
    std::vector<double> r(n_), tmp(n_);
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      const auto b = b_.cell(c);
      const auto uo = u_old_.cell(c);
      gemv(cell_matrices_.at(mask_[c]), uo, r);
      for (std::size_t i = 0; i < n_; ++i) r[i] = b[i] - r[i];
      cnt.cell_reads += 2;
      for (int face = 0; face < faces_; ++face) {
        const std::size_t nb = neighbour_[c * static_cast<std::size_t>(faces_) + static_cast<std::size_t>(face)];
        if (nb == kNoCell) continue;
        gemv_add(neighbour_blocks_[static_cast<std::size_t>(face)], u_old_.cell(nb), r, -1.0);
        ++cnt.cell_reads;
        ++cnt.neighbour_reads;
      }
      inverse_for(c, r, tmp);
      auto u = u_.cell(c);
      for (std::size_t i = 0; i < n_; ++i) u[i] = uo[i] + omega * tmp[i];
      ++cnt.cell_writes;
    }
    if (s == 0) ++cnt.traversals;
  });
  warm_ = false;
}

void Smoother::stage_projection() {
  run_parts([&](int s, SweepCounters& cnt) {
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      ++cnt.cell_reads;
      project_cell(c, cnt);
    }
    if (s == 0) ++cnt.traversals;
  });
  exchange_interface(proj_, slots_);
}

void Smoother::stage_fluxes() {
  run_parts([&](int s, SweepCounters& cnt) {
    for (std::size_t f : part_facets_[static_cast<std::size_t>(s)]) {
      const std::size_t sl = slots_.slot(f, s);
      const bool bnd = mesh_.facet(f).boundary;
      apply_flux(proj_.side(sl, 0), proj_.side(sl, 1), bnd, flux_.record(sl));
      ++cnt.flux_evaluations;
      if (bnd)
        cnt.boundary_flux_accesses += 2;
      else
        cnt.interior_flux_accesses += 3;
    }
    if (s == 0) ++cnt.traversals;
  });
}

void Smoother::sweep_three_stage() {
  drain();
  last_ = {};
  stage_projection();
  stage_fluxes();
  const double omega = cfg_.omega;
  run_parts([&](int s, SweepCounters& cnt) {
    std::vector<double> r(n_), tmp(n_);
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      cell_residual(c, r);
      cnt.cell_reads += 2;
      for (int face = 0; face < faces_; ++face) {
        const bool bnd = boundary(c, face);
        gemv_add(blocks_.lifting(face, bnd), flux_.record(slot(c, face)), r, -1.0);
        ++cnt.cell_facet_reads;
      }
      inverse_for(c, r, tmp);
      auto u = u_.cell(c);
      for (std::size_t i = 0; i < n_; ++i) u[i] += omega * tmp[i];
      ++cnt.cell_writes;
    }
    if (s == 0) ++cnt.traversals;
  });
  warm_ = false;
}

void Smoother::fused_traversal(bool update, const ResidualHook& hook, CellField* r_out, bool tasked) {
  const double omega = cfg_.omega;
  run_parts([&](int s, SweepCounters& cnt) {
    std::vector<double> r(n_), tmp(n_);
    for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
      if (tasked) {
        wait_task(c);
        const auto rc = rcell_.cell(c);
        std::copy(rc.begin(), rc.end(), r.begin());
      } else {
        cell_residual(c, r);
      }
      cnt.cell_reads += 2;
      const unsigned first = computes_flux_[c];
      for (int face = 0; face < faces_; ++face) {
        const bool bnd = boundary(c, face);
        const std::size_t sl = slot(c, face);
        if ((first >> face) & 1u) {
          apply_flux(proj_.side(sl, 0), proj_.side(sl, 1), bnd, flux_.record(sl));
          ++cnt.flux_evaluations;
          if (bnd)
            cnt.boundary_flux_accesses += 2;
          else
            cnt.interior_flux_accesses += 3;
        }
        gemv_add(blocks_.lifting(face, bnd), flux_.record(sl), r, -1.0);
        ++cnt.cell_facet_reads;
      }
      if (hook) hook(c, r);
      if (r_out) std::copy(r.begin(), r.end(), r_out->cell(c).begin());
      if (!update) continue;
      inverse_for(c, r, tmp);
      auto u = u_.cell(c);
      for (std::size_t i = 0; i < n_; ++i) u[i] += omega * tmp[i];
      ++cnt.cell_writes;
      project_cell(c, cnt);
      if (tasked) spawn_tasks(c, cnt);
    }
    if (s == 0) ++cnt.traversals;
  });
  if (update) exchange_interface(proj_, slots_);
  last_.tasks_executed = tasks_executed_.load();
}

void Smoother::sweep_fused() {
  if (!warm_) throw ContractViolation("sweep_fused: projections are not current (warm_up missing)");
  drain();
  last_ = {};
  fused_traversal(true, {}, nullptr, false);
}

void Smoother::sweep_tasked() {
  if (cfg_.variant != SmootherVariant::Tasked) throw ContractViolation("sweep_tasked: smoother not built for Tasked");
  if (!warm_) throw ContractViolation("sweep_tasked: projections are not current (warm_up missing)");
  last_ = {};
  fused_traversal(true, {}, nullptr, true);
}

void Smoother::residual(CellField& r, const ResidualHook& hook) {
  if (r.size() != u_.size()) r = CellField(mesh_.num_cells(), n_);
  last_ = {};
  switch (cfg_.variant) {
  case SmootherVariant::Vanilla:
    run_parts([&](int s, SweepCounters& cnt) {
      for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
        auto rc = r.cell(c);
        const auto b = b_.cell(c);
        gemv(cell_matrices_.at(mask_[c]), u_.cell(c), rc);
        for (std::size_t i = 0; i < n_; ++i) rc[i] = b[i] - rc[i];
        cnt.cell_reads += 2;
        for (int face = 0; face < faces_; ++face) {
          const std::size_t nb = neighbour_[c * static_cast<std::size_t>(faces_) + static_cast<std::size_t>(face)];
          if (nb == kNoCell) continue;
          gemv_add(neighbour_blocks_[static_cast<std::size_t>(face)], u_.cell(nb), rc, -1.0);
          ++cnt.cell_reads;
          ++cnt.neighbour_reads;
        }
        if (hook) hook(c, rc);
      }
      if (s == 0) ++cnt.traversals;
    });
    break;
  case SmootherVariant::ThreeStage:
    stage_projection();
    stage_fluxes();
    run_parts([&](int s, SweepCounters& cnt) {
      for (std::size_t c = part_.begin(s); c < part_.end(s); ++c) {
        auto rc = r.cell(c);
        cell_residual(c, rc);
        cnt.cell_reads += 2;
        for (int face = 0; face < faces_; ++face) {
          gemv_add(blocks_.lifting(face, boundary(c, face)), flux_.record(slot(c, face)), rc, -1.0);
          ++cnt.cell_facet_reads;
        }
        if (hook) hook(c, rc);
      }
      if (s == 0) ++cnt.traversals;
    });
    warm_ = true;
    break;
  case SmootherVariant::Fused:
  case SmootherVariant::Tasked:
    if (!warm_) throw ContractViolation("residual: projections are not current (warm_up missing)");
    if (cfg_.variant == SmootherVariant::Fused) drain();
    fused_traversal(false, hook, &r, cfg_.variant == SmootherVariant::Tasked);
    break;
  }
}

CellField compute_residual(const Mesh& mesh, const LocalBlocks& blocks, const CellField& u, const CellField& b) {
  const std::size_t n = blocks.cell_dofs;
  const int faces = mesh.faces_per_cell();
  FacetField proj(mesh.num_facets(), blocks.facet_dofs, FacetLayout::Projections);
  FacetField flux(mesh.num_facets(), blocks.facet_dofs, FacetLayout::Fluxes);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int face = 0; face < faces; ++face) {
      const std::size_t f = mesh.cell_facet(c, face);
      const bool bnd = mesh.facet(f).boundary;
      gemv(blocks.projection(face, bnd), u.cell(c), proj.side(f, face_role(face, bnd).minus ? 0 : 1));
    }
  for (std::size_t f = 0; f < mesh.num_facets(); ++f)
    apply_flux(proj.side(f, 0), proj.side(f, 1), mesh.facet(f).boundary, flux.record(f));
  CellField r(mesh.num_cells(), n);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    auto rc = r.cell(c);
    gemv(blocks.acc, u.cell(c), rc);
    const auto bc = b.cell(c);
    for (std::size_t i = 0; i < n; ++i) rc[i] = bc[i] - rc[i];
    for (int face = 0; face < faces; ++face) {
      const std::size_t f = mesh.cell_facet(c, face);
      gemv_add(blocks.lifting(face, mesh.facet(f).boundary), flux.record(f), rc, -1.0);
    }
  }
  return r;
}

CellField apply_operator(const Mesh& mesh, const LocalBlocks& blocks, const CellField& u) {
  CellField zero(u.cells(), u.block());
  CellField r = compute_residual(mesh, blocks, u, zero);
  for (double& v : r.values()) v = -v;
  return r;
}

} // namespace hpmg
