#include "hpmg/multigrid.hpp"

#include "hpmg/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace hpmg {

std::string to_string(CoarseMode m) { return m == CoarseMode::Exact ? "exact" : "vcycle"; }

CoarseMode coarse_mode_from_string(const std::string& name) {
  if (name == "exact") return CoarseMode::Exact;
  if (name == "vcycle") return CoarseMode::SingleVCycle;
  throw InvalidArgument("unknown coarse mode: " + name);
}

std::string to_string(Criterion c) { return c == Criterion::Preconditioned ? "prec" : "unprec"; }

Criterion criterion_from_string(const std::string& name) {
  if (name == "prec") return Criterion::Preconditioned;
  if (name == "unprec") return Criterion::Unpreconditioned;
  throw InvalidArgument("unknown criterion: " + name);
}

void MgConfig::validate() const {
  if (nu < 1) throw InvalidArgument("MgConfig: nu must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("MgConfig: tolerance must be positive");
  if (max_cycles < 0) throw InvalidArgument("MgConfig: max_cycles must be >= 0");
  if (cg_pre < 0 || cg_post < 0 || coarsest_iterations < 0) throw InvalidArgument("MgConfig: negative smoothing count");
  if (!(cg_omega > 0.0 && cg_omega <= 1.0)) throw InvalidArgument("MgConfig: cg_omega must lie in (0,1]");
}

// ---------------------------------------------------------------------------
// CG hierarchy

CgHierarchy::CgHierarchy(const std::vector<Mesh>& meshes) {
  if (meshes.empty()) throw InvalidArgument("CgHierarchy: empty mesh list");
  const NodalBasis1D q1 = make_basis(NodeKind::GaussLobatto, 1);
  for (const Mesh& m : meshes) {
    Level L;
    L.dim = m.dim();
    L.n = m.cells_per_axis();
    L.element = build_coarse_ops(q1, m.dim(), m.h()).element_stiffness;
    const std::size_t corners = std::size_t{1} << m.dim();
    L.boundary.resize(m.num_vertices());
    for (std::size_t v = 0; v < m.num_vertices(); ++v) L.boundary[v] = m.vertex_on_boundary(v) ? 1 : 0;
    L.cell_vertices.resize(m.num_cells() * corners);
    L.diag.assign(m.num_vertices(), 0.0);
    for (std::size_t lex = 0; lex < m.num_cells(); ++lex) {
      const std::size_t c = m.cell_from_lexicographic(lex);
      for (std::size_t k = 0; k < corners; ++k) {
        const std::size_t v = m.cell_vertex(c, static_cast<int>(k));
        L.cell_vertices[lex * corners + k] = v;
        L.diag[v] += L.element(k, k);
      }
    }
    levels_.push_back(std::move(L));
  }
  for (std::size_t k = 1; k < levels_.size(); ++k)
    if (levels_[k].n * 3 != levels_[k - 1].n) throw InvalidArgument("CgHierarchy: meshes must be nested, finest first");
}

void CgHierarchy::mask(std::size_t k, std::span<double> x) const {
  const auto& b = levels_[k].boundary;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (b[v]) x[v] = 0.0;
}

void CgHierarchy::apply(std::size_t k, std::span<const double> x, std::span<double> y) const {
  const Level& L = levels_[k];
  const std::size_t corners = L.element.rows();
  std::fill(y.begin(), y.end(), 0.0);
  std::array<double, 8> xl{};
  const std::size_t cells = L.cell_vertices.size() / corners;
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t* cv = L.cell_vertices.data() + c * corners;
    for (std::size_t a = 0; a < corners; ++a) xl[a] = x[cv[a]];
    for (std::size_t a = 0; a < corners; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < corners; ++b) s += L.element(a, b) * xl[b];
      y[cv[a]] += s;
    }
  }
  mask(k, y);
}

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

} // namespace

void CgHierarchy::restrict_to_coarse(std::size_t k, std::span<const double> fine, std::span<double> coarse) const {
  const Level& F = levels_[k];
  const Level& C = levels_[k + 1];
  const int d = F.dim;
  const std::size_t nf = F.n + 1;
  const std::size_t nc = C.n + 1;
  const std::size_t offsets = ipow(5, d);
  for (std::size_t V = 0; V < coarse.size(); ++V) {
    if (C.boundary[V]) {
      coarse[V] = 0.0;
      continue;
    }
    std::array<std::size_t, 3> I{};
    std::size_t rest = V;
    for (int a = 0; a < d; ++a) {
      I[a] = rest % nc;
      rest /= nc;
    }
    double s = 0.0;
    for (std::size_t o = 0; o < offsets; ++o) {
      std::size_t t = o;
      double w = 1.0;
      std::size_t idx = 0;
      std::size_t stride = 1;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        const int off = static_cast<int>(t % 5) - 2;
        t /= 5;
        const long i = static_cast<long>(3 * I[a]) + off;
        if (i < 0 || i > static_cast<long>(F.n)) {
          inside = false;
          break;
        }
        w *= 1.0 - std::abs(off) / 3.0;
        idx += static_cast<std::size_t>(i) * stride;
        stride *= nf;
      }
      if (inside) s += w * fine[idx];
    }
    coarse[V] = s;
  }
}

void CgHierarchy::prolongate_add(std::size_t k, std::span<const double> coarse, std::span<double> fine) const {
  const Level& F = levels_[k];
  const Level& C = levels_[k + 1];
  const int d = F.dim;
  const std::size_t nf = F.n + 1;
  const std::size_t nc = C.n + 1;
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t v = 0; v < fine.size(); ++v) {
    if (F.boundary[v]) continue;
    std::array<std::size_t, 3> i{};
    std::size_t rest = v;
    for (int a = 0; a < d; ++a) {
      i[a] = rest % nf;
      rest /= nf;
    }
    double s = 0.0;
    for (std::size_t c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t idx = 0;
      std::size_t stride = 1;
      for (int a = 0; a < d; ++a) {
        const std::size_t I = i[a] / 3;
        const double t = static_cast<double>(i[a] % 3) / 3.0;
        const bool upper = (c >> a) & 1u;
        w *= upper ? t : 1.0 - t;
        idx += (upper ? std::min(I + 1, nc - 1) : I) * stride;
        stride *= nc;
      }
      if (w != 0.0) s += w * coarse[idx];
    }
    fine[v] += s;
  }
}

void CgHierarchy::jacobi(std::size_t k, std::span<const double> b, std::span<double> x, int steps, double omega) const {
  const Level& L = levels_[k];
  std::vector<double> ax(x.size());
  for (int it = 0; it < steps; ++it) {
    apply(k, x, ax);
    for (std::size_t v = 0; v < x.size(); ++v)
      x[v] = L.boundary[v] ? 0.0 : x[v] + omega * (b[v] - ax[v]) / L.diag[v];
  }
}

void h_vcycle(const CgHierarchy& cg, std::size_t k, std::span<const double> b, std::span<double> x, const MgConfig& cfg) {
  if (k + 1 == cg.levels()) {
    cg.jacobi(k, b, x, cfg.coarsest_iterations, cfg.cg_omega);
    return;
  }
  cg.jacobi(k, b, x, cfg.cg_pre, cfg.cg_omega);
  std::vector<double> r(x.size());
  cg.apply(k, x, r);
  for (std::size_t v = 0; v < r.size(); ++v) r[v] = b[v] - r[v];
  cg.mask(k, r);
  std::vector<double> bc(cg.vertices(k + 1));
  std::vector<double> xc(cg.vertices(k + 1), 0.0);
  cg.restrict_to_coarse(k, r, bc);
  h_vcycle(cg, k + 1, bc, xc, cfg);
  cg.prolongate_add(k, xc, x);
  cg.mask(k, x);
  cg.jacobi(k, b, x, cfg.cg_post, cfg.cg_omega);
}

VertexField h_vcycle(const CgHierarchy& cg, const Mesh& finest, const VertexField& b, const MgConfig& cfg) {
  VertexField x(finest);
  if (x.size() != cg.vertices(0)) throw InvalidArgument("h_vcycle: mesh does not match the hierarchy");
  h_vcycle(cg, 0, b.values(), x.values(), cfg);
  return x;
}

void cg_solve(const CgHierarchy& cg, std::span<const double> b, std::span<double> x, const MgConfig& cfg) {
  std::fill(x.begin(), x.end(), 0.0);
  if (cfg.coarse == CoarseMode::SingleVCycle) {
    h_vcycle(cg, 0, b, x, cfg);
    return;
  }
  const double r0 = norm(b, NormKind::Linf);
  if (r0 == 0.0) return;
  std::vector<double> r(x.size());
  double best = r0;
  int stalled = 0;
  constexpr int kMaxVCycles = 500;
  constexpr int kDivergenceWindow = 50;
  for (int it = 1; it <= kMaxVCycles; ++it) {
    h_vcycle(cg, 0, b, x, cfg);
    cg.apply(0, x, r);
    for (std::size_t v = 0; v < r.size(); ++v) r[v] = b[v] - r[v];
    cg.mask(0, r);
    const double res = norm(r, NormKind::Linf);
    if (!std::isfinite(res) || (it >= kDivergenceWindow && res > r0))
      throw ConvergenceError("exact coarse solve: residual grew over 50 V-cycles");
    if (res <= cfg.exact_tolerance * r0) return;
    // Round-off floor: no halving of the best residual for 3 cycles.
    if (res < 0.5 * best) {
      best = res;
      stalled = 0;
    } else if (++stalled >= 3 && best <= 1e-10 * r0) {
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// hp two-grid driver

void CycleTrace::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "cycle,r_l2,r_linf,rprec_l2,rprec_linf\n";
  for (const auto& r : records)
    os << r.cycle << ',' << r.r_l2 << ',' << r.r_linf << ',' << r.rprec_l2 << ',' << r.rprec_linf << '\n';
  os.precision(old);
}

HpMultigrid::HpMultigrid(const std::vector<Mesh>& meshes, const Partition& part, const NodalBasis1D& basis,
                         const ReferenceBlocks& ref, SmootherConfig smoother_cfg, MgConfig cfg)
    : mesh_(meshes.front()), cfg_(cfg), cg_(meshes), coarse_(build_coarse_ops(basis, meshes.front().dim(), meshes.front().h())),
      smoother_(meshes.front(), part, ref, smoother_cfg), corners_(std::size_t{1} << meshes.front().dim()) {
  cfg_.validate();
  const std::size_t cells = mesh_.num_cells();
  cell_vertices_.resize(cells * corners_);
  lex_cells_.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < corners_; ++k) cell_vertices_[c * corners_ + k] = mesh_.cell_vertex(c, static_cast<int>(k));
    lex_cells_[mesh_.lexicographic(c)] = c;
  }
  contributions_.assign(cells * corners_, 0.0);
}

void HpMultigrid::gather(std::span<const double> contrib, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c : lex_cells_)
    for (std::size_t k = 0; k < corners_; ++k) out[cell_vertices_[c * corners_ + k]] += contrib[c * corners_ + k];
  cg_.mask(0, out);
}

VertexField HpMultigrid::restrict_residual(const CellField& r) const {
  std::vector<double> contrib(contributions_.size());
  const Matrix& P = coarse_.prolongation;
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    const auto rc = r.cell(c);
    for (std::size_t k = 0; k < corners_; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rc.size(); ++i) s += P(i, k) * rc[i];
      contrib[c * corners_ + k] = s;
    }
  }
  VertexField out(mesh_);
  gather(contrib, out.values());
  return out;
}

CellField HpMultigrid::prolongate(const VertexField& e) const {
  const Matrix& P = coarse_.prolongation;
  CellField u(mesh_.num_cells(), P.rows());
  std::vector<double> ec(corners_);
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    for (std::size_t k = 0; k < corners_; ++k) ec[k] = e[cell_vertices_[c * corners_ + k]];
    gemv_add(P, ec, u.cell(c));
  }
  return u;
}

CellField HpMultigrid::coarse_grid_correction(const CellField& u, const CellField& b) {
  smoother_.set_rhs(b);
  smoother_.set_solution(u);
  smoother_.warm_up();
  CellField r;
  smoother_.residual(r);
  const VertexField bc = restrict_residual(r);
  VertexField e(mesh_);
  cg_solve(cg_, bc.values(), e.values(), cfg_);
  return prolongate(e);
}

namespace {

void difference_norms(const CellField& a, const CellField& b, double& l2, double& linf) {
  double s = 0.0;
  double m = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double d = av[k] - bv[k];
    s += d * d;
    m = std::max(m, std::abs(d));
  }
  l2 = std::sqrt(s);
  linf = m;
}

double ratio(double x, double ref) { return ref > 0.0 ? x / ref : x; }

} // namespace

SolveResult HpMultigrid::solve(const CellField& b, const CellField& u0, const StopRule& stop) {
  const LocalBlocks& blocks = smoother_.blocks();
  const Matrix& P = coarse_.prolongation;
  const std::size_t n = blocks.cell_dofs;

  SolveResult res;
  smoother_.set_rhs(b);
  smoother_.set_solution(u0);
  const std::uint64_t t_start = smoother_.total_counters().traversals;
  smoother_.warm_up();

  {
    const CellField r0 = compute_residual(mesh_, blocks, u0, b);
    res.trace.r0_l2 = r0.norm(NormKind::L2);
    res.trace.r0_linf = r0.norm(NormKind::Linf);
  }
  if (res.trace.r0_l2 == 0.0) {
    res.u = u0;
    res.converged = true;
    res.traversals = smoother_.total_counters().traversals - t_start;
    return res;
  }

  CellField u_old = u0;
  CellField r;
  VertexField bc(mesh_);
  VertexField e(mesh_);
  auto restrict_hook = [&](std::size_t c, std::span<const double> rc) {
    double* out = contributions_.data() + c * corners_;
    for (std::size_t k = 0; k < corners_; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += P(i, k) * rc[i];
      out[k] = s;
    }
  };
  auto prolong_hook = [&](std::size_t c, std::span<double> uc) {
    std::array<double, 8> ec{};
    for (std::size_t k = 0; k < corners_; ++k) ec[k] = e[cell_vertices_[c * corners_ + k]];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < corners_; ++k) s += P(i, k) * ec[k];
      uc[i] += s;
    }
  };

  for (int k = 1; k <= cfg_.max_cycles; ++k) {
    for (int s = 0; s < cfg_.nu; ++s) smoother_.sweep();
    smoother_.residual(r, restrict_hook);
    gather(contributions_, bc.values());
    cg_solve(cg_, bc.values(), e.values(), cfg_);
    smoother_.warm_up(prolong_hook);

    const CellField& u = smoother_.solution();
    CycleRecord rec;
    rec.cycle = k;
    double p2 = 0.0;
    double pinf = 0.0;
    difference_norms(u, u_old, p2, pinf);
    if (k == 1) {
      res.trace.rprec1_l2 = p2;
      res.trace.rprec1_linf = pinf;
    }
    rec.rprec_l2 = ratio(p2, res.trace.rprec1_l2);
    rec.rprec_linf = ratio(pinf, res.trace.rprec1_linf);
    u_old = u;
    const CellField rk = compute_residual(mesh_, blocks, u, b);
    rec.r_l2 = rk.norm(NormKind::L2) / res.trace.r0_l2;
    rec.r_linf = rk.norm(NormKind::Linf) / res.trace.r0_linf;
    res.trace.records.push_back(rec);
    res.cycles = k;

    const double crit = cfg_.criterion == Criterion::Preconditioned ? rec.rprec_l2 : rec.r_l2;
    if (stop ? stop(u, rec) : crit <= cfg_.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.u = smoother_.solution();
  res.traversals = smoother_.total_counters().traversals - t_start;
  return res;
}

SolveResult HpMultigrid::smooth_only(const CellField& b, const CellField& u0, int iterations) {
  const LocalBlocks& blocks = smoother_.blocks();
  SolveResult res;
  smoother_.set_rhs(b);
  smoother_.set_solution(u0);
  const std::uint64_t t_start = smoother_.total_counters().traversals;
  smoother_.warm_up();
  {
    const CellField r0 = compute_residual(mesh_, blocks, u0, b);
    res.trace.r0_l2 = r0.norm(NormKind::L2);
    res.trace.r0_linf = r0.norm(NormKind::Linf);
  }
  CellField u_old = u0;
  for (int k = 1; k <= iterations; ++k) {
    smoother_.sweep();
    const CellField& u = smoother_.solution();
    CycleRecord rec;
    rec.cycle = k;
    double p2 = 0.0;
    double pinf = 0.0;
    difference_norms(u, u_old, p2, pinf);
    if (k == 1) {
      res.trace.rprec1_l2 = p2;
      res.trace.rprec1_linf = pinf;
    }
    rec.rprec_l2 = ratio(p2, res.trace.rprec1_l2);
    rec.rprec_linf = ratio(pinf, res.trace.rprec1_linf);
    u_old = u;
    const CellField rk = compute_residual(mesh_, blocks, u, b);
    rec.r_l2 = ratio(rk.norm(NormKind::L2), res.trace.r0_l2);
    rec.r_linf = ratio(rk.norm(NormKind::Linf), res.trace.r0_linf);
    res.trace.records.push_back(rec);
    res.cycles = k;
    const double crit = cfg_.criterion == Criterion::Preconditioned ? rec.rprec_l2 : rec.r_l2;
    if (crit <= cfg_.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.u = smoother_.solution();
  res.traversals = smoother_.total_counters().traversals - t_start;
  return res;
}

} // namespace hpmg
