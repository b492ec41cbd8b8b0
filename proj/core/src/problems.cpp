#include "hpmg/problems.hpp"

#include "hpmg/errors.hpp"

#include <cmath>
#include <numbers>

namespace hpmg {

namespace {

struct GaussianTerms {
  double g, gx, gy, gxx, gyy;
};

GaussianTerms gaussian(const Gaussian& p, double x, double y) {
  const double dx = x - p.x0;
  const double dy = y - p.y0;
  const double s2 = p.sigma * p.sigma;
  const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
  return {g, -dx / s2 * g, -dy / s2 * g, (dx * dx / (s2 * s2) - 1.0 / s2) * g, (dy * dy / (s2 * s2) - 1.0 / s2) * g};
}

void require_2d(const Mesh& mesh) {
  if (mesh.dim() != 2) throw InvalidArgument("manufactured problems are defined on the unit square only");
}

} // namespace

ManufacturedProblem ManufacturedProblem::from_name(const std::string& name) {
  if (name == "sin_product" || name == "sin-product") return ManufacturedProblem(ProblemKind::SinProduct);
  if (name == "two_peak" || name == "two-peak") return ManufacturedProblem(ProblemKind::TwoPeak);
  if (name == "zero") return ManufacturedProblem(ProblemKind::Zero);
  throw InvalidArgument("unknown problem: " + name);
}

std::string ManufacturedProblem::name() const {
  switch (kind_) {
  case ProblemKind::SinProduct: return "sin_product";
  case ProblemKind::TwoPeak: return "two_peak";
  case ProblemKind::Zero: return "zero";
  }
  return "?";
}

double ManufacturedProblem::exact(double x, double y) const {
  switch (kind_) {
  case ProblemKind::SinProduct: return std::sin(2.0 * std::numbers::pi * x) * std::sin(2.0 * std::numbers::pi * y);
  case ProblemKind::TwoPeak: {
    const double g = 2.0 * gaussian(peak1, x, y).g - gaussian(peak2, x, y).g;
    return x * (1.0 - x) * y * (1.0 - y) * g;
  }
  case ProblemKind::Zero: return 0.0;
  }
  return 0.0;
}

double ManufacturedProblem::rhs(double x, double y) const {
  switch (kind_) {
  case ProblemKind::SinProduct: return 8.0 * std::numbers::pi * std::numbers::pi * exact(x, y);
  case ProblemKind::TwoPeak: {
    const GaussianTerms a = gaussian(peak1, x, y);
    const GaussianTerms b = gaussian(peak2, x, y);
    const double G = 2.0 * a.g - b.g;
    const double Gx = 2.0 * a.gx - b.gx;
    const double Gy = 2.0 * a.gy - b.gy;
    const double Gxx = 2.0 * a.gxx - b.gxx;
    const double Gyy = 2.0 * a.gyy - b.gyy;
    const double qx = x * (1.0 - x);
    const double qy = y * (1.0 - y);
    const double dqx = 1.0 - 2.0 * x;
    const double dqy = 1.0 - 2.0 * y;
    const double uxx = -2.0 * qy * G + 2.0 * dqx * qy * Gx + qx * qy * Gxx;
    const double uyy = -2.0 * qx * G + 2.0 * qx * dqy * Gy + qx * qy * Gyy;
    return -(uxx + uyy);
  }
  case ProblemKind::Zero: return 0.0;
  }
  return 0.0;
}

CellField build_rhs(const ManufacturedProblem& problem, const Mesh& mesh, const NodalBasis1D& basis) {
  if (problem.kind() == ProblemKind::Zero) {
    require_2d(mesh);
    return CellField(mesh.num_cells(), static_cast<std::size_t>(basis.size() * basis.size()));
  }
  return build_rhs([&](double x, double y) { return problem.rhs(x, y); }, mesh, basis);
}

CellField build_rhs(const std::function<double(double, double)>& f, const Mesh& mesh, const NodalBasis1D& basis) {
  require_2d(mesh);
  const auto n1 = static_cast<std::size_t>(basis.size());
  const QuadratureRule& q = basis.quadrature();
  const std::size_t nq = q.points.size();
  // phi[k * n1 + i] = φ_i(ξ_k)
  std::vector<double> phi(nq * n1);
  for (std::size_t k = 0; k < nq; ++k)
    for (std::size_t i = 0; i < n1; ++i) phi[k * n1 + i] = basis.value(static_cast<int>(i), q.points[k]);

  const double h = mesh.h();
  CellField b(mesh.num_cells(), n1 * n1);
  std::vector<double> fq(nq * nq);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Point3 o = mesh.cell_origin(c);
    for (std::size_t ky = 0; ky < nq; ++ky)
      for (std::size_t kx = 0; kx < nq; ++kx)
        fq[ky * nq + kx] = f(o[0] + h * q.points[kx], o[1] + h * q.points[ky]) * q.weights[kx] *
                           q.weights[ky] * h * h;
    auto bc = b.cell(c);
    for (std::size_t iy = 0; iy < n1; ++iy)
      for (std::size_t ix = 0; ix < n1; ++ix) {
        double s = 0.0;
        for (std::size_t ky = 0; ky < nq; ++ky)
          for (std::size_t kx = 0; kx < nq; ++kx) s += fq[ky * nq + kx] * phi[kx * n1 + ix] * phi[ky * n1 + iy];
        bc[iy * n1 + ix] = s;
      }
  }
  return b;
}

CellField interpolate_exact(const ManufacturedProblem& problem, const Mesh& mesh, const NodalBasis1D& basis) {
  require_2d(mesh);
  const auto n1 = static_cast<std::size_t>(basis.size());
  const double h = mesh.h();
  CellField u(mesh.num_cells(), n1 * n1);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Point3 o = mesh.cell_origin(c);
    auto uc = u.cell(c);
    for (std::size_t iy = 0; iy < n1; ++iy)
      for (std::size_t ix = 0; ix < n1; ++ix)
        uc[iy * n1 + ix] = problem.exact(o[0] + h * basis.nodes()[ix], o[1] + h * basis.nodes()[iy]);
  }
  return u;
}

ErrorNorms discretisation_error(const CellField& u, const ManufacturedProblem& problem, const Mesh& mesh,
                                const NodalBasis1D& basis) {
  const CellField ref = interpolate_exact(problem, mesh, basis);
  if (ref.size() != u.size()) throw InvalidArgument("discretisation_error: size mismatch");
  CellField diff = u;
  const auto rv = ref.values();
  auto dv = diff.values();
  for (std::size_t k = 0; k < dv.size(); ++k) dv[k] -= rv[k];
  ErrorNorms e;
  e.l2 = diff.norm(NormKind::L2);
  e.linf = diff.norm(NormKind::Linf);
  const double r2 = ref.norm(NormKind::L2);
  const double rinf = ref.norm(NormKind::Linf);
  if (r2 == 0.0 || rinf == 0.0) {
    e.relative = false;
    return e;
  }
  e.l2 /= r2;
  e.linf /= rinf;
  return e;
}

double fit_slope(std::span<const double> h, std::span<const double> e) {
  if (h.size() != e.size() || h.size() < 2) throw InvalidArgument("fit_slope: need matching sequences of length >= 2");
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = std::log(h[k]);
    const double y = std::log(e[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hpmg
