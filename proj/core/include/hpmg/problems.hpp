#pragma once

/// \file problems.hpp
/// Manufactured Poisson problems on the unit square with homogeneous
/// Dirichlet data, right-hand-side assembly and nodal error norms.

#include "hpmg/basis.hpp"
#include "hpmg/fields.hpp"
#include "hpmg/mesh.hpp"

#include <functional>
#include <span>
#include <string>

namespace hpmg {

enum class ProblemKind {
  SinProduct, ///< sin(2πx) sin(2πy)
  TwoPeak,    ///< x(1-x)y(1-y)(2 g1 - g2), two Gaussians
  Zero
};

struct Gaussian {
  double x0, y0, sigma;
};

class ManufacturedProblem {
public:
  explicit ManufacturedProblem(ProblemKind kind) : kind_(kind) {}
  /// "sin_product" / "two_peak" / "zero" (dashes accepted).
  static ManufacturedProblem from_name(const std::string& name);

  ProblemKind kind() const { return kind_; }
  std::string name() const;

  double exact(double x, double y) const;
  /// f = -Δu.
  double rhs(double x, double y) const;

  static constexpr Gaussian peak1{0.3, 0.4, 0.2};
  static constexpr Gaussian peak2{0.8, 0.6, 0.1};

private:
  ProblemKind kind_;
};

/// b_K,i = ∫_K φ_i f with the basis' (p+2)-point tensor rule. 2D meshes only.
CellField build_rhs(const ManufacturedProblem& problem, const Mesh& mesh, const NodalBasis1D& basis);
/// Same for an arbitrary load f(x, y).
CellField build_rhs(const std::function<double(double, double)>& f, const Mesh& mesh, const NodalBasis1D& basis);
/// Exact solution at every cell's nodes.
CellField interpolate_exact(const ManufacturedProblem& problem, const Mesh& mesh, const NodalBasis1D& basis);

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
  bool relative = true; ///< false when the reference vanishes
};

/// ‖u - u_ref‖ / ‖u_ref‖ over nodal values (absolute if u_ref = 0).
ErrorNorms discretisation_error(const CellField& u, const ManufacturedProblem& problem, const Mesh& mesh,
                                const NodalBasis1D& basis);

/// Least-squares slope of log e over log h.
double fit_slope(std::span<const double> h, std::span<const double> e);

} // namespace hpmg
