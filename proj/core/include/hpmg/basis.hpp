#pragma once

/// \file basis.hpp
/// 1D nodal Lagrange bases on [0,1] with Gauss-Legendre or Gauss-Lobatto
/// nodes, quadrature rules and the 1D reference matrices.

#include "hpmg/dense.hpp"

#include <string>
#include <vector>

namespace hpmg {

enum class NodeKind { GaussLegendre, GaussLobatto };

std::string to_string(NodeKind kind);
/// Accepts "legendre" / "lobatto".
NodeKind node_kind_from_string(const std::string& name);

inline constexpr int kMaxDegree = 9;

struct QuadratureRule {
  std::vector<double> points;  ///< on [0,1], increasing
  std::vector<double> weights; ///< sum to 1
};

/// n-point Gauss-Legendre rule on [0,1] (n >= 1).
QuadratureRule gauss_legendre_rule(int n);
/// n-point Gauss-Lobatto rule on [0,1] (n >= 2).
QuadratureRule gauss_lobatto_rule(int n);

class NodalBasis1D {
public:
  NodalBasis1D(NodeKind kind, int degree);

  NodeKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  /// (p+2)-point Gauss-Legendre rule used for all assembly.
  const QuadratureRule& quadrature() const { return quad_; }

  double value(int i, double x) const;
  double derivative(int i, double x) const;
  std::vector<double> values(double x) const;
  std::vector<double> derivatives(double x) const;

private:
  NodeKind kind_;
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> bary_; ///< barycentric denominators prod_{j!=i}(x_i - x_j)
  QuadratureRule quad_;
};

NodalBasis1D make_basis(NodeKind kind, int p);

struct Ref1DMatrices {
  Matrix mass;      ///< ∫ φ_i φ_j
  Matrix stiffness; ///< ∫ φ_i' φ_j'
  std::vector<double> e0, e1; ///< φ_i(0), φ_i(1)
  std::vector<double> g0, g1; ///< φ_i'(0), φ_i'(1)
};

Ref1DMatrices ref_matrices(const NodalBasis1D& basis);

/// I(i,j) = φ^from_j(x^to_i): maps nodal values in `from` to nodal values in
/// `to` (exact for polynomials of degree <= from.degree()).
Matrix interpolation_matrix(const NodalBasis1D& from, const NodalBasis1D& to);

} // namespace hpmg
