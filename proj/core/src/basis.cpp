#include "hpmg/basis.hpp"

#include "hpmg/errors.hpp"

#include <cmath>
#include <numbers>

namespace hpmg {

namespace {

// P_n(x) and P_n'(x) on [-1,1] by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

// Symmetric rule on [-1,1] -> [0,1].
QuadratureRule to_unit_interval(std::vector<double> x, std::vector<double> w) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double xs = 0.5 * (x[n - 1 - k] - x[k]);
    const double ws = 0.5 * (w[n - 1 - k] + w[k]);
    x[k] = -xs;
    x[n - 1 - k] = xs;
    w[k] = w[n - 1 - k] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  QuadratureRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    r.points[k] = 0.5 * (x[k] + 1.0);
    r.weights[k] = 0.5 * w[k];
  }
  return r;
}

} // namespace

std::string to_string(NodeKind kind) {
  return kind == NodeKind::GaussLegendre ? "legendre" : "lobatto";
}

NodeKind node_kind_from_string(const std::string& name) {
  if (name == "legendre" || name == "gauss-legendre") return NodeKind::GaussLegendre;
  if (name == "lobatto" || name == "gauss-lobatto") return NodeKind::GaussLobatto;
  throw InvalidArgument("unknown basis kind: " + name);
}

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre_rule: need at least one point");
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 1) {
    x = {0.0};
    w = {2.0};
  } else if (n == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    x = {-a, a};
    w = {1.0, 1.0};
  } else if (n == 3) {
    const double a = std::sqrt(0.6);
    x = {-a, 0.0, a};
    w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  } else {
    for (int k = 0; k < n; ++k) {
      double xi = -std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
      double p = 0.0;
      double dp = 0.0;
      for (int it = 0; it < kNewtonMaxIter; ++it) {
        legendre(n, xi, p, dp);
        const double dx = p / dp;
        xi -= dx;
        if (std::abs(dx) < kNewtonTol) break;
      }
      legendre(n, xi, p, dp);
      x[k] = xi;
      w[k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  }
  return to_unit_interval(std::move(x), std::move(w));
}

QuadratureRule gauss_lobatto_rule(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto_rule: need at least two points");
  const int N = n - 1;
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 2) {
    x = {-1.0, 1.0};
    w = {1.0, 1.0};
  } else if (n == 3) {
    x = {-1.0, 0.0, 1.0};
    w = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  } else {
    x.front() = -1.0;
    x.back() = 1.0;
    // Interior nodes are the roots of P_N'.
    for (int k = 1; k < N; ++k) {
      double xi = -std::cos(std::numbers::pi * k / N);
      for (int it = 0; it < kNewtonMaxIter; ++it) {
        double p = 0.0;
        double dp = 0.0;
        legendre(N, xi, p, dp);
        const double ddp = (2.0 * xi * dp - N * (N + 1.0) * p) / (1.0 - xi * xi);
        const double dx = dp / ddp;
        xi -= dx;
        if (std::abs(dx) < kNewtonTol) break;
      }
      x[k] = xi;
    }
    for (int k = 0; k < n; ++k) {
      double p = 0.0;
      if (k == 0 || k == N) {
        p = (k == 0 && N % 2 == 1) ? -1.0 : 1.0;
      } else {
        double dp = 0.0;
        legendre(N, x[k], p, dp);
      }
      w[k] = 2.0 / (N * (N + 1.0) * p * p);
    }
  }
  return to_unit_interval(std::move(x), std::move(w));
}

NodalBasis1D::NodalBasis1D(NodeKind kind, int degree) : kind_(kind), degree_(degree) {
  if (degree < 1 || degree > kMaxDegree) throw InvalidArgument("NodalBasis1D: degree must lie in 1..9");
  nodes_ = (kind == NodeKind::GaussLegendre ? gauss_legendre_rule(degree + 1) : gauss_lobatto_rule(degree + 1)).points;
  bary_.assign(nodes_.size(), 1.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      if (i != j) bary_[i] *= nodes_[i] - nodes_[j];
  quad_ = gauss_legendre_rule(degree + 2);
}

double NodalBasis1D::value(int i, double x) const {
  double v = 1.0;
  for (int j = 0; j < size(); ++j)
    if (j != i) v *= x - nodes_[j];
  return v / bary_[i];
}

double NodalBasis1D::derivative(int i, double x) const {
  double sum = 0.0;
  for (int k = 0; k < size(); ++k) {
    if (k == i) continue;
    double prod = 1.0;
    for (int j = 0; j < size(); ++j)
      if (j != i && j != k) prod *= x - nodes_[j];
    sum += prod;
  }
  return sum / bary_[i];
}

std::vector<double> NodalBasis1D::values(double x) const {
  std::vector<double> v(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) v[i] = value(i, x);
  return v;
}

std::vector<double> NodalBasis1D::derivatives(double x) const {
  std::vector<double> v(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) v[i] = derivative(i, x);
  return v;
}

NodalBasis1D make_basis(NodeKind kind, int p) { return NodalBasis1D(kind, p); }

Ref1DMatrices ref_matrices(const NodalBasis1D& basis) {
  const auto n = static_cast<std::size_t>(basis.size());
  const QuadratureRule& q = basis.quadrature();
  Ref1DMatrices r;
  r.mass = Matrix(n, n);
  r.stiffness = Matrix(n, n);
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const auto v = basis.values(q.points[k]);
    const auto d = basis.derivatives(q.points[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        r.mass(i, j) += q.weights[k] * v[i] * v[j];
        r.stiffness(i, j) += q.weights[k] * d[i] * d[j];
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (r.mass(i, j) + r.mass(j, i));
      const double s = 0.5 * (r.stiffness(i, j) + r.stiffness(j, i));
      r.mass(i, j) = r.mass(j, i) = m;
      r.stiffness(i, j) = r.stiffness(j, i) = s;
    }
  r.e0 = basis.values(0.0);
  r.e1 = basis.values(1.0);
  r.g0 = basis.derivatives(0.0);
  r.g1 = basis.derivatives(1.0);
  return r;
}

Matrix interpolation_matrix(const NodalBasis1D& from, const NodalBasis1D& to) {
  Matrix m(static_cast<std::size_t>(to.size()), static_cast<std::size_t>(from.size()));
  for (int i = 0; i < to.size(); ++i)
    for (int j = 0; j < from.size(); ++j) m(i, j) = from.value(j, to.nodes()[i]);
  return m;
}

} // namespace hpmg
