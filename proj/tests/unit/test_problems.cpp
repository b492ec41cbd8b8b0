#include "hpmg/basis.hpp"
#include "hpmg/errors.hpp"
#include "hpmg/multigrid.hpp"
#include "hpmg/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hpmg;

namespace {

const ProblemKind kNonTrivial[] = {ProblemKind::SinProduct, ProblemKind::TwoPeak};

double fd_laplacian(const ManufacturedProblem& p, double x, double y, double d) {
  return (p.exact(x + d, y) + p.exact(x - d, y) + p.exact(x, y + d) + p.exact(x, y - d) - 4.0 * p.exact(x, y)) /
         (d * d);
}

} // namespace

TEST(Problems, RhsIsMinusLaplacianOfExact) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  for (ProblemKind kind : kNonTrivial) {
    const ManufacturedProblem p(kind);
    for (int k = 0; k < 100; ++k) {
      const double x = dist(rng), y = dist(rng);
      const double f = p.rhs(x, y);
      EXPECT_NEAR(f, -fd_laplacian(p, x, y, 1e-4), 1e-6 * std::max(1.0, std::abs(f)))
          << p.name() << " at (" << x << ", " << y << ")";
    }
  }
}

TEST(Problems, RhsMatchesRichardsonExtrapolatedDifferences) {
  // Combining the 5-point stencil at d and d/2 cancels the d² term, so the
  // comparison holds to 1e-6 absolute.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  for (ProblemKind kind : kNonTrivial) {
    const ManufacturedProblem p(kind);
    for (int k = 0; k < 100; ++k) {
      const double x = dist(rng), y = dist(rng);
      const double d = 2e-3;
      const double lap = (4.0 * fd_laplacian(p, x, y, d / 2) - fd_laplacian(p, x, y, d)) / 3.0;
      EXPECT_NEAR(p.rhs(x, y), -lap, 1e-6 * std::max(1.0, std::abs(p.rhs(x, y)))) << p.name();
    }
  }
}

TEST(Problems, ExactVanishesOnBoundary) {
  for (ProblemKind kind : kNonTrivial) {
    const ManufacturedProblem p(kind);
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      EXPECT_NEAR(p.exact(0.0, t), 0.0, 1e-15);
      EXPECT_NEAR(p.exact(1.0, t), 0.0, 1e-15);
      EXPECT_NEAR(p.exact(t, 0.0), 0.0, 1e-15);
      EXPECT_NEAR(p.exact(t, 1.0), 0.0, 1e-15);
    }
  }
}

TEST(Problems, TwoPeakFormula) {
  const ManufacturedProblem p(ProblemKind::TwoPeak);
  auto g = [](double x, double y, double x0, double y0, double s) {
    return std::exp(-((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (2.0 * s * s));
  };
  for (auto [x, y] : {std::pair{0.3, 0.4}, std::pair{0.8, 0.6}, std::pair{0.25, 0.9}}) {
    const double expect = x * (1 - x) * y * (1 - y) * (2.0 * g(x, y, 0.3, 0.4, 0.2) - g(x, y, 0.8, 0.6, 0.1));
    EXPECT_NEAR(p.exact(x, y), expect, 1e-15);
  }
}

TEST(Problems, NamesRoundTrip) {
  for (const char* name : {"sin_product", "two_peak", "zero"})
    EXPECT_EQ(ManufacturedProblem::from_name(name).name(), name);
  EXPECT_EQ(ManufacturedProblem::from_name("two-peak").kind(), ProblemKind::TwoPeak);
  EXPECT_THROW(ManufacturedProblem::from_name("three_peak"), InvalidArgument);
}

TEST(Problems, ZeroRhsGivesZeroVector) {
  const Mesh m(2, 1);
  const CellField b = build_rhs(ManufacturedProblem(ProblemKind::Zero), m, make_basis(NodeKind::GaussLobatto, 2));
  EXPECT_EQ(b.norm(NormKind::Linf), 0.0);
  EXPECT_EQ(interpolate_exact(ManufacturedProblem(ProblemKind::Zero), m, make_basis(NodeKind::GaussLobatto, 2))
                .norm(NormKind::Linf),
            0.0);
}

TEST(Problems, UnitLoadOnBilinearElements) {
  // Each bilinear Lobatto function integrates to h²/4 over its cell.
  const Mesh m(2, 1);
  const CellField b = build_rhs([](double, double) { return 1.0; }, m, make_basis(NodeKind::GaussLobatto, 1));
  for (double v : b.values()) EXPECT_NEAR(v, 1.0 / 36.0, 1e-16);
}

TEST(Problems, SinProductRhsIntegratesToZero) {
  for (int level : {1, 2, 3}) {
    const Mesh m(2, level);
    const CellField b = build_rhs(ManufacturedProblem(ProblemKind::SinProduct), m, make_basis(NodeKind::GaussLobatto, 2));
    double s = 0.0;
    for (double v : b.values()) s += v;
    EXPECT_NEAR(s, 0.0, 1e-10);
  }
}

TEST(Problems, PolynomialLoadsIntegratedExactly) {
  // The (p+2)-point rule is exact to degree 2p+3 per axis, so loads of
  // degree <= 3 are integrated exactly; compare with a 20-point rule.
  const Mesh m(2, 2);
  const auto f = [](double x, double y) { return 1.0 + 3.0 * x * x * y - 2.0 * y * y * y; };
  for (int p : {1, 2, 3}) {
    const NodalBasis1D basis = make_basis(NodeKind::GaussLegendre, p);
    const CellField b = build_rhs(f, m, basis);
    const QuadratureRule q = gauss_legendre_rule(20);
    const std::size_t n1 = static_cast<std::size_t>(p + 1);
    for (std::size_t c : {std::size_t{0}, std::size_t{40}, m.num_cells() - 1}) {
      const Point3 o = m.cell_origin(c);
      for (std::size_t j = 0; j < n1; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
          double s = 0.0;
          for (std::size_t a = 0; a < q.points.size(); ++a)
            for (std::size_t bb = 0; bb < q.points.size(); ++bb)
              s += q.weights[a] * q.weights[bb] * basis.value(static_cast<int>(i), q.points[a]) *
                   basis.value(static_cast<int>(j), q.points[bb]) *
                   f(o[0] + m.h() * q.points[a], o[1] + m.h() * q.points[bb]);
          EXPECT_NEAR(b.cell(c)[j * n1 + i], s * m.h() * m.h(), 1e-15) << "p=" << p;
        }
    }
  }
}

TEST(Problems, InterpolationAtNodes) {
  const Mesh m(2, 1);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, 2);
  const CellField u = interpolate_exact(ManufacturedProblem(ProblemKind::SinProduct), m, basis);
  const std::size_t center = m.cell_at({1, 1, 0});
  EXPECT_NEAR(u.cell(center)[4], 0.0, 1e-15); // node (0.5, 0.5)
  const ManufacturedProblem tp(ProblemKind::TwoPeak);
  const CellField v = interpolate_exact(tp, m, basis);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const Point3 o = m.cell_origin(c);
    for (int j = 0; j <= 2; ++j)
      for (int i = 0; i <= 2; ++i) {
        const double x = o[0] + m.h() * basis.nodes()[i];
        const double y = o[1] + m.h() * basis.nodes()[j];
        EXPECT_DOUBLE_EQ(v.cell(c)[static_cast<std::size_t>(j * 3 + i)], tp.exact(x, y));
      }
  }
}

TEST(Problems, ErrorOfInterpolantIsZero) {
  const Mesh m(2, 2);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLegendre, 3);
  const ManufacturedProblem p(ProblemKind::TwoPeak);
  const ErrorNorms e = discretisation_error(interpolate_exact(p, m, basis), p, m, basis);
  EXPECT_EQ(e.l2, 0.0);
  EXPECT_EQ(e.linf, 0.0);
  EXPECT_TRUE(e.relative);
}

TEST(Problems, ErrorIsRelative) {
  const Mesh m(2, 1);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, 2);
  const ManufacturedProblem p(ProblemKind::SinProduct);
  CellField u = interpolate_exact(p, m, basis);
  for (double& v : u.values()) v *= 1.5;
  const ErrorNorms e = discretisation_error(u, p, m, basis);
  EXPECT_NEAR(e.l2, 0.5, 1e-14);
  EXPECT_NEAR(e.linf, 0.5, 1e-14);
}

TEST(Problems, ZeroReferenceGivesAbsoluteNorms) {
  const Mesh m(2, 1);
  const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, 1);
  CellField u(m.num_cells(), 4);
  u.cell(0)[0] = 3.0;
  u.cell(1)[0] = 4.0;
  const ErrorNorms e = discretisation_error(u, ManufacturedProblem(ProblemKind::Zero), m, basis);
  EXPECT_FALSE(e.relative);
  EXPECT_DOUBLE_EQ(e.l2, 5.0);
  EXPECT_DOUBLE_EQ(e.linf, 4.0);
}

TEST(Problems, SlopeFit) {
  const std::vector<double> h{1.0 / 9, 1.0 / 27, 1.0 / 81};
  std::vector<double> e;
  for (double x : h) e.push_back(7.0 * std::pow(x, 3));
  EXPECT_NEAR(fit_slope(h, e), 3.0, 1e-12);
  // Least squares, not end points.
  const std::vector<double> h4{1.0, 0.5, 0.25};
  const std::vector<double> e4{1.0, 0.5, 0.0625};
  const double lx[] = {0.0, std::log(0.5), std::log(0.25)};
  const double ly[] = {0.0, std::log(0.5), std::log(0.0625)};
  const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(fit_slope(h4, e4), sxy / sxx, 1e-12);
}

TEST(Problems, ErrorDecreasesUnderRefinement) {
  for (ProblemKind kind : kNonTrivial)
    for (int p : {1, 2, 3}) {
      ErrorNorms prev{1e300, 1e300, true};
      for (int level = 1; level <= 3; ++level) {
        const std::vector<Mesh> meshes = build_hierarchy(2, level);
        const Partition part = partition(meshes.front(), PartitionMode::Balanced, 1);
        const NodalBasis1D basis = make_basis(NodeKind::GaussLobatto, p);
        const ReferenceBlocks ref = build_reference_blocks(basis, 2);
        MgConfig cfg;
        cfg.tolerance = 1e-10;
        HpMultigrid mg(meshes, part, basis, ref, SmootherConfig{}, cfg);
        const ManufacturedProblem prob(kind);
        const CellField b = build_rhs(prob, meshes.front(), basis);
        const SolveResult r = mg.solve(b, CellField(b.cells(), b.block()));
        ASSERT_TRUE(r.converged);
        const ErrorNorms e = discretisation_error(r.u, prob, meshes.front(), basis);
        EXPECT_LT(e.l2, prev.l2) << prob.name() << " p=" << p << " level " << level;
        EXPECT_LT(e.linf, prev.linf) << prob.name() << " p=" << p << " level " << level;
        prev = e;
      }
    }
}
