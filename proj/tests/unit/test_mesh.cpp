#include "hpmg/errors.hpp"
#include "hpmg/mesh.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

using namespace hpmg;

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

bool facet_neighbours(const Mesh& m, std::size_t a, std::size_t b) {
  const Index3 ia = m.cell_index(a), ib = m.cell_index(b);
  std::size_t diff = 0;
  for (int k = 0; k < m.dim(); ++k) diff += ia[k] > ib[k] ? ia[k] - ib[k] : ib[k] - ia[k];
  return diff == 1;
}

// Peano curve built independently: recursive 3x3 serpentine with the
// sub-square orientation given by reflections of the parent.
void peano_recursive(int level, std::size_t x0, std::size_t y0, bool flip_x, bool flip_y,
                     std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (level == 0) {
    out.emplace_back(x0, y0);
    return;
  }
  const std::size_t s = ipow(3, level - 1);
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj) {
      const int j = (i % 2 == 0) ? jj : 2 - jj;
      const int xi = flip_x ? 2 - i : i;
      const int yj = flip_y ? 2 - j : j;
      peano_recursive(level - 1, x0 + static_cast<std::size_t>(xi) * s, y0 + static_cast<std::size_t>(yj) * s,
                      flip_x != (j % 2 == 1), flip_y != (i % 2 == 1), out);
    }
}

} // namespace

TEST(Mesh, CountsOnLevelOne) {
  const Mesh m(2, 1);
  EXPECT_EQ(m.num_cells(), 9u);
  EXPECT_EQ(m.num_interior_facets(), 12u);
  EXPECT_EQ(m.num_boundary_facets(), 12u);
  EXPECT_EQ(m.num_vertices(), 16u);
  EXPECT_DOUBLE_EQ(m.h(), 1.0 / 3.0);
}

TEST(Mesh, CountFormulas) {
  for (int d = 2; d <= 3; ++d)
    for (int level = 1; level <= (d == 2 ? 4 : 2); ++level) {
      const Mesh m(d, level);
      const std::size_t n = ipow(3, level);
      EXPECT_EQ(m.num_cells(), ipow(n, d));
      EXPECT_EQ(m.num_interior_facets(), static_cast<std::size_t>(d) * (n - 1) * ipow(n, d - 1));
      EXPECT_EQ(m.num_boundary_facets(), 2u * static_cast<std::size_t>(d) * ipow(n, d - 1));
      EXPECT_EQ(m.num_vertices(), ipow(n + 1, d));
    }
}

TEST(Mesh, FinestOfLevelFive) {
  const std::vector<Mesh> h = build_hierarchy(2, 5);
  ASSERT_EQ(h.size(), 5u);
  EXPECT_EQ(h.front().num_cells(), 59049u);
  EXPECT_EQ(h.back().num_cells(), 9u);
}

TEST(Mesh, HierarchyIsNested) {
  const std::vector<Mesh> h = build_hierarchy(2, 3);
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    const Mesh& fine = h[k];
    const Mesh& coarse = h[k + 1];
    std::vector<int> children(coarse.num_cells(), 0);
    for (std::size_t c = 0; c < fine.num_cells(); ++c) {
      const Index3 i = fine.cell_index(c);
      const std::size_t parent = coarse.cell_at({i[0] / 3, i[1] / 3, 0});
      ++children[parent];
      const Point3 o = fine.cell_origin(c);
      const Point3 po = coarse.cell_origin(parent);
      for (int a = 0; a < 2; ++a) {
        EXPECT_GE(o[a], po[a] - 1e-14);
        EXPECT_LE(o[a] + fine.h(), po[a] + coarse.h() + 1e-14);
      }
    }
    for (int n : children) EXPECT_EQ(n, 9);
  }
}

TEST(Mesh, RejectsBadLevels) {
  EXPECT_THROW(Mesh(2, 0), InvalidArgument);
  EXPECT_THROW(Mesh(2, kMaxLevel + 1), InvalidArgument);
  EXPECT_THROW(Mesh(4, 1), InvalidArgument);
  EXPECT_THROW(build_hierarchy(2, 0), InvalidArgument);
}

TEST(Mesh, SfcIsBijection) {
  for (int level = 1; level <= 4; ++level) {
    const Mesh m(2, level);
    std::vector<std::size_t> order = sfc_order(m);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> expect(m.num_cells());
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(order, expect);
  }
}

TEST(Mesh, SfcConsecutiveCellsAreFacetNeighbours) {
  for (int d = 2; d <= 3; ++d)
    for (int level = 1; level <= (d == 2 ? 4 : 2); ++level) {
      const Mesh m(d, level);
      for (std::size_t c = 0; c + 1 < m.num_cells(); ++c) ASSERT_TRUE(facet_neighbours(m, c, c + 1)) << c;
    }
}

TEST(Mesh, SfcStartsAtOriginAndMatchesSerpentineAtLevelOne) {
  const Mesh m(2, 1);
  EXPECT_EQ(m.cell_index(0), (Index3{0, 0, 0}));
  const std::vector<Index3> expect = {{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {1, 1, 0},
                                      {1, 0, 0}, {2, 0, 0}, {2, 1, 0}, {2, 2, 0}};
  for (std::size_t c = 0; c < 9; ++c) EXPECT_EQ(m.cell_index(c), expect[c]);
}

TEST(Mesh, SfcMatchesRecursiveConstruction) {
  for (int level = 1; level <= 3; ++level) {
    std::vector<std::pair<std::size_t, std::size_t>> ref;
    peano_recursive(level, 0, 0, false, false, ref);
    const Mesh m(2, level);
    ASSERT_EQ(ref.size(), m.num_cells());
    for (std::size_t c = 0; c < ref.size(); ++c) {
      const Index3 i = m.cell_index(c);
      EXPECT_EQ(i[0], ref[c].first) << "level " << level << " position " << c;
      EXPECT_EQ(i[1], ref[c].second) << "level " << level << " position " << c;
    }
  }
}

TEST(Mesh, CellIndexRoundTrip) {
  const Mesh m(3, 2);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    EXPECT_EQ(m.cell_at(m.cell_index(c)), c);
    EXPECT_EQ(m.cell_from_lexicographic(m.lexicographic(c)), c);
  }
}

TEST(Mesh, FacetOrientation) {
  for (int d = 2; d <= 3; ++d) {
    const Mesh m(d, 2);
    for (std::size_t f = 0; f < m.num_facets(); ++f) {
      const Facet& F = m.facet(f);
      if (F.boundary) {
        EXPECT_EQ(F.plus, kNoCell);
        // Outward: the K⁻ center lies on the inner side.
        const double c = m.cell_center(F.minus)[F.axis];
        EXPECT_TRUE(F.normal_sign > 0 ? c > 0.5 : c < 0.5);
        continue;
      }
      ASSERT_NE(F.plus, kNoCell);
      EXPECT_EQ(F.normal_sign, 1);
      EXPECT_GT(m.cell_center(F.plus)[F.axis] - m.cell_center(F.minus)[F.axis], 0.0);
    }
  }
}

TEST(Mesh, FacetsAreGroupedByAxisThenLexicographic) {
  const Mesh m(2, 1);
  // Axis-0 facets come first: 4 x-positions times 3 rows.
  for (std::size_t f = 0; f < 12; ++f) EXPECT_EQ(m.facet(f).axis, 0);
  for (std::size_t f = 12; f < 24; ++f) EXPECT_EQ(m.facet(f).axis, 1);
  // Facet 0 is the left boundary facet of cell (0,0); facet 1 is the one between (0,0) and (1,0).
  EXPECT_TRUE(m.facet(0).boundary);
  EXPECT_EQ(m.facet(1).minus, m.cell_at({0, 0, 0}));
  EXPECT_EQ(m.facet(1).plus, m.cell_at({1, 0, 0}));
}

TEST(Mesh, EveryCellHasAllFacesAndInteriorCellsAllNeighbours) {
  const Mesh m(2, 2);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    std::set<std::size_t> facets;
    int neighbours = 0;
    for (int face = 0; face < m.faces_per_cell(); ++face) {
      const std::size_t f = m.cell_facet(c, face);
      facets.insert(f);
      const Facet& F = m.facet(f);
      EXPECT_TRUE(F.minus == c || F.plus == c);
      EXPECT_EQ(F.axis, face_axis(face));
      const std::size_t nb = m.neighbour(c, face);
      EXPECT_EQ(nb == kNoCell, m.face_on_boundary(c, face));
      EXPECT_EQ(((m.boundary_mask(c) >> face) & 1u) != 0, m.face_on_boundary(c, face));
      if (nb != kNoCell) {
        ++neighbours;
        EXPECT_EQ(m.neighbour(nb, face ^ 1), c);
      }
    }
    EXPECT_EQ(facets.size(), 4u);
    const Index3 i = m.cell_index(c);
    const bool interior = i[0] > 0 && i[1] > 0 && i[0] + 1 < m.cells_per_axis() && i[1] + 1 < m.cells_per_axis();
    if (interior) EXPECT_EQ(neighbours, 4);
  }
}

TEST(Mesh, Vertices) {
  const Mesh m(2, 1);
  std::size_t boundary = 0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) boundary += m.vertex_on_boundary(v);
  EXPECT_EQ(boundary, 12u);
  for (std::size_t c = 0; c < m.num_cells(); ++c)
    for (int corner = 0; corner < 4; ++corner) {
      const Point3 x = m.vertex_coords(m.cell_vertex(c, corner));
      const Point3 o = m.cell_origin(c);
      EXPECT_NEAR(x[0], o[0] + ((corner & 1) ? m.h() : 0.0), 1e-15);
      EXPECT_NEAR(x[1], o[1] + ((corner & 2) ? m.h() : 0.0), 1e-15);
    }
}

TEST(Mesh, SummaryJson) {
  const auto j = nlohmann::json::parse(Mesh(2, 2).summary_json());
  EXPECT_EQ(j.at("dim"), 2);
  EXPECT_EQ(j.at("level"), 2);
  EXPECT_EQ(j.at("cells"), 81);
}

TEST(Partition, BalancedSizes) {
  EXPECT_EQ(partition_sizes(9, PartitionMode::Balanced, 3), (std::vector<std::size_t>{3, 3, 3}));
  const auto two = partition_sizes(9, PartitionMode::Balanced, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0] + two[1], 9u);
  EXPECT_LE(std::max(two[0], two[1]) - std::min(two[0], two[1]), 1u);
  for (int parts : {1, 2, 4, 7, 8}) {
    const auto s = partition_sizes(6561, PartitionMode::Balanced, parts);
    EXPECT_EQ(std::accumulate(s.begin(), s.end(), std::size_t{0}), 6561u);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    EXPECT_LE(*hi - *lo, 1u);
  }
}

TEST(Partition, GeometricSizes) {
  EXPECT_EQ(partition_sizes(531441, PartitionMode::Geometric, 4),
            (std::vector<std::size_t>{265720, 132860, 66430, 66431}));
  const auto s = partition_sizes(81, PartitionMode::Geometric, 8);
  EXPECT_EQ(std::accumulate(s.begin(), s.end(), std::size_t{0}), 81u);
  for (std::size_t v : s) EXPECT_GE(v, 1u);
}

TEST(Partition, RejectsTooManyParts) {
  const Mesh m(2, 1);
  EXPECT_THROW(partition(m, PartitionMode::Balanced, 10), InvalidArgument);
  EXPECT_THROW(partition(m, PartitionMode::Balanced, 0), InvalidArgument);
}

TEST(Partition, ContiguousRangesAndInterfaceFacets) {
  const Mesh m(2, 3);
  for (PartitionMode mode : {PartitionMode::Balanced, PartitionMode::Geometric})
    for (int parts : {1, 2, 4, 8}) {
      const Partition p = partition(m, mode, parts);
      ASSERT_EQ(p.parts(), parts);
      EXPECT_EQ(p.begin(0), 0u);
      EXPECT_EQ(p.end(parts - 1), m.num_cells());
      for (int s = 0; s < parts; ++s)
        for (std::size_t c = p.begin(s); c < p.end(s); ++c) EXPECT_EQ(p.owner(c), s);
      std::set<std::size_t> listed(p.interface_facets().begin(), p.interface_facets().end());
      for (std::size_t f = 0; f < m.num_facets(); ++f) {
        const Facet& F = m.facet(f);
        const bool crosses = !F.boundary && p.owner(F.minus) != p.owner(F.plus);
        EXPECT_EQ(listed.count(f) == 1, crosses);
        EXPECT_EQ(p.interface_index(f) >= 0, crosses);
      }
    }
}
