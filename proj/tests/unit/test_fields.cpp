#include "hpmg/fields.hpp"
#include "hpmg/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace hpmg;

TEST(Fields, Norms) {
  const std::vector<double> x{3.0, -4.0};
  EXPECT_DOUBLE_EQ(norm(x, NormKind::L2), 5.0);
  EXPECT_DOUBLE_EQ(norm(x, NormKind::Linf), 4.0);
  EXPECT_EQ(norm(std::vector<double>{}, NormKind::L2), 0.0);
}

TEST(Fields, CellFieldLayout) {
  CellField f(4, 9);
  EXPECT_EQ(f.size(), 36u);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < 9; ++i) f.cell(c)[i] = static_cast<double>(10 * c + i);
  EXPECT_EQ(f.values()[2 * 9 + 5], 25.0);
  CellField g = f;
  EXPECT_EQ(f, g);
  g.cell(3)[8] += 1.0;
  EXPECT_FALSE(f == g);
  f.fill(0.0);
  EXPECT_EQ(f.norm(NormKind::Linf), 0.0);
}

TEST(Fields, FacetRecordLayouts) {
  FacetField proj(5, 3, FacetLayout::Projections);
  FacetField flux(5, 3, FacetLayout::Fluxes);
  EXPECT_EQ(proj.record_size(), 12u);
  EXPECT_EQ(flux.record_size(), 6u);
  proj.side(2, 1)[0] = 7.0;
  EXPECT_EQ(proj.record(2)[6], 7.0);
  EXPECT_EQ(proj.values()[2 * 12 + 6], 7.0);
}

TEST(Fields, SingleSubdomainSlotsAreFacets) {
  const Mesh m(2, 2);
  const Partition part = partition(m, PartitionMode::Balanced, 1);
  const FacetSlots slots(m, part);
  EXPECT_EQ(slots.num_slots(), m.num_facets());
  for (std::size_t f = 0; f < m.num_facets(); ++f) EXPECT_EQ(slots.slot(f, 0), f);
}

TEST(Fields, InterfaceFacetsGetGhostSlotForPlusOwner) {
  const Mesh m(2, 2);
  for (int parts : {2, 3, 5}) {
    const Partition part = partition(m, PartitionMode::Balanced, parts);
    const FacetSlots slots(m, part);
    EXPECT_EQ(slots.num_slots(), m.num_facets() + part.interface_facets().size());
    std::set<std::size_t> used;
    for (std::size_t f = 0; f < m.num_facets(); ++f) {
      const Facet& F = m.facet(f);
      const std::size_t sm = slots.slot(f, part.owner(F.minus));
      EXPECT_EQ(sm, f);
      if (F.boundary) continue;
      const std::size_t sp = slots.slot(f, part.owner(F.plus));
      if (part.owner(F.minus) != part.owner(F.plus)) {
        EXPECT_GE(sp, m.num_facets());
        EXPECT_TRUE(used.insert(sp).second);
      } else {
        EXPECT_EQ(sp, f);
      }
    }
    EXPECT_EQ(used.size(), part.interface_facets().size());
  }
}

TEST(Fields, ExchangeCompletesBothCopies) {
  const Mesh m(2, 2);
  const Partition part = partition(m, PartitionMode::Geometric, 3);
  const FacetSlots slots(m, part);
  FacetField proj(slots.num_slots(), 3, FacetLayout::Projections);
  proj.fill(-1.0);
  // Each side writes only its own half, the way the traversal workers do.
  for (std::size_t f = 0; f < m.num_facets(); ++f) {
    const Facet& F = m.facet(f);
    for (double& v : proj.side(slots.slot(f, part.owner(F.minus)), 0)) v = 100.0 + static_cast<double>(f);
    if (!F.boundary)
      for (double& v : proj.side(slots.slot(f, part.owner(F.plus)), 1)) v = 200.0 + static_cast<double>(f);
  }
  exchange_interface(proj, slots);
  for (std::size_t f = 0; f < m.num_facets(); ++f) {
    const Facet& F = m.facet(f);
    if (F.boundary) continue;
    for (int owner : {part.owner(F.minus), part.owner(F.plus)}) {
      const std::size_t s = slots.slot(f, owner);
      for (double v : proj.side(s, 0)) EXPECT_EQ(v, 100.0 + static_cast<double>(f));
      for (double v : proj.side(s, 1)) EXPECT_EQ(v, 200.0 + static_cast<double>(f));
    }
  }
}

TEST(Fields, VertexFieldMask) {
  const Mesh m(2, 1);
  VertexField v(m);
  v.fill(1.0);
  v.apply_mask();
  EXPECT_DOUBLE_EQ(v.norm(NormKind::L2), 2.0); // 4 interior vertices
  std::size_t interior = 0;
  for (std::size_t i = 0; i < v.size(); ++i) interior += !v.boundary(i);
  EXPECT_EQ(interior, 4u);
}

TEST(Fields, CsvDump) {
  CellField f(2, 2);
  f.cell(1)[0] = 0.1;
  std::ostringstream os;
  write_csv(os, f);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "entity,node,value");
  int rows = 0;
  bool found = false;
  while (std::getline(is, line)) {
    ++rows;
    if (line.rfind("1,0,", 0) == 0) {
      found = true;
      EXPECT_EQ(std::stod(line.substr(4)), 0.1);
    }
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(found);
}
