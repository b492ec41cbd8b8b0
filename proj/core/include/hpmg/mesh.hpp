#pragma once

/// \file mesh.hpp
/// Uniform base-3 Cartesian meshes of the unit square/cube, their facets and
/// vertices, the Peano cell enumeration and contiguous SFC partitions.
///
/// Cells are identified by their position along the Peano curve. Facets are
/// grouped by normal axis and then numbered lexicographically (axis 0
/// fastest). Vertices are numbered lexicographically.
///
/// Orientation: an interior facet with normal axis a has n_F = +e_a; its
/// K⁻ cell is the one with the smaller coordinate. A boundary facet has only
/// a K⁻ cell and n_F is the outward domain normal.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hpmg {

inline constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();
inline constexpr int kMaxLevel = 6;

using Index3 = std::array<std::size_t, 3>;
using Point3 = std::array<double, 3>;

struct Facet {
  int axis = 0;
  int normal_sign = 1;       ///< n_F = normal_sign * e_axis
  bool boundary = false;
  std::size_t minus = kNoCell; ///< K⁻ (always present)
  std::size_t plus = kNoCell;  ///< K⁺ (kNoCell on the boundary)
};

/// Local face numbering of a cell: face = 2*axis + side, side 0 is the lower
/// face (x_axis = origin), side 1 the upper one.
constexpr int face_axis(int face) { return face / 2; }
constexpr int face_side(int face) { return face % 2; }

class Mesh {
public:
  Mesh(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t cells_per_axis() const { return n_; }
  double h() const { return h_; }
  int faces_per_cell() const { return 2 * dim_; }
  int vertices_per_cell() const { return 1 << dim_; }

  std::size_t num_cells() const { return num_cells_; }
  std::size_t num_facets() const { return facets_.size(); }
  std::size_t num_interior_facets() const { return num_interior_; }
  std::size_t num_boundary_facets() const { return facets_.size() - num_interior_; }
  std::size_t num_vertices() const { return num_vertices_; }

  /// Multi-index of a cell (unused trailing entries are 0).
  Index3 cell_index(std::size_t cell) const;
  /// Cell (SFC position) at a multi-index.
  std::size_t cell_at(const Index3& idx) const;
  /// Lexicographic index of a cell, axis 0 fastest.
  std::size_t lexicographic(std::size_t cell) const { return sfc_to_lex_[cell]; }
  std::size_t cell_from_lexicographic(std::size_t lex) const { return lex_to_sfc_[lex]; }

  Point3 cell_origin(std::size_t cell) const;
  Point3 cell_center(std::size_t cell) const;

  const Facet& facet(std::size_t f) const { return facets_[f]; }
  std::size_t cell_facet(std::size_t cell, int face) const;
  /// Neighbour across a local face, kNoCell on the boundary.
  std::size_t neighbour(std::size_t cell, int face) const;
  bool face_on_boundary(std::size_t cell, int face) const;
  /// Bit `face` set iff that face lies on the boundary.
  unsigned boundary_mask(std::size_t cell) const;

  /// Vertex at local corner c (bit a of c selects the upper end along axis a).
  std::size_t cell_vertex(std::size_t cell, int corner) const;
  Index3 vertex_index(std::size_t v) const;
  Point3 vertex_coords(std::size_t v) const;
  bool vertex_on_boundary(std::size_t v) const;

  /// JSON summary (dim, level, counts) for run manifests.
  std::string summary_json() const;

private:
  std::size_t facet_at(int axis, const Index3& m) const;

  int dim_;
  int level_;
  std::size_t n_;
  double h_;
  std::size_t num_cells_;
  std::size_t num_vertices_;
  std::size_t num_interior_ = 0;
  std::vector<std::size_t> sfc_to_lex_;
  std::vector<std::size_t> lex_to_sfc_;
  std::array<std::size_t, 4> axis_offset_{};
  std::vector<Facet> facets_;
};

/// Peano curve position -> multi-index on a 3^level grid.
Index3 peano_coords(int dim, int level, std::size_t position);

/// Meshes for levels `level`, level-1, ..., 1 (finest first).
std::vector<Mesh> build_hierarchy(int dim, int level);

/// Lexicographic cell indices in curve order (entry k is the lexicographic
/// index of the k-th cell on the curve).
std::vector<std::size_t> sfc_order(const Mesh& mesh);

enum class PartitionMode { Balanced, Geometric };

std::string to_string(PartitionMode mode);
PartitionMode partition_mode_from_string(const std::string& name);

/// Contiguous SFC ranges plus the facets that cross subdomain boundaries.
class Partition {
public:
  Partition() = default;
  Partition(const Mesh& mesh, std::vector<std::size_t> sizes);

  int parts() const { return static_cast<int>(begin_.size()) - 1; }
  std::size_t begin(int part) const { return begin_[part]; }
  std::size_t end(int part) const { return begin_[part + 1]; }
  std::size_t size(int part) const { return end(part) - begin(part); }
  int owner(std::size_t cell) const { return owner_[cell]; }

  const std::vector<std::size_t>& interface_facets() const { return interface_; }
  /// Position of f in interface_facets(), or -1.
  std::int64_t interface_index(std::size_t f) const { return interface_index_[f]; }

private:
  std::vector<std::size_t> begin_;
  std::vector<int> owner_;
  std::vector<std::size_t> interface_;
  std::vector<std::int64_t> interface_index_;
};

Partition partition(const Mesh& mesh, PartitionMode mode, int parts);

/// Subdomain sizes the partitioner would produce.
std::vector<std::size_t> partition_sizes(std::size_t cells, PartitionMode mode, int parts);

} // namespace hpmg
