#include "hpmg/mesh.hpp"

#include "hpmg/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>

namespace hpmg {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

} // namespace

Index3 peano_coords(int dim, int level, std::size_t position) {
  const int ndigits = dim * level;
  std::vector<int> digits(ndigits);
  for (int k = ndigits - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(position % 3);
    position /= 3;
  }
  // Digit k belongs to axis k % dim. A coordinate digit is reflected when the
  // sum of the preceding digits of the other axes is odd.
  Index3 idx{0, 0, 0};
  std::array<int, 3> axis_sum{0, 0, 0};
  int total = 0;
  for (int k = 0; k < ndigits; ++k) {
    const int a = k % dim;
    const int others = total - axis_sum[a];
    const int digit = (others % 2 == 0) ? digits[k] : 2 - digits[k];
    idx[a] = idx[a] * 3 + static_cast<std::size_t>(digit);
    axis_sum[a] += digits[k];
    total += digits[k];
  }
  return idx;
}

Mesh::Mesh(int dim, int level) : dim_(dim), level_(level) {
  if (dim != 2 && dim != 3) throw InvalidArgument("Mesh: dim must be 2 or 3");
  if (level < 1 || level > kMaxLevel) throw InvalidArgument("Mesh: level must lie in 1..6");
  n_ = ipow(3, level);
  h_ = 1.0 / static_cast<double>(n_);
  num_cells_ = ipow(n_, dim);
  num_vertices_ = ipow(n_ + 1, dim);

  sfc_to_lex_.resize(num_cells_);
  lex_to_sfc_.resize(num_cells_);
  for (std::size_t t = 0; t < num_cells_; ++t) {
    const Index3 m = peano_coords(dim, level, t);
    std::size_t lex = 0;
    for (int a = dim - 1; a >= 0; --a) lex = lex * n_ + m[a];
    sfc_to_lex_[t] = lex;
    lex_to_sfc_[lex] = t;
  }

  std::size_t offset = 0;
  const std::size_t per_axis = (n_ + 1) * ipow(n_, dim - 1);
  for (int a = 0; a < dim; ++a) {
    axis_offset_[a] = offset;
    offset += per_axis;
  }
  axis_offset_[dim] = offset;
  facets_.resize(offset);

  for (int a = 0; a < dim; ++a) {
    for (std::size_t k = 0; k < per_axis; ++k) {
      Index3 m{0, 0, 0};
      std::size_t rest = k;
      for (int b = 0; b < dim; ++b) {
        const std::size_t ext = (b == a) ? n_ + 1 : n_;
        m[b] = rest % ext;
        rest /= ext;
      }
      Facet& f = facets_[axis_offset_[a] + k];
      f.axis = a;
      Index3 lower = m;
      Index3 upper = m;
      if (m[a] == 0) {
        f.boundary = true;
        f.normal_sign = -1;
        f.minus = cell_at(upper);
      } else if (m[a] == n_) {
        f.boundary = true;
        f.normal_sign = 1;
        lower[a] -= 1;
        f.minus = cell_at(lower);
      } else {
        f.normal_sign = 1;
        lower[a] -= 1;
        f.minus = cell_at(lower);
        f.plus = cell_at(upper);
        ++num_interior_;
      }
    }
  }
}

Index3 Mesh::cell_index(std::size_t cell) const {
  std::size_t lex = sfc_to_lex_[cell];
  Index3 m{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    m[a] = lex % n_;
    lex /= n_;
  }
  return m;
}

std::size_t Mesh::cell_at(const Index3& idx) const {
  std::size_t lex = 0;
  for (int a = dim_ - 1; a >= 0; --a) lex = lex * n_ + idx[a];
  return lex_to_sfc_[lex];
}

Point3 Mesh::cell_origin(std::size_t cell) const {
  const Index3 m = cell_index(cell);
  Point3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = static_cast<double>(m[a]) * h_;
  return x;
}

Point3 Mesh::cell_center(std::size_t cell) const {
  Point3 x = cell_origin(cell);
  for (int a = 0; a < dim_; ++a) x[a] += 0.5 * h_;
  return x;
}

std::size_t Mesh::facet_at(int axis, const Index3& m) const {
  std::size_t k = 0;
  for (int b = dim_ - 1; b >= 0; --b) {
    const std::size_t ext = (b == axis) ? n_ + 1 : n_;
    k = k * ext + m[b];
  }
  return axis_offset_[axis] + k;
}

std::size_t Mesh::cell_facet(std::size_t cell, int face) const {
  Index3 m = cell_index(cell);
  const int a = face_axis(face);
  m[a] += static_cast<std::size_t>(face_side(face));
  return facet_at(a, m);
}

std::size_t Mesh::neighbour(std::size_t cell, int face) const {
  const Facet& f = facets_[cell_facet(cell, face)];
  if (f.boundary) return kNoCell;
  return f.minus == cell ? f.plus : f.minus;
}

bool Mesh::face_on_boundary(std::size_t cell, int face) const {
  return facets_[cell_facet(cell, face)].boundary;
}

unsigned Mesh::boundary_mask(std::size_t cell) const {
  unsigned mask = 0;
  const Index3 m = cell_index(cell);
  for (int a = 0; a < dim_; ++a) {
    if (m[a] == 0) mask |= 1u << (2 * a);
    if (m[a] + 1 == n_) mask |= 1u << (2 * a + 1);
  }
  return mask;
}

std::size_t Mesh::cell_vertex(std::size_t cell, int corner) const {
  const Index3 m = cell_index(cell);
  std::size_t v = 0;
  for (int a = dim_ - 1; a >= 0; --a) v = v * (n_ + 1) + m[a] + static_cast<std::size_t>((corner >> a) & 1);
  return v;
}

Index3 Mesh::vertex_index(std::size_t v) const {
  Index3 m{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    m[a] = v % (n_ + 1);
    v /= n_ + 1;
  }
  return m;
}

Point3 Mesh::vertex_coords(std::size_t v) const {
  const Index3 m = vertex_index(v);
  Point3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = static_cast<double>(m[a]) * h_;
  return x;
}

bool Mesh::vertex_on_boundary(std::size_t v) const {
  const Index3 m = vertex_index(v);
  for (int a = 0; a < dim_; ++a)
    if (m[a] == 0 || m[a] == n_) return true;
  return false;
}

std::string Mesh::summary_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["level"] = level_;
  j["cells_per_axis"] = n_;
  j["h"] = h_;
  j["cells"] = num_cells_;
  j["interior_facets"] = num_interior_facets();
  j["boundary_facets"] = num_boundary_facets();
  j["vertices"] = num_vertices_;
  return j.dump();
}

std::vector<Mesh> build_hierarchy(int dim, int level) {
  if (level < 1 || level > kMaxLevel) throw InvalidArgument("build_hierarchy: level must lie in 1..6");
  std::vector<Mesh> meshes;
  meshes.reserve(static_cast<std::size_t>(level));
  for (int l = level; l >= 1; --l) meshes.emplace_back(dim, l);
  return meshes;
}

std::vector<std::size_t> sfc_order(const Mesh& mesh) {
  std::vector<std::size_t> order(mesh.num_cells());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = mesh.lexicographic(t);
  return order;
}

std::string to_string(PartitionMode mode) {
  return mode == PartitionMode::Balanced ? "balanced" : "geometric";
}

PartitionMode partition_mode_from_string(const std::string& name) {
  if (name == "balanced") return PartitionMode::Balanced;
  if (name == "geometric") return PartitionMode::Geometric;
  throw InvalidArgument("unknown partition mode: " + name);
}

std::vector<std::size_t> partition_sizes(std::size_t cells, PartitionMode mode, int parts) {
  if (parts < 1) throw InvalidArgument("partition: parts must be >= 1");
  const auto p = static_cast<std::size_t>(parts);
  if (p > cells) throw InvalidArgument("partition: more parts than cells");
  std::vector<std::size_t> sizes(p);
  if (mode == PartitionMode::Balanced) {
    const std::size_t q = cells / p;
    const std::size_t r = cells % p;
    for (std::size_t k = 0; k < p; ++k) sizes[k] = q + (k < r ? 1 : 0);
  } else {
    std::size_t remaining = cells;
    for (std::size_t k = 0; k + 1 < p; ++k) {
      const std::size_t later = p - k - 1;
      sizes[k] = std::clamp<std::size_t>(remaining / 2, 1, remaining - later);
      remaining -= sizes[k];
    }
    sizes[p - 1] = remaining;
  }
  return sizes;
}

Partition::Partition(const Mesh& mesh, std::vector<std::size_t> sizes) {
  begin_.assign(1, 0);
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidArgument("partition: empty subdomain");
    begin_.push_back(begin_.back() + s);
  }
  if (begin_.back() != mesh.num_cells()) throw InvalidArgument("partition: sizes do not sum to the cell count");
  owner_.resize(mesh.num_cells());
  for (int p = 0; p < parts(); ++p)
    std::fill(owner_.begin() + static_cast<std::ptrdiff_t>(begin_[p]),
              owner_.begin() + static_cast<std::ptrdiff_t>(begin_[p + 1]), p);
  interface_index_.assign(mesh.num_facets(), -1);
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fa = mesh.facet(f);
    if (!fa.boundary && owner_[fa.minus] != owner_[fa.plus]) {
      interface_index_[f] = static_cast<std::int64_t>(interface_.size());
      interface_.push_back(f);
    }
  }
}

Partition partition(const Mesh& mesh, PartitionMode mode, int parts) {
  return Partition(mesh, partition_sizes(mesh.num_cells(), mode, parts));
}

} // namespace hpmg
