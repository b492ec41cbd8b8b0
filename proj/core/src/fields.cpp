#include "hpmg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hpmg {

double norm(std::span<const double> x, NormKind kind) {
  if (kind == NormKind::Linf) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void CellField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

FacetSlots::FacetSlots(const Mesh& mesh, const Partition& part)
    : num_facets_(mesh.num_facets()), interface_(part.interface_facets()) {
  ghost_of_.assign(num_facets_, -1);
  plus_owner_.assign(num_facets_, -1);
  for (std::size_t k = 0; k < interface_.size(); ++k) {
    const std::size_t f = interface_[k];
    ghost_of_[f] = static_cast<std::int64_t>(num_facets_ + k);
    plus_owner_[f] = part.owner(mesh.facet(f).plus);
  }
}

std::size_t FacetSlots::slot(std::size_t facet, int subdomain) const {
  if (ghost_of_[facet] >= 0 && plus_owner_[facet] == subdomain) return static_cast<std::size_t>(ghost_of_[facet]);
  return facet;
}

FacetField::FacetField(std::size_t slots, std::size_t facet_dofs, FacetLayout layout)
    : layout_(layout), nf_(facet_dofs), record_((layout == FacetLayout::Projections ? 4 : 2) * facet_dofs),
      slots_(slots), data_(slots * record_, 0.0) {}

void FacetField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void exchange_interface(FacetField& field, const FacetSlots& slots) {
  const auto& iface = slots.interface_facets();
  for (std::size_t k = 0; k < iface.size(); ++k) {
    const std::size_t primary = iface[k];
    const std::size_t ghost = slots.ghost(k);
    auto pm = field.side(primary, 0);
    auto pp = field.side(primary, 1);
    auto gm = field.side(ghost, 0);
    auto gp = field.side(ghost, 1);
    std::copy(gp.begin(), gp.end(), pp.begin());
    std::copy(pm.begin(), pm.end(), gm.begin());
  }
}

VertexField::VertexField(const Mesh& mesh) : data_(mesh.num_vertices(), 0.0), boundary_(mesh.num_vertices(), 0) {
  for (std::size_t v = 0; v < data_.size(); ++v) boundary_[v] = mesh.vertex_on_boundary(v) ? 1 : 0;
}

void VertexField::apply_mask() {
  for (std::size_t v = 0; v < data_.size(); ++v)
    if (boundary_[v]) data_[v] = 0.0;
}

void VertexField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

namespace {

void write_blocks(std::ostream& os, std::span<const double> data, std::size_t block) {
  const auto old = os.precision(17);
  os << "entity,node,value\n";
  for (std::size_t k = 0; k < data.size(); ++k) os << k / block << ',' << k % block << ',' << data[k] << '\n';
  os.precision(old);
}

} // namespace

void write_csv(std::ostream& os, const CellField& field) { write_blocks(os, field.values(), field.block()); }
void write_csv(std::ostream& os, const FacetField& field) { write_blocks(os, field.values(), field.record_size()); }
void write_csv(std::ostream& os, const VertexField& field) { write_blocks(os, field.values(), 1); }

} // namespace hpmg
