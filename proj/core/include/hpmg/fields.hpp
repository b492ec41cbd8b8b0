#pragma once

/// \file fields.hpp
/// Dof containers over cells, facets and vertices.
///
/// A FacetField holds one record per storage slot. With a single subdomain
/// the slot of facet f is f. With several subdomains every interface facet
/// gets a second (ghost) slot used by the subdomain owning its K⁺ cell, so
/// that each side is written by exactly one worker; exchange_interface then
/// completes both copies.

#include "hpmg/mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hpmg {

enum class NormKind { L2, Linf };

double norm(std::span<const double> x, NormKind kind);

class CellField {
public:
  CellField() = default;
  CellField(std::size_t cells, std::size_t block) : cells_(cells), block_(block), data_(cells * block, 0.0) {}

  std::size_t cells() const { return cells_; }
  std::size_t block() const { return block_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> cell(std::size_t c) { return {data_.data() + c * block_, block_}; }
  std::span<const double> cell(std::size_t c) const { return {data_.data() + c * block_, block_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v);
  double norm(NormKind kind) const { return hpmg::norm(data_, kind); }

  friend bool operator==(const CellField&, const CellField&) = default;

private:
  std::size_t cells_ = 0;
  std::size_t block_ = 0;
  std::vector<double> data_;
};

/// Storage slot of (facet, subdomain).
class FacetSlots {
public:
  FacetSlots() = default;
  FacetSlots(const Mesh& mesh, const Partition& part);

  std::size_t num_slots() const { return num_facets_ + interface_.size(); }
  std::size_t num_facets() const { return num_facets_; }
  std::size_t slot(std::size_t facet, int subdomain) const;
  /// Ghost slot of interface facet number k.
  std::size_t ghost(std::size_t k) const { return num_facets_ + k; }
  const std::vector<std::size_t>& interface_facets() const { return interface_; }

private:
  std::size_t num_facets_ = 0;
  std::vector<std::size_t> interface_;
  std::vector<std::int64_t> ghost_of_;  ///< per facet: ghost slot or -1
  std::vector<int> plus_owner_;         ///< per facet: subdomain of K⁺ (or -1)
};

enum class FacetLayout {
  Projections, ///< [ũ⁻, ũ'⁻, ũ⁺, ũ'⁺], 4 nf values
  Fluxes       ///< [w, w'], 2 nf values
};

class FacetField {
public:
  FacetField() = default;
  FacetField(std::size_t slots, std::size_t facet_dofs, FacetLayout layout);

  FacetLayout layout() const { return layout_; }
  std::size_t facet_dofs() const { return nf_; }
  std::size_t record_size() const { return record_; }
  std::size_t slots() const { return slots_; }

  std::span<double> record(std::size_t slot) { return {data_.data() + slot * record_, record_}; }
  std::span<const double> record(std::size_t slot) const { return {data_.data() + slot * record_, record_}; }
  /// One side's [value, derivative] of a projection record (side 0 = ⁻).
  std::span<double> side(std::size_t slot, int s) { return record(slot).subspan(static_cast<std::size_t>(s) * 2 * nf_, 2 * nf_); }
  std::span<const double> side(std::size_t slot, int s) const {
    return record(slot).subspan(static_cast<std::size_t>(s) * 2 * nf_, 2 * nf_);
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  void fill(double v);

  friend bool operator==(const FacetField&, const FacetField&) = default;

private:
  FacetLayout layout_ = FacetLayout::Fluxes;
  std::size_t nf_ = 0;
  std::size_t record_ = 0;
  std::size_t slots_ = 0;
  std::vector<double> data_;
};

/// Completes both copies of every interface facet of a projection field.
void exchange_interface(FacetField& field, const FacetSlots& slots);

class VertexField {
public:
  VertexField() = default;
  explicit VertexField(const Mesh& mesh);

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t v) { return data_[v]; }
  double operator[](std::size_t v) const { return data_[v]; }
  bool boundary(std::size_t v) const { return boundary_[v] != 0; }
  /// Zero all boundary values.
  void apply_mask();

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  void fill(double v);
  double norm(NormKind kind) const { return hpmg::norm(data_, kind); }

private:
  std::vector<double> data_;
  std::vector<std::uint8_t> boundary_;
};

/// CSV rows "entity,node,value" with a header, 17 significant digits.
void write_csv(std::ostream& os, const CellField& field);
void write_csv(std::ostream& os, const FacetField& field);
void write_csv(std::ostream& os, const VertexField& field);

} // namespace hpmg
