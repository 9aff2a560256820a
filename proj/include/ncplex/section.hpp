#pragma once

#include <span>
#include <vector>

#include "ncplex/element.hpp"
#include "ncplex/plex.hpp"

namespace ncplex {

/// Point -> contiguous dof range of the local vector.
class Section {
 public:
  Section() = default;
  /// dof count per point of the chart [0, dofs.size()).
  explicit Section(std::vector<int> dofs);

  PointId num_points() const { return static_cast<PointId>(dof_.size()); }
  int dof(PointId p) const { return dof_.at(p); }
  int offset(PointId p) const { return offset_.at(p); }
  int storage_size() const { return size_; }

 private:
  std::vector<int> dof_;
  std::vector<int> offset_;
  int size_ = 0;
};

/// Global numbering over ancestor-free points only. Constrained points keep
/// their local offsets but have no global offset.
class GlobalSection {
 public:
  GlobalSection() = default;
  GlobalSection(const Section& local, std::vector<char> constrained);

  const Section& local() const { return local_; }
  bool constrained(PointId p) const { return constrained_.at(p) != 0; }
  /// First global index of p; -1 for constrained points.
  int offset(PointId p) const { return offset_.at(p); }
  int global_size() const { return size_; }

 private:
  Section local_;
  std::vector<char> constrained_;
  std::vector<int> offset_;
  int size_ = 0;
};

/// dof(p) = nodes the element puts on a point of p's shape times components.
/// Throws UnsupportedShape when the element has no layout for a mesh shape.
Section section_from_element(const Plex& plex, const ReferenceElement& element);

GlobalSection global_section(const Plex& plex, const Section& section);

/// Local dof indices of closure(cell) in closure order; the element's dof
/// order for that cell. Throws BadCell unless cell is in the height-0 stratum.
std::vector<int> closure_dof_indices(const Plex& plex, const Section& section, PointId cell);

}  // namespace ncplex
