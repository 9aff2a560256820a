#include "ncplex/section.hpp"

namespace ncplex {

Section::Section(std::vector<int> dofs) : dof_(std::move(dofs)), offset_(dof_.size(), 0) {
  for (std::size_t p = 0; p < dof_.size(); ++p) {
    if (dof_[p] < 0) throw Error(ErrorCode::InvalidArgument, "negative dof count");
    offset_[p] = size_;
    size_ += dof_[p];
  }
}

GlobalSection::GlobalSection(const Section& local, std::vector<char> constrained)
    : local_(local), constrained_(std::move(constrained)), offset_(local.num_points(), -1) {
  if (static_cast<PointId>(constrained_.size()) != local.num_points()) {
    throw Error(ErrorCode::SizeMismatch, "constrained markers must cover the chart");
  }
  for (PointId p = 0; p < local.num_points(); ++p) {
    if (constrained_[p]) continue;
    offset_[p] = size_;
    size_ += local.dof(p);
  }
}

Section section_from_element(const Plex& plex, const ReferenceElement& element) {
  if (plex.dimension() != element.dimension()) {
    throw Error(ErrorCode::UnsupportedShape, "element dimension differs from the mesh");
  }
  std::vector<int> dofs(plex.num_points(), 0);
  for (PointId p = 0; p < plex.num_points(); ++p) dofs[p] = element.dofs_on(plex.shape(p));
  return Section(std::move(dofs));
}

GlobalSection global_section(const Plex& plex, const Section& section) {
  if (section.num_points() != plex.num_points()) {
    throw Error(ErrorCode::SizeMismatch, "section chart differs from the mesh");
  }
  std::vector<char> constrained(plex.num_points(), 0);
  for (PointId p : plex.constrained_points()) constrained[p] = 1;
  return GlobalSection(section, std::move(constrained));
}

std::vector<int> closure_dof_indices(const Plex& plex, const Section& section, PointId cell) {
  if (cell < 0 || cell >= plex.num_points() || !plex.height_stratum(0).contains(cell)) {
    throw Error(ErrorCode::BadCell, "point " + std::to_string(cell) + " is not a cell");
  }
  std::vector<int> out;
  for (PointId p : plex.closure_points(cell)) {
    for (int d = 0; d < section.dof(p); ++d) out.push_back(section.offset(p) + d);
  }
  return out;
}

}  // namespace ncplex
