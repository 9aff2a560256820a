#pragma once

#include <memory>
#include <span>

#include "ncplex/plex.hpp"
#include "ncplex/reference_tree.hpp"

namespace ncplex {

/// Conformal mesh of the unit box with cells[k] divisions along axis k.
/// Simplices split each square along (0,0)-(1,1) and each cube into the six
/// tetrahedra of its main diagonal.
Plex generate_box(int dim, bool simplex, std::span<const int> cells);

/// Infers the tree overlay of an interpolated plex from its geometry: a point
/// whose centroid lies in the relative interior of a larger point gets that
/// point as parent, and the childID is the child of the corresponding coarse
/// point of `tree` occupying the same relative position. Throws
/// InconsistentChildID when a hanging point matches no reference child.
void build_tree_from_geometry(Plex& plex, std::shared_ptr<const ReferenceTree> tree);

/// Replaces `cell` by the children of the default reference tree for its
/// shape. Remaining cells keep their order and the children are appended;
/// the hanging interface becomes the tree overlay. Throws AlreadyTreed when
/// the input has an overlay and BadCell when `cell` is not a cell.
Plex refine_cell(const Plex& plex, PointId cell);

/// Reference tree used for a mesh of the given cell shape.
std::shared_ptr<const ReferenceTree> default_tree_for(CellShape cell_shape);

}  // namespace ncplex
