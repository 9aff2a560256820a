#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "ncplex/plex.hpp"

namespace ncplex {

/// A small treed mesh encoding one refinement pattern. Point 0 is the coarse
/// reference cell; its closure is the reference complex and carries no
/// parents. Every other point has a parent in the tree and is its own childID.
/// Coordinates are reference coordinates of the coarse cell.
class ReferenceTree {
 public:
  /// Isotropic refinement: segment -> 2, triangle/quad -> 4, tet/hex -> 8.
  /// The tetrahedral octahedron is split along the diagonal joining the
  /// midpoints of edges (0,1) and (2,3); all three diagonals have equal
  /// length on the reference simplex and this is the first in index order.
  static std::shared_ptr<const ReferenceTree> create_default(int dim, bool simplex);

  /// Green refinement of a triangle: the coarse edge b = (v1,v2) is bisected
  /// and the cell split in two. Numbering: cells 0..2, edges a=3, b=4, c=5,
  /// bisector 6, e=7, f=8, vertices 9..11 and the midpoint of b at 12.
  static std::shared_ptr<const ReferenceTree> create_green_triangle();

  /// Wraps any plex whose point 0 is the coarse cell. `parents` gives one
  /// entry per point (kNoPoint for the coarse closure).
  static std::shared_ptr<const ReferenceTree> from_plex(std::string name, bool simplex, Plex plex,
                                                         std::vector<PointId> parents);

  const std::string& name() const { return name_; }
  bool simplex() const { return simplex_; }
  int dimension() const { return plex_.dimension(); }
  const Plex& plex() const { return plex_; }
  PointId coarse_cell() const { return 0; }

  /// Affine map x = linear * xi + offset from the child point's own reference
  /// frame (its shape's reference cell, with closure vertices matched in
  /// order) into the coarse cell's reference coordinates.
  struct AffineMap {
    Eigen::MatrixXd linear;
    Eigen::VectorXd offset;
    Eigen::VectorXd apply(const Eigen::VectorXd& xi) const { return linear * xi + offset; }
  };
  AffineMap child_to_parent_map(PointId child) const;

  /// First point of the coarse closure with the given depth and shape, or kNoPoint.
  PointId coarse_point_like(int depth, CellShape shape) const;

 private:
  ReferenceTree() = default;

  std::string name_;
  bool simplex_ = true;
  Plex plex_;
};

std::shared_ptr<const ReferenceTree> create_default_reference_tree(int dim, bool simplex);

/// Resolves "default-simplex-<d>", "default-hypercube-<d>" and "green-triangle".
std::shared_ptr<const ReferenceTree> reference_tree_by_name(const std::string& name);

/// Parent of every point of `plex`: the smallest point among `candidates`
/// (vertices ignored) of depth at least the point's own whose relative
/// interior contains the point's centroid. kNoPoint where none does.
std::vector<PointId> geometric_parents(const Plex& plex, std::span<const PointId> candidates);

}  // namespace ncplex
