#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncplex/error.hpp"
#include "ncplex/orientation.hpp"

namespace ncplex {

/// Index of a mesh point in the chart [0, num_points()).
using PointId = int;
inline constexpr PointId kNoPoint = -1;

enum class CellShape { Point, Segment, Triangle, Quadrilateral, Tetrahedron, Hexahedron };

int shape_dimension(CellShape shape);
int shape_num_vertices(CellShape shape);
bool shape_is_simplex(CellShape shape);
const char* shape_name(CellShape shape);

struct ConeEntry {
  PointId point;
  Orientation orientation;
  friend bool operator==(const ConeEntry&, const ConeEntry&) = default;
};

/// Half-open point range of one stratum.
struct Stratum {
  PointId begin = 0;
  PointId end = 0;
  PointId size() const { return end - begin; }
  bool contains(PointId p) const { return p >= begin && p < end; }
};

struct TreeParent {
  PointId parent;
  PointId child_id;
};

class ReferenceTree;

/// Stratified DAG of mesh points (cells first, vertices last) with ordered,
/// oriented cones, derived supports and an optional parent/child overlay for
/// hierarchically non-conformal meshes.
///
/// The object is built once (create_from_dag / create_from_cell_list, then
/// optionally set_reference_tree + set_tree) and is read-only afterwards; all
/// const queries are safe to call concurrently.
class Plex {
 public:
  Plex() = default;

  int dimension() const { return static_cast<int>(stratum_sizes_.size()) - 1; }
  int coordinate_dimension() const { return coord_dim_; }
  PointId num_points() const { return static_cast<PointId>(depth_.size()); }

  /// Height 0 is the cell stratum.
  Stratum height_stratum(int height) const;
  /// Depth 0 is the vertex stratum.
  Stratum depth_stratum(int depth) const;
  int depth(PointId p) const;
  int height(PointId p) const { return dimension() - depth(p); }
  CellShape shape(PointId p) const;

  std::vector<ConeEntry> cone(PointId p) const;
  std::span<const PointId> cone_points(PointId p) const;
  std::span<const Orientation> cone_orientations(PointId p) const;

  /// Cells one depth up whose boundary intersects p. Includes the
  /// tree-augmented entries once set_tree has run.
  std::span<const PointId> support(PointId p) const;
  /// Support derived only from cones (the conformal part).
  std::span<const PointId> cone_support(PointId p) const;

  /// p followed by its transitive cone, breadth first by decreasing depth,
  /// ties broken by first encounter in cone order. Orientations are relative
  /// to p.
  std::vector<ConeEntry> closure(PointId p) const;
  std::vector<PointId> closure_points(PointId p) const;
  /// Vertices of closure(p) in closure order.
  std::vector<PointId> closure_vertices(PointId p) const;

  /// p followed by the transitive support of p.
  std::vector<PointId> star(PointId p) const;

  std::span<const double> vertex_coordinates(PointId v) const;
  /// Coordinates of closure_vertices(p), flattened.
  std::vector<double> closure_coordinates(PointId p) const;
  /// Mean of the closure vertex coordinates.
  std::vector<double> centroid(PointId p) const;

  // --- tree overlay -------------------------------------------------------

  void set_reference_tree(std::shared_ptr<const ReferenceTree> tree);
  const std::shared_ptr<const ReferenceTree>& reference_tree() const { return reference_tree_; }

  /// parent_section holds one 0/1 count per point; parents and child_ids are
  /// listed in chart order for the points with count 1.
  void set_tree(std::span<const int> parent_section, std::span<const PointId> parents,
                std::span<const PointId> child_ids);

  bool has_tree_overlay() const { return num_constrained_ > 0; }
  /// Cone/support duality holds (no overlay entries).
  bool is_conformal() const { return num_constrained_ == 0; }
  std::optional<TreeParent> tree_parent(PointId p) const;
  std::span<const PointId> tree_children(PointId p) const;
  std::vector<PointId> constrained_points() const;
  int num_constrained_points() const { return num_constrained_; }

  /// Ancestor-free points reached by iterating closure∘parent from p.
  std::span<const PointId> anchors(PointId p) const;

 private:
  friend Plex create_from_dag(std::span<const int>, std::span<const int>,
                              std::span<const PointId>, std::span<const Orientation>, int,
                              std::span<const double>);
  friend class ReferenceTree;

  void check_point(PointId p) const;
  void build_supports();
  void install_tree(std::vector<PointId> parent, std::vector<PointId> child_id);
  std::vector<ConeEntry> oriented_cone(PointId q, Orientation o) const;

  std::vector<int> stratum_sizes_;  // by height
  std::vector<int> depth_;
  int coord_dim_ = 0;
  std::vector<int> cone_offsets_{0};
  std::vector<PointId> cone_points_;
  std::vector<Orientation> cone_orients_;
  std::vector<std::vector<PointId>> base_supports_;
  std::vector<std::vector<PointId>> supports_;
  std::vector<double> coords_;

  std::shared_ptr<const ReferenceTree> reference_tree_;
  std::vector<PointId> parent_;
  std::vector<PointId> child_id_;
  std::vector<std::vector<PointId>> children_;
  std::vector<std::vector<PointId>> anchors_;
  int num_constrained_ = 0;
};

/// Builds a plex from explicit cones. stratum_sizes lists point counts by
/// height (cells first); cone_sizes/cones/orientations are given for every
/// point in chart order; vertex_coords holds coord_dim values per vertex.
Plex create_from_dag(std::span<const int> stratum_sizes, std::span<const int> cone_sizes,
                     std::span<const PointId> cones, std::span<const Orientation> orientations,
                     int coord_dim, std::span<const double> vertex_coords);

/// Builds an interpolated plex from cell-to-vertex lists of a single shape.
/// Vertex i of the input becomes vertex point (vertex stratum begin + i).
/// Vertex order per cell: segment (a,b); polygons counter-clockwise; tet with
/// positive volume; hex bottom face counter-clockwise then the top face above it.
Plex create_from_cell_list(CellShape shape, std::span<const int> cell_vertices, int coord_dim,
                           std::span<const double> vertex_coords);

/// Position i holds the input vertex index that appears at closure-vertex
/// position i for a cell built by create_from_cell_list.
const std::vector<int>& closure_vertex_order(CellShape shape);

/// q in cone(p) <=> p in support(q) for every pair, using the tree-augmented
/// supports. Holds on conformal meshes and fails once hanging points exist.
bool check_cone_support_duality(const Plex& plex);

/// Vertex points of `cell` in create_from_cell_list input order.
std::vector<PointId> cell_input_vertices(const Plex& plex, PointId cell);

}  // namespace ncplex
