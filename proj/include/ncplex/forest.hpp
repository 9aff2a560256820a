#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ncplex/plex.hpp"

namespace ncplex {

using Morton = unsigned __int128;

/// One leaf of a quadtree/octree. The anchor is the lower corner in units of
/// 2^-kMaxLevel of its root; the side is 2^(kMaxLevel - level) units.
struct Quadrant {
  int root = 0;
  int level = 0;
  std::array<std::uint32_t, 3> anchor{0, 0, 0};

  friend bool operator==(const Quadrant&, const Quadrant&) = default;
};

/// Forest of quadtrees (2D) or octrees (3D) over unit roots placed on an
/// integer lattice. Leaves are kept sorted by (root, Morton index).
class Forest {
 public:
  static constexpr int kMaxLevel = 29;

  /// Roots at the given integer lattice origins (unused coordinates ignored).
  Forest(int dim, std::vector<std::array<int, 3>> root_origins);
  /// roots_per_axis[k] roots along axis k, x fastest.
  static Forest brick(int dim, std::span<const int> roots_per_axis);

  int dimension() const { return dim_; }
  int num_roots() const { return static_cast<int>(roots_.size()); }
  const std::vector<std::array<int, 3>>& root_origins() const { return roots_; }
  const std::vector<Quadrant>& leaves() const { return leaves_; }
  int num_leaves() const { return static_cast<int>(leaves_.size()); }

  /// Bits of the anchor interleaved, x lowest.
  Morton morton(const Quadrant& q) const;

  /// Replaces every leaf with pred(root, level, morton) true by its 2^dim
  /// children. Throws LevelOverflow for a flagged leaf at kMaxLevel.
  Forest refine(const std::function<bool(int, int, Morton)>& pred) const;

  /// Smallest refinement in which leaves sharing an edge or face differ by at
  /// most one level.
  Forest balance_2to1() const;
  bool is_balanced() const;

  /// Leaves whose closed boxes meet in a set of dimension >= 1 without
  /// overlapping interiors.
  bool adjacent(const Quadrant& a, const Quadrant& b) const;

  /// Lower corner and side in global units of 2^-kMaxLevel.
  std::array<std::int64_t, 3> global_anchor(const Quadrant& q) const;
  static std::int64_t side(int level) { return std::int64_t{1} << (kMaxLevel - level); }

 private:
  Forest() = default;
  void sort_leaves();

  int dim_ = 2;
  std::vector<std::array<int, 3>> roots_;
  std::vector<Quadrant> leaves_;
};

/// One quad/hex cell per leaf with shared vertices identified; hanging
/// interfaces become the tree overlay against the default hypercube tree.
/// Throws Unbalanced when the forest is not 2:1 balanced.
Plex convert_to_plex(const Forest& forest);

}  // namespace ncplex
