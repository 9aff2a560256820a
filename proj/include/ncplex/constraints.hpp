#pragma once

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "ncplex/element.hpp"
#include "ncplex/reference_tree.hpp"
#include "ncplex/section.hpp"

namespace ncplex {

/// Coefficients expressing the nodes of one reference-tree child point in the
/// basis of its parent's closure. Scalar: components are decoupled.
struct ReferenceBlock {
  PointId child;
  PointId parent;
  /// (nodes on child) x (nodes on clos(parent)); columns follow the closure
  /// order of the parent, skipping points without nodes.
  Eigen::MatrixXd coefficients;
  /// Closure position (within closure(parent)) of each column.
  std::vector<int> column_positions;
};

/// Blocks for every reference-tree child that carries nodes, keyed by child.
/// Throws ShapeMismatch when the element does not live on the coarse cell.
std::map<PointId, ReferenceBlock> reference_constraints(const ReferenceTree& tree,
                                                        const ReferenceElement& element);

/// Sparse local-by-global interpolation matrix: row i holds the expansion of
/// local dof i in ancestor-free global dofs.
class ConstraintMatrix {
 public:
  struct Entry {
    int col;
    double value;
  };

  ConstraintMatrix() = default;
  ConstraintMatrix(int rows, int cols);
  static ConstraintMatrix identity(int n);

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }
  std::span<const Entry> row(int i) const { return rows_.at(i); }
  /// Replaces row i; columns are range checked and sorted. `constrained`
  /// marks rows of dofs on points with a tree parent.
  void set_row(int i, std::vector<Entry> entries, bool constrained = false);
  int nonzeros() const;

  bool is_constrained_row(int i) const { return constrained_.at(i) != 0; }
  int num_constrained_rows() const;

  /// local = C * global.
  Eigen::VectorXd apply(const Eigen::VectorXd& global) const;
  /// global (+)= C^T * local.
  void apply_transpose(const Eigen::VectorXd& local, Eigen::VectorXd& global,
                       bool accumulate) const;
  Eigen::MatrixXd to_dense() const;

  /// One "row col value" line per nonzero.
  void write_coo(std::ostream& out) const;

 private:
  std::vector<std::vector<Entry>> rows_;
  std::vector<char> constrained_;
  int cols_ = 0;
};

/// Hanging-node interpolation matrix for `element` on a treed plex. Entries
/// come from the reference tree; chains of constrained parents are composed
/// until every column is an ancestor-free dof. Throws InconsistentChildID when
/// a childID does not match the geometry of its point.
ConstraintMatrix build_constraint_matrix(const Plex& plex, const Section& section,
                                         const GlobalSection& global,
                                         const ReferenceElement& element);

/// Identity on unconstrained dofs; constrained rows are left empty.
ConstraintMatrix trivial_constraint_matrix(const Section& section, const GlobalSection& global);

/// Throws SizeMismatch unless C is local-size by global-size.
void check_constraint_shape(const ConstraintMatrix& c, const Section& section,
                            const GlobalSection& global);

/// Adds `delta` to the first coefficient of the first constrained row with
/// entries. Returns false when there is none.
bool perturb_first_constraint(ConstraintMatrix& c, double delta);

}  // namespace ncplex
