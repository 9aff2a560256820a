#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ncplex/constraints.hpp"
#include "ncplex/element.hpp"
#include "ncplex/section.hpp"

namespace ncplex {

/// Square CSR matrix with a pattern fixed at construction. Adding outside the
/// pattern throws SparsityViolation.
class SystemMatrix {
 public:
  SystemMatrix() = default;
  /// pattern[i] lists the columns of row i (any order, duplicates allowed).
  SystemMatrix(int n, std::vector<std::vector<int>> pattern);

  int size() const { return n_; }
  int nonzeros() const { return static_cast<int>(cols_.size()); }
  bool has_entry(int row, int col) const;
  double get(int row, int col) const;
  void add(int row, int col, double value);
  void zero();

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;
  /// Max absolute row sum.
  double norm_inf() const;
  bool structurally_symmetric() const;

  std::span<const int> row_columns(int row) const;

 private:
  int find(int row, int col) const;

  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

enum class InsertMode { Insert = 0, Add = 1 };

/// Values of closure(cell) in closure order (element dof order).
Eigen::VectorXd vec_get_closure(const Plex& plex, const Section& section,
                                const Eigen::VectorXd& local, PointId cell);
/// Inverse scatter of vec_get_closure. Throws BadMode for an unknown mode.
void vec_set_closure(const Plex& plex, const Section& section, Eigen::VectorXd& local,
                     PointId cell, std::span<const double> values, InsertMode mode);

/// local = C * global.
Eigen::VectorXd global_to_local(const ConstraintMatrix& c, const Eigen::VectorXd& global);
/// global += C^T * local.
void local_to_global_add(const ConstraintMatrix& c, const Eigen::VectorXd& local,
                         Eigen::VectorXd& global);

/// Adds C_cell^T A_e C_cell, C_cell being the rows of the cell's closure dofs.
void mat_set_closure(const Plex& plex, const Section& section, const ConstraintMatrix& c,
                     SystemMatrix& matrix, PointId cell, const Eigen::MatrixXd& element_matrix);

/// Pattern: for every cell, all pairs of global dofs of its closure points,
/// where constrained points contribute the dofs of their anchors.
SystemMatrix create_matrix(const Plex& plex, const GlobalSection& global);

/// Element matrix of E(u,v) = int sym(grad u) : sym(grad v) on one cell.
/// Requires components == dimension == coordinate dimension.
Eigen::MatrixXd symmetric_gradient_element_matrix(const Plex& plex,
                                                  const ReferenceElement& element, PointId cell);

SystemMatrix assemble_symmetric_gradient(const Plex& plex, const Section& section,
                                         const GlobalSection& global, const ConstraintMatrix& c,
                                         const ReferenceElement& element);

/// Residual loop: for every cell, restrict the local form of u, apply the
/// element matrix and add back; then map to global with C^T.
Eigen::VectorXd symmetric_gradient_residual(const Plex& plex, const Section& section,
                                            const ConstraintMatrix& c,
                                            const ReferenceElement& element,
                                            const Eigen::VectorXd& u_global);

/// Physical location of the node owned by each point (row p); NaN rows for
/// points without nodes.
Eigen::MatrixXd node_coordinates(const Plex& plex, const ReferenceElement& element);

/// Interpolates a vector field f(x) -> R^components at ancestor-free nodes.
template <class F>
Eigen::VectorXd interpolate_global(const Plex& plex, const GlobalSection& global,
                                   const Eigen::MatrixXd& nodes, F&& f) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(global.global_size());
  for (PointId p = 0; p < plex.num_points(); ++p) {
    const int ndof = global.local().dof(p);
    if (global.constrained(p) || ndof == 0) continue;
    const Eigen::VectorXd x = nodes.row(p).transpose();
    const Eigen::VectorXd v = f(x);
    for (int c = 0; c < ndof; ++c) g[global.offset(p) + c] = v[c];
  }
  return g;
}

/// Translations and infinitesimal rotations, d(d+1)/2 global vectors.
/// Throws BadField unless the element has one component per dimension.
std::vector<Eigen::VectorXd> rigid_body_modes(const Plex& plex, const GlobalSection& global,
                                              const ReferenceElement& element);

/// max over modes of ||E m||_inf / (||E||_inf ||m||_inf).
double null_space_residual(const SystemMatrix& matrix, const std::vector<Eigen::VectorXd>& modes);
/// null_space_residual <= tol.
bool null_space_test(const SystemMatrix& matrix, const std::vector<Eigen::VectorXd>& modes,
                     double tol = 1e-9);

}  // namespace ncplex
