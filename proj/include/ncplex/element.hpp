#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "ncplex/geometry.hpp"

namespace ncplex {

/// Nodal Lagrange element, P_k on simplices and Q_k on tensor cells, k in {1,2}.
/// Every node is owned by one point of the reference complex and sits at that
/// point's centroid, so a point owns at most one node. Nodes are listed in
/// the closure order of the reference cell; a vector element with c
/// components numbers its dofs node-major: dof = node * c + component.
class ReferenceElement {
 public:
  struct Node {
    std::vector<double> xi;
    int closure_position;  // index into closure(reference cell)
  };

  /// `simplex` picks the family; it only matters for segments.
  ReferenceElement(CellShape shape, int degree, int components, bool simplex);
  ReferenceElement(CellShape shape, int degree, int components = 1)
      : ReferenceElement(shape, degree, components, shape_is_simplex(shape)) {}

  /// Parses "p1", "p2", "q1", "q2" for the cell shape of the given dimension.
  static ReferenceElement from_name(const std::string& name, int dim, int components);

  CellShape shape() const { return cell_->shape; }
  bool simplex() const { return cell_->simplex; }
  int dimension() const { return cell_->dim; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  const ReferenceCell& cell() const { return *cell_; }
  std::string name() const;

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_dofs() const { return num_nodes() * components_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Nodes owned by a mesh point of the given shape (0 or 1).
  int nodes_on(CellShape point_shape) const;
  /// Scalar nodes times components.
  int dofs_on(CellShape point_shape) const { return nodes_on(point_shape) * components_; }

  /// values(i, j) = psi_j(x_i); gradients[i](j, k) = d psi_j / d xi_k at x_i.
  /// `points` holds dimension() coordinates per point. Throws PointOutsideCell.
  void tabulate(std::span<const double> points, Eigen::MatrixXd& values,
                std::vector<Eigen::MatrixXd>* gradients = nullptr) const;

  /// Physical node locations (coord_dim values per node) for a cell with the
  /// given closure-vertex coordinates. Throws DegenerateCell when the map
  /// orientation is non-positive at any node.
  std::vector<double> pushforward_functionals(std::span<const double> vertex_coords,
                                              int coord_dim) const;

 private:
  void monomials(std::span<const double> x, Eigen::VectorXd& values, Eigen::MatrixXd* grads) const;

  const ReferenceCell* cell_;
  int degree_;
  int components_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> exponents_;
  Eigen::MatrixXd coefficients_;  // monomial l -> basis j
};

/// Quadrature rule on a reference cell: weights sum to the cell volume.
struct Quadrature {
  int dim = 0;
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule with n points on [-1,1].
Quadrature gauss_legendre(int n);

/// Simplices: collapsed (Duffy) Gauss rules exact to `degree`. Tensor cells:
/// tensor Gauss with `points_per_direction` points.
Quadrature simplex_quadrature(int dim, int degree);
Quadrature tensor_quadrature(int dim, int points_per_direction);

/// Rule used for element integrals: simplex exact to 2k, tensor k+1 points.
Quadrature element_quadrature(const ReferenceElement& element);

}  // namespace ncplex
