#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ncplex/plex.hpp"

namespace ncplex {

/// A single reference cell with its reference complex. Simplex-family cells
/// live on the unit simplex {x >= 0, sum x <= 1}; tensor-family cells on
/// [-1,1]^d. A segment belongs to either family.
struct ReferenceCell {
  CellShape shape;
  bool simplex;
  int dim;
  Plex plex;                         // point 0 is the cell
  std::vector<double> vertex_coords;  // closure-vertex order, dim values each
  double volume;

  bool contains(std::span<const double> xi, double tol = 1e-10) const;
};

const ReferenceCell& reference_cell(CellShape shape, bool simplex);

/// Lowest-order (P1 / Q1) vertex functions of the reference cell in
/// closure-vertex order, with their reference gradients (row j = vertex j).
void vertex_basis(const ReferenceCell& ref, std::span<const double> xi, Eigen::VectorXd& values,
                  Eigen::MatrixXd& gradients);

/// Affine (simplex) or multilinear (tensor) map from a reference cell onto a
/// physical cell given by its closure-vertex coordinates.
class CellMap {
 public:
  CellMap(const ReferenceCell& ref, std::span<const double> vertex_coords, int coord_dim);

  Eigen::VectorXd map(std::span<const double> xi) const;
  /// coord_dim x ref.dim
  Eigen::MatrixXd jacobian(std::span<const double> xi) const;
  /// Determinant for square maps; the measure factor sqrt(det(J^T J)) otherwise.
  double measure_factor(std::span<const double> xi) const;
  /// Newton inversion; throws PointOutsideCell if it does not converge.
  Eigen::VectorXd inverse(std::span<const double> x) const;

  const ReferenceCell& reference() const { return *ref_; }

 private:
  const ReferenceCell* ref_;
  int coord_dim_;
  Eigen::MatrixXd vertices_;  // coord_dim x nverts
};

/// CellMap for a mesh point (any depth > 0) of `plex`, using the reference
/// cell of the given family.
CellMap point_map(const Plex& plex, PointId p, bool simplex);

/// True when y lies in the relative interior of point q (open segment, open
/// polygon, open cell). `tol` is relative to the diameter of q.
bool relative_interior_contains(const Plex& plex, PointId q, std::span<const double> y,
                                double tol = 1e-9);

/// Bounding-box diagonal of the closure vertices of p.
double point_diameter(const Plex& plex, PointId p);

}  // namespace ncplex
