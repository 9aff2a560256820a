#include "ncplex/geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>

namespace ncplex {

namespace {

bool family_of(CellShape shape, bool simplex_hint) {
  return shape == CellShape::Segment || shape == CellShape::Point ? simplex_hint
                                                                   : shape_is_simplex(shape);
}

std::vector<double> input_reference_coords(CellShape shape, bool simplex) {
  switch (shape) {
    case CellShape::Point: return {};
    case CellShape::Segment: return simplex ? std::vector<double>{0, 1} : std::vector<double>{-1, 1};
    case CellShape::Triangle: return {0, 0, 1, 0, 0, 1};
    case CellShape::Quadrilateral: return {-1, -1, 1, -1, 1, 1, -1, 1};
    case CellShape::Tetrahedron: return {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1};
    case CellShape::Hexahedron:
      return {-1, -1, -1, 1, -1, -1, 1, 1, -1, -1, 1, -1,
              -1, -1, 1,  1, -1, 1,  1, 1, 1,  -1, 1, 1};
  }
  return {};
}

double reference_volume(CellShape shape, bool simplex) {
  switch (shape) {
    case CellShape::Point: return 1.0;
    case CellShape::Segment: return simplex ? 1.0 : 2.0;
    case CellShape::Triangle: return 0.5;
    case CellShape::Quadrilateral: return 4.0;
    case CellShape::Tetrahedron: return 1.0 / 6.0;
    case CellShape::Hexahedron: return 8.0;
  }
  return 0.0;
}

ReferenceCell build_reference_cell(CellShape shape, bool simplex) {
  const int dim = shape_dimension(shape);
  const auto input = input_reference_coords(shape, simplex);
  Plex plex;
  std::vector<double> closure_coords;
  if (shape == CellShape::Point) {
    const std::vector<int> sizes{1}, cone_sizes{0};
    plex = create_from_dag(sizes, cone_sizes, {}, {}, 0, {});
  } else {
    const int n = shape_num_vertices(shape);
    std::vector<int> verts(n);
    std::iota(verts.begin(), verts.end(), 0);
    plex = create_from_cell_list(shape, verts, dim, input);
    for (int idx : closure_vertex_order(shape)) {
      closure_coords.insert(closure_coords.end(), input.begin() + idx * dim,
                            input.begin() + (idx + 1) * dim);
    }
  }
  return ReferenceCell{shape, simplex, dim, std::move(plex), std::move(closure_coords),
                       reference_volume(shape, simplex)};
}

}  // namespace

bool ReferenceCell::contains(std::span<const double> xi, double tol) const {
  if (simplex) {
    double sum = 0.0;
    for (int k = 0; k < dim; ++k) {
      if (xi[k] < -tol) return false;
      sum += xi[k];
    }
    return sum <= 1.0 + tol;
  }
  for (int k = 0; k < dim; ++k) {
    if (std::abs(xi[k]) > 1.0 + tol) return false;
  }
  return true;
}

const ReferenceCell& reference_cell(CellShape shape, bool simplex) {
  static std::mutex mutex;
  static std::map<std::pair<CellShape, bool>, std::unique_ptr<ReferenceCell>> cache;
  const bool family = family_of(shape, simplex);
  std::lock_guard lock(mutex);
  auto& slot = cache[{shape, family}];
  if (!slot) slot = std::make_unique<ReferenceCell>(build_reference_cell(shape, family));
  return *slot;
}

void vertex_basis(const ReferenceCell& ref, std::span<const double> xi, Eigen::VectorXd& values,
                  Eigen::MatrixXd& gradients) {
  const int dim = ref.dim;
  const int n = static_cast<int>(ref.vertex_coords.size()) / std::max(dim, 1);
  const int nverts = ref.shape == CellShape::Point ? 1 : n;
  values.setZero(nverts);
  gradients.setZero(nverts, dim);
  if (ref.shape == CellShape::Point) {
    values[0] = 1.0;
    return;
  }
  for (int j = 0; j < nverts; ++j) {
    const double* r = ref.vertex_coords.data() + static_cast<std::size_t>(j) * dim;
    if (ref.simplex) {
      int axis = -1;
      for (int k = 0; k < dim; ++k) {
        if (r[k] > 0.5) axis = k;
      }
      if (axis < 0) {
        values[j] = 1.0;
        for (int k = 0; k < dim; ++k) {
          values[j] -= xi[k];
          gradients(j, k) = -1.0;
        }
      } else {
        values[j] = xi[axis];
        gradients(j, axis) = 1.0;
      }
    } else {
      double v = 1.0;
      for (int k = 0; k < dim; ++k) v *= 0.5 * (1.0 + r[k] * xi[k]);
      values[j] = v;
      for (int k = 0; k < dim; ++k) {
        double g = 0.5 * r[k];
        for (int l = 0; l < dim; ++l) {
          if (l != k) g *= 0.5 * (1.0 + r[l] * xi[l]);
        }
        gradients(j, k) = g;
      }
    }
  }
}

CellMap::CellMap(const ReferenceCell& ref, std::span<const double> vertex_coords, int coord_dim)
    : ref_(&ref), coord_dim_(coord_dim) {
  const int nverts = shape_num_vertices(ref.shape);
  if (vertex_coords.size() != static_cast<std::size_t>(nverts) * coord_dim) {
    throw Error(ErrorCode::SizeMismatch, "cell map needs one coordinate tuple per vertex");
  }
  vertices_.resize(coord_dim, nverts);
  for (int j = 0; j < nverts; ++j) {
    for (int k = 0; k < coord_dim; ++k) vertices_(k, j) = vertex_coords[j * coord_dim + k];
  }
}

Eigen::VectorXd CellMap::map(std::span<const double> xi) const {
  Eigen::VectorXd n;
  Eigen::MatrixXd g;
  vertex_basis(*ref_, xi, n, g);
  return vertices_ * n;
}

Eigen::MatrixXd CellMap::jacobian(std::span<const double> xi) const {
  Eigen::VectorXd n;
  Eigen::MatrixXd g;
  vertex_basis(*ref_, xi, n, g);
  return vertices_ * g;
}

double CellMap::measure_factor(std::span<const double> xi) const {
  if (ref_->dim == 0) return 1.0;
  const Eigen::MatrixXd j = jacobian(xi);
  if (j.rows() == j.cols()) return j.determinant();
  return std::sqrt((j.transpose() * j).determinant());
}

namespace {

struct InverseResult {
  Eigen::VectorXd xi;
  double residual;
};

InverseResult newton_inverse(const CellMap& map, const ReferenceCell& ref,
                             std::span<const double> x, int coord_dim) {
  Eigen::VectorXd target(coord_dim);
  for (int k = 0; k < coord_dim; ++k) target[k] = x[k];
  Eigen::VectorXd xi(ref.dim);
  xi.setConstant(ref.simplex ? 1.0 / (ref.dim + 1) : 0.0);
  double residual = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd r = target - map.map(std::span<const double>(xi.data(), xi.size()));
    residual = r.norm();
    const Eigen::MatrixXd j = map.jacobian(std::span<const double>(xi.data(), xi.size()));
    const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(r);
    xi += step;
    if (step.norm() < 1e-15) break;
  }
  residual = (target - map.map(std::span<const double>(xi.data(), xi.size()))).norm();
  return {xi, residual};
}

}  // namespace

Eigen::VectorXd CellMap::inverse(std::span<const double> x) const {
  if (ref_->dim == 0) return Eigen::VectorXd(0);
  auto res = newton_inverse(*this, *ref_, x, coord_dim_);
  const double scale = std::max(1.0, vertices_.cwiseAbs().maxCoeff());
  if (res.residual > 1e-10 * scale ||
      !ref_->contains(std::span<const double>(res.xi.data(), res.xi.size()), 1e-10)) {
    throw Error(ErrorCode::PointOutsideCell, "physical point is not inside the cell");
  }
  return res.xi;
}

CellMap point_map(const Plex& plex, PointId p, bool simplex) {
  const auto& ref = reference_cell(plex.shape(p), simplex);
  const auto coords = plex.closure_coordinates(p);
  return CellMap(ref, coords, plex.coordinate_dimension());
}

double point_diameter(const Plex& plex, PointId p) {
  const int cd = plex.coordinate_dimension();
  std::vector<double> lo(cd, 1e300), hi(cd, -1e300);
  for (PointId v : plex.closure_vertices(p)) {
    auto x = plex.vertex_coordinates(v);
    for (int k = 0; k < cd; ++k) {
      lo[k] = std::min(lo[k], x[k]);
      hi[k] = std::max(hi[k], x[k]);
    }
  }
  double d2 = 0.0;
  for (int k = 0; k < cd; ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(d2);
}

bool relative_interior_contains(const Plex& plex, PointId q, std::span<const double> y,
                                double tol) {
  if (plex.depth(q) == 0) return false;
  const CellShape shape = plex.shape(q);
  const auto& ref = reference_cell(shape, shape_is_simplex(shape));
  const auto coords = plex.closure_coordinates(q);
  const CellMap map(ref, coords, plex.coordinate_dimension());
  const double diam = point_diameter(plex, q);
  auto res = newton_inverse(map, ref, y, plex.coordinate_dimension());
  if (res.residual > tol * diam) return false;
  const auto& xi = res.xi;
  if (ref.simplex) {
    double sum = 0.0;
    for (int k = 0; k < ref.dim; ++k) {
      if (xi[k] <= tol) return false;
      sum += xi[k];
    }
    return sum < 1.0 - tol;
  }
  for (int k = 0; k < ref.dim; ++k) {
    if (std::abs(xi[k]) >= 1.0 - tol) return false;
  }
  return true;
}

}  // namespace ncplex
