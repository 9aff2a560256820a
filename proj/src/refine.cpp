#include "ncplex/refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ncplex/geometry.hpp"

namespace ncplex {

namespace {

double orientation_det(const std::vector<double>& coords, int dim, std::span<const int> cell) {
  Eigen::MatrixXd m(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) m(k, j) = coords[cell[j + 1] * dim + k] - coords[cell[0] * dim + k];
  }
  return m.determinant();
}

CellShape single_cell_shape(const Plex& plex) {
  const Stratum cells = plex.height_stratum(0);
  if (cells.size() == 0) throw Error(ErrorCode::InvalidArgument, "mesh has no cells");
  const CellShape shape = plex.shape(cells.begin);
  for (PointId c = cells.begin; c < cells.end; ++c) {
    if (plex.shape(c) != shape) throw Error(ErrorCode::UnsupportedShape, "mixed cell shapes");
  }
  return shape;
}

}  // namespace

Plex generate_box(int dim, bool simplex, std::span<const int> cells) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::BadDimension, "box dimension must be 1, 2 or 3");
  if (static_cast<int>(cells.size()) != dim) {
    throw Error(ErrorCode::SizeMismatch, "need one division count per dimension");
  }
  std::array<int, 3> n{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    if (cells[k] < 1) throw Error(ErrorCode::InvalidArgument, "division counts must be positive");
    n[k] = cells[k];
  }
  const int nx = n[0] + 1, ny = dim > 1 ? n[1] + 1 : 1, nz = dim > 2 ? n[2] + 1 : 1;
  std::vector<double> coords;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::array<double, 3> x{double(i) / n[0], double(j) / n[1], double(k) / n[2]};
        coords.insert(coords.end(), x.begin(), x.begin() + dim);
      }
    }
  }
  auto vid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

  std::vector<int> conn;
  CellShape shape = CellShape::Segment;
  if (dim == 1) {
    for (int i = 0; i < n[0]; ++i) conn.insert(conn.end(), {i, i + 1});
  } else if (dim == 2) {
    shape = simplex ? CellShape::Triangle : CellShape::Quadrilateral;
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const int v00 = vid(i, j, 0), v10 = vid(i + 1, j, 0), v11 = vid(i + 1, j + 1, 0),
                  v01 = vid(i, j + 1, 0);
        if (simplex) {
          conn.insert(conn.end(), {v00, v10, v11, v00, v11, v01});
        } else {
          conn.insert(conn.end(), {v00, v10, v11, v01});
        }
      }
    }
  } else {
    shape = simplex ? CellShape::Tetrahedron : CellShape::Hexahedron;
    for (int k = 0; k < n[2]; ++k) {
      for (int j = 0; j < n[1]; ++j) {
        for (int i = 0; i < n[0]; ++i) {
          auto corner = [&](int bits) { return vid(i + (bits & 1), j + ((bits >> 1) & 1), k + ((bits >> 2) & 1)); };
          if (!simplex) {
            for (int b : {0, 1, 3, 2, 4, 5, 7, 6}) conn.push_back(corner(b));
            continue;
          }
          std::array<int, 3> axes{0, 1, 2};
          do {
            std::array<int, 4> tet{};
            int bits = 0;
            tet[0] = corner(bits);
            for (int s = 0; s < 3; ++s) {
              bits |= 1 << axes[s];
              tet[s + 1] = corner(bits);
            }
            if (orientation_det(coords, 3, tet) < 0.0) std::swap(tet[2], tet[3]);
            conn.insert(conn.end(), tet.begin(), tet.end());
          } while (std::next_permutation(axes.begin(), axes.end()));
        }
      }
    }
  }
  return create_from_cell_list(shape, conn, dim, coords);
}

std::shared_ptr<const ReferenceTree> default_tree_for(CellShape cell_shape) {
  const int dim = shape_dimension(cell_shape);
  const bool simplex = cell_shape == CellShape::Segment || shape_is_simplex(cell_shape);
  return create_default_reference_tree(dim, simplex);
}

void build_tree_from_geometry(Plex& plex, std::shared_ptr<const ReferenceTree> tree) {
  if (!tree) throw Error(ErrorCode::NoReferenceTree, "reference tree required");
  const Plex& t = tree->plex();
  const bool simplex = tree->simplex();
  std::vector<PointId> candidates;
  for (PointId p = 0; p < plex.num_points(); ++p) {
    if (plex.depth(p) > 0) candidates.push_back(p);
  }
  const auto parents = geometric_parents(plex, candidates);

  std::vector<int> section(plex.num_points(), 0);
  std::vector<PointId> parent_list, child_ids;
  for (PointId x = 0; x < plex.num_points(); ++x) {
    const PointId q = parents[x];
    if (q == kNoPoint) continue;
    const PointId q_ref = tree->coarse_point_like(plex.depth(q), plex.shape(q));
    if (q_ref == kNoPoint) {
      throw Error(ErrorCode::InconsistentChildID,
                  std::string("reference tree has no coarse ") + shape_name(plex.shape(q)));
    }
    const CellMap ref_map = point_map(t, q_ref, simplex);
    const CellMap mesh_map = point_map(plex, q, simplex);
    const auto cx = plex.centroid(x);
    const double tol = 1e-8 * point_diameter(plex, q);
    PointId match = kNoPoint;
    for (PointId r : t.tree_children(q_ref)) {
      if (t.depth(r) != plex.depth(x) || t.shape(r) != plex.shape(x)) continue;
      const Eigen::VectorXd xi = ref_map.inverse(t.centroid(r));
      const Eigen::VectorXd y = mesh_map.map(std::span<const double>(xi.data(), xi.size()));
      double err = 0.0;
      for (int k = 0; k < plex.coordinate_dimension(); ++k) err = std::max(err, std::abs(y[k] - cx[k]));
      if (err <= tol) {
        match = r;
        break;
      }
    }
    if (match == kNoPoint) {
      throw Error(ErrorCode::InconsistentChildID,
                  "point " + std::to_string(x) + " matches no child of reference point " +
                      std::to_string(q_ref) + " in " + tree->name());
    }
    section[x] = 1;
    parent_list.push_back(q);
    child_ids.push_back(match);
  }
  plex.set_reference_tree(std::move(tree));
  plex.set_tree(section, parent_list, child_ids);
}

Plex refine_cell(const Plex& plex, PointId cell) {
  if (plex.has_tree_overlay()) throw Error(ErrorCode::AlreadyTreed, "input mesh already has a tree");
  if (cell < 0 || cell >= plex.num_points() || !plex.height_stratum(0).contains(cell)) {
    throw Error(ErrorCode::BadCell, "point " + std::to_string(cell) + " is not a cell");
  }
  const CellShape shape = single_cell_shape(plex);
  const int cd = plex.coordinate_dimension();
  const auto tree = default_tree_for(shape);
  const Plex& t = tree->plex();

  const Stratum verts = plex.depth_stratum(0);
  std::vector<double> coords;
  for (PointId v = verts.begin; v < verts.end; ++v) {
    auto x = plex.vertex_coordinates(v);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  const double tol = 1e-10 * std::max(point_diameter(plex, cell), 1e-300);
  auto vertex_index = [&](const Eigen::VectorXd& x) {
    const int nv = static_cast<int>(coords.size()) / cd;
    for (int i = 0; i < nv; ++i) {
      double err = 0.0;
      for (int k = 0; k < cd; ++k) err = std::max(err, std::abs(coords[i * cd + k] - x[k]));
      if (err <= tol) return i;
    }
    coords.insert(coords.end(), x.data(), x.data() + cd);
    return nv;
  };

  std::vector<int> conn;
  const Stratum cells = plex.height_stratum(0);
  for (PointId c = cells.begin; c < cells.end; ++c) {
    if (c == cell) continue;
    for (PointId v : cell_input_vertices(plex, c)) conn.push_back(v - verts.begin);
  }
  const CellMap map = point_map(plex, cell, tree->simplex());
  const Stratum tcells = t.height_stratum(0);
  for (PointId child = tcells.begin; child < tcells.end; ++child) {
    if (child == tree->coarse_cell()) continue;
    for (PointId v : cell_input_vertices(t, child)) {
      conn.push_back(vertex_index(map.map(t.vertex_coordinates(v))));
    }
  }
  Plex refined = create_from_cell_list(shape, conn, cd, coords);
  build_tree_from_geometry(refined, tree);
  return refined;
}

}  // namespace ncplex
