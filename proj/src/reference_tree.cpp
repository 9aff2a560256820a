#include "ncplex/reference_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "ncplex/geometry.hpp"

namespace ncplex {

namespace {

using Coord = std::vector<double>;

CellShape cell_shape_for(int dim, bool simplex) {
  switch (dim) {
    case 1: return CellShape::Segment;
    case 2: return simplex ? CellShape::Triangle : CellShape::Quadrilateral;
    case 3: return simplex ? CellShape::Tetrahedron : CellShape::Hexahedron;
    default: throw Error(ErrorCode::BadDimension, "dimension must be 1, 2 or 3");
  }
}

std::vector<Coord> input_vertices(const ReferenceCell& ref) {
  const auto& order = closure_vertex_order(ref.shape);
  std::vector<Coord> out(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    out[order[pos]] = Coord(ref.vertex_coords.begin() + pos * ref.dim,
                            ref.vertex_coords.begin() + (pos + 1) * ref.dim);
  }
  return out;
}

Coord midpoint(const Coord& a, const Coord& b) {
  Coord m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

double simplex_volume_sign(const std::vector<Coord>& v) {
  const std::size_t d = v[0].size();
  Eigen::MatrixXd m(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) m(k, j) = v[j + 1][k] - v[0][k];
  }
  return m.determinant();
}

std::vector<std::vector<Coord>> child_cells(CellShape shape, const std::vector<Coord>& v) {
  std::vector<std::vector<Coord>> cells;
  switch (shape) {
    case CellShape::Segment: {
      const Coord m = midpoint(v[0], v[1]);
      cells = {{v[0], m}, {m, v[1]}};
      break;
    }
    case CellShape::Triangle: {
      const Coord m01 = midpoint(v[0], v[1]), m12 = midpoint(v[1], v[2]), m20 = midpoint(v[2], v[0]);
      cells = {{v[0], m01, m20}, {m01, v[1], m12}, {m20, m12, v[2]}, {m01, m12, m20}};
      break;
    }
    case CellShape::Tetrahedron: {
      auto m = [&](int a, int b) { return midpoint(v[a], v[b]); };
      const Coord m01 = m(0, 1), m02 = m(0, 2), m03 = m(0, 3), m12 = m(1, 2), m13 = m(1, 3),
                  m23 = m(2, 3);
      cells = {{v[0], m01, m02, m03}, {m01, v[1], m12, m13}, {m02, m12, v[2], m23},
               {m03, m13, m23, v[3]}, {m01, m23, m02, m03}, {m01, m23, m03, m13},
               {m01, m23, m13, m12}, {m01, m23, m12, m02}};
      break;
    }
    case CellShape::Quadrilateral: {
      for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
          const double x0 = -1.0 + i, x1 = x0 + 1.0, y0 = -1.0 + j, y1 = y0 + 1.0;
          cells.push_back({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
        }
      }
      break;
    }
    case CellShape::Hexahedron: {
      for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) {
          for (int i = 0; i < 2; ++i) {
            const double x0 = -1.0 + i, x1 = x0 + 1.0, y0 = -1.0 + j, y1 = y0 + 1.0,
                         z0 = -1.0 + k, z1 = z0 + 1.0;
            cells.push_back({{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0},
                             {x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}});
          }
        }
      }
      break;
    }
    default: break;
  }
  if (shape_is_simplex(shape)) {
    for (auto& c : cells) {
      if (simplex_volume_sign(c) < 0.0) std::swap(c[c.size() - 1], c[c.size() - 2]);
    }
  }
  return cells;
}

}  // namespace

std::vector<PointId> geometric_parents(const Plex& plex, std::span<const PointId> candidates) {
  const PointId n = plex.num_points();
  const int cd = plex.coordinate_dimension();
  struct Candidate {
    PointId point;
    int depth;
    double diameter;
    std::vector<double> lo, hi;
  };
  std::vector<Candidate> cands;
  std::vector<char> is_candidate(n, 0);
  for (PointId q : candidates) {
    if (plex.depth(q) == 0) continue;
    Candidate c{q, plex.depth(q), point_diameter(plex, q), std::vector<double>(cd, 1e300),
                std::vector<double>(cd, -1e300)};
    for (PointId v : plex.closure_vertices(q)) {
      auto x = plex.vertex_coordinates(v);
      for (int k = 0; k < cd; ++k) {
        c.lo[k] = std::min(c.lo[k], x[k]);
        c.hi[k] = std::max(c.hi[k], x[k]);
      }
    }
    cands.push_back(std::move(c));
    is_candidate[q] = 1;
  }
  std::vector<PointId> parent(n, kNoPoint);
  for (PointId x = 0; x < n; ++x) {
    const int dx = plex.depth(x);
    const auto y = plex.centroid(x);
    const double diam_x = dx == 0 ? 0.0 : point_diameter(plex, x);
    double best = 1e300;
    for (const auto& c : cands) {
      if (c.point == x || c.depth < dx || c.diameter <= diam_x * (1.0 + 1e-9)) continue;
      if (c.diameter >= best) continue;
      const double slack = 1e-9 * c.diameter;
      bool inside = true;
      for (int k = 0; k < cd && inside; ++k) {
        inside = y[k] >= c.lo[k] - slack && y[k] <= c.hi[k] + slack;
      }
      if (!inside || !relative_interior_contains(plex, c.point, y)) continue;
      best = c.diameter;
      parent[x] = c.point;
    }
  }
  return parent;
}

std::shared_ptr<const ReferenceTree> ReferenceTree::from_plex(std::string name, bool simplex,
                                                               Plex plex,
                                                               std::vector<PointId> parents) {
  if (static_cast<PointId>(parents.size()) != plex.num_points()) {
    throw Error(ErrorCode::SizeMismatch, "reference tree parents must cover the chart");
  }
  std::vector<PointId> child_id(parents.size(), kNoPoint);
  for (std::size_t p = 0; p < parents.size(); ++p) {
    if (parents[p] != kNoPoint) child_id[p] = static_cast<PointId>(p);
  }
  for (PointId p : plex.closure_points(0)) {
    if (parents[p] != kNoPoint) {
      throw Error(ErrorCode::InvalidArgument, "coarse reference complex points cannot have parents");
    }
  }
  plex.install_tree(std::move(parents), std::move(child_id));
  std::shared_ptr<ReferenceTree> tree(new ReferenceTree());
  tree->name_ = std::move(name);
  tree->simplex_ = simplex;
  tree->plex_ = std::move(plex);
  return tree;
}

std::shared_ptr<const ReferenceTree> ReferenceTree::create_default(int dim, bool simplex) {
  const CellShape shape = cell_shape_for(dim, simplex);
  const auto& ref = reference_cell(shape, simplex);
  const auto coarse = input_vertices(ref);

  std::vector<Coord> vertices = coarse;
  auto vertex_id = [&](const Coord& x) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] == x) return static_cast<int>(i);
    }
    vertices.push_back(x);
    return static_cast<int>(vertices.size()) - 1;
  };
  std::vector<int> cells;
  for (std::size_t i = 0; i < coarse.size(); ++i) cells.push_back(static_cast<int>(i));
  for (const auto& child : child_cells(shape, coarse)) {
    for (const auto& x : child) cells.push_back(vertex_id(x));
  }
  std::vector<double> flat;
  for (const auto& x : vertices) flat.insert(flat.end(), x.begin(), x.end());
  Plex plex = create_from_cell_list(shape, cells, dim, flat);

  const auto coarse_closure = plex.closure_points(0);
  auto parents = geometric_parents(plex, coarse_closure);
  for (PointId p = 0; p < plex.num_points(); ++p) {
    const bool in_coarse =
        std::find(coarse_closure.begin(), coarse_closure.end(), p) != coarse_closure.end();
    if (!in_coarse && parents[p] == kNoPoint) {
      throw Error(ErrorCode::InvalidArgument, "reference tree point without a coarse parent");
    }
    if (in_coarse) parents[p] = kNoPoint;
  }
  const std::string name =
      std::string("default-") + (simplex ? "simplex-" : "hypercube-") + std::to_string(dim);
  return from_plex(name, simplex, std::move(plex), std::move(parents));
}

std::shared_ptr<const ReferenceTree> ReferenceTree::create_green_triangle() {
  // cells 0 (coarse), 1 = (v0,v1,m), 2 = (v0,m,v2)
  const std::vector<int> sizes{3, 6, 4};
  const std::vector<int> cone_sizes{3, 3, 3, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0};
  const std::vector<PointId> cones{3, 4, 5,  3, 7, 6,  6, 8, 5,
                                   9, 10, 10, 11, 11, 9, 9, 12, 10, 12, 12, 11};
  const std::vector<Orientation> orients{0, 0, 0, 0, 0, -2, 0, 0, 0,
                                         0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const std::vector<double> coords{0, 0, 1, 0, 0, 1, 0.5, 0.5};
  Plex plex = create_from_dag(sizes, cone_sizes, cones, orients, 2, coords);
  std::vector<PointId> parents(plex.num_points(), kNoPoint);
  parents[1] = parents[2] = parents[6] = 0;
  parents[7] = parents[8] = parents[12] = 4;
  return from_plex("green-triangle", true, std::move(plex), std::move(parents));
}

ReferenceTree::AffineMap ReferenceTree::child_to_parent_map(PointId child) const {
  if (child < 0 || child >= plex_.num_points() || !plex_.tree_parent(child)) {
    throw Error(ErrorCode::NotAChild, "point " + std::to_string(child) + " has no parent");
  }
  const int d = plex_.dimension();
  const CellShape shape = plex_.shape(child);
  const auto& own = reference_cell(shape, simplex_);
  const auto verts = plex_.closure_vertices(child);
  const int m = own.dim;
  const int n = static_cast<int>(verts.size());
  Eigen::MatrixXd lhs(n, m + 1);
  Eigen::MatrixXd rhs(n, d);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) lhs(j, k) = own.vertex_coords[j * m + k];
    lhs(j, m) = 1.0;
    auto x = plex_.vertex_coordinates(verts[j]);
    for (int k = 0; k < d; ++k) rhs(j, k) = x[k];
  }
  const Eigen::MatrixXd coef = lhs.completeOrthogonalDecomposition().solve(rhs);
  if ((lhs * coef - rhs).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InconsistentChildID,
                "child " + std::to_string(child) + " is not an affine image of its reference cell");
  }
  AffineMap map;
  map.linear = coef.topRows(m).transpose();
  map.offset = coef.row(m).transpose();
  return map;
}

PointId ReferenceTree::coarse_point_like(int depth, CellShape shape) const {
  for (PointId p : plex_.closure_points(0)) {
    if (plex_.depth(p) == depth && plex_.shape(p) == shape) return p;
  }
  return kNoPoint;
}

std::shared_ptr<const ReferenceTree> create_default_reference_tree(int dim, bool simplex) {
  return reference_tree_by_name(std::string("default-") + (simplex ? "simplex-" : "hypercube-") +
                                std::to_string(dim));
}

std::shared_ptr<const ReferenceTree> reference_tree_by_name(const std::string& name) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const ReferenceTree>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
  }
  std::shared_ptr<const ReferenceTree> tree;
  if (name == "green-triangle") {
    tree = ReferenceTree::create_green_triangle();
  } else {
    for (const char* family : {"simplex", "hypercube"}) {
      const std::string prefix = std::string("default-") + family + "-";
      if (name.rfind(prefix, 0) == 0 && name.size() == prefix.size() + 1) {
        const int dim = name.back() - '0';
        if (dim < 1 || dim > 3) throw Error(ErrorCode::BadDimension, name);
        tree = ReferenceTree::create_default(dim, family[0] == 's');
      }
    }
  }
  if (!tree) throw Error(ErrorCode::InvalidArgument, "unknown reference tree '" + name + "'");
  std::lock_guard lock(mutex);
  return cache.emplace(name, tree).first->second;
}

}  // namespace ncplex
