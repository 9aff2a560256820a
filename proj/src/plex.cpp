#include "ncplex/plex.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_set>

#include "ncplex/reference_tree.hpp"

namespace ncplex {

int shape_dimension(CellShape shape) {
  switch (shape) {
    case CellShape::Point: return 0;
    case CellShape::Segment: return 1;
    case CellShape::Triangle:
    case CellShape::Quadrilateral: return 2;
    case CellShape::Tetrahedron:
    case CellShape::Hexahedron: return 3;
  }
  return -1;
}

int shape_num_vertices(CellShape shape) {
  switch (shape) {
    case CellShape::Point: return 1;
    case CellShape::Segment: return 2;
    case CellShape::Triangle: return 3;
    case CellShape::Quadrilateral: return 4;
    case CellShape::Tetrahedron: return 4;
    case CellShape::Hexahedron: return 8;
  }
  return 0;
}

bool shape_is_simplex(CellShape shape) {
  return shape == CellShape::Point || shape == CellShape::Segment ||
         shape == CellShape::Triangle || shape == CellShape::Tetrahedron;
}

const char* shape_name(CellShape shape) {
  switch (shape) {
    case CellShape::Point: return "point";
    case CellShape::Segment: return "segment";
    case CellShape::Triangle: return "triangle";
    case CellShape::Quadrilateral: return "quadrilateral";
    case CellShape::Tetrahedron: return "tetrahedron";
    case CellShape::Hexahedron: return "hexahedron";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

void Plex::check_point(PointId p) const {
  if (p < 0 || p >= num_points()) {
    throw Error(ErrorCode::OutOfChart, "point " + std::to_string(p) + " outside chart [0," +
                                           std::to_string(num_points()) + ")");
  }
}

Stratum Plex::height_stratum(int height) const {
  if (height < 0 || height > dimension()) {
    throw Error(ErrorCode::BadStratum, "height " + std::to_string(height));
  }
  PointId begin = 0;
  for (int h = 0; h < height; ++h) begin += stratum_sizes_[h];
  return {begin, begin + stratum_sizes_[height]};
}

Stratum Plex::depth_stratum(int depth) const {
  if (depth < 0 || depth > dimension()) {
    throw Error(ErrorCode::BadStratum, "depth " + std::to_string(depth));
  }
  return height_stratum(dimension() - depth);
}

int Plex::depth(PointId p) const {
  check_point(p);
  return depth_[p];
}

CellShape Plex::shape(PointId p) const {
  const int d = depth(p);
  const int n = cone_offsets_[p + 1] - cone_offsets_[p];
  switch (d) {
    case 0: return CellShape::Point;
    case 1: return CellShape::Segment;
    case 2: return n == 3 ? CellShape::Triangle : CellShape::Quadrilateral;
    default: return n == 4 ? CellShape::Tetrahedron : CellShape::Hexahedron;
  }
}

std::span<const PointId> Plex::cone_points(PointId p) const {
  check_point(p);
  return {cone_points_.data() + cone_offsets_[p],
          static_cast<std::size_t>(cone_offsets_[p + 1] - cone_offsets_[p])};
}

std::span<const Orientation> Plex::cone_orientations(PointId p) const {
  check_point(p);
  return {cone_orients_.data() + cone_offsets_[p],
          static_cast<std::size_t>(cone_offsets_[p + 1] - cone_offsets_[p])};
}

std::vector<ConeEntry> Plex::cone(PointId p) const {
  auto pts = cone_points(p);
  auto ors = cone_orientations(p);
  std::vector<ConeEntry> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = {pts[i], ors[i]};
  return out;
}

std::span<const PointId> Plex::support(PointId p) const {
  check_point(p);
  return supports_[p];
}

std::span<const PointId> Plex::cone_support(PointId p) const {
  check_point(p);
  return base_supports_[p];
}

// Cone of q as seen from a parent that holds q with orientation o.
std::vector<ConeEntry> Plex::oriented_cone(PointId q, Orientation o) const {
  auto base = cone(q);
  if (o == 0 || base.empty()) return base;
  const int d = depth_[q];
  const int m = static_cast<int>(base.size());
  std::vector<ConeEntry> out(m);
  if (d == 1) {
    const auto perm = orientation_permutation(m, o);
    for (int i = 0; i < m; ++i) out[i] = {base[perm[i]].point, 0};
    return out;
  }
  if (d == 2) {
    // Edge i of the oriented polygon runs between oriented vertices i and i+1.
    for (int i = 0; i < m; ++i) {
      if (o >= 0) {
        out[i] = base[(i + o) % m];
      } else {
        const int s = -(o + 1);
        const int k = ((s - i - 1) % m + m) % m;
        out[i] = {base[k].point, reverses_segment(base[k].orientation) ? 0 : -2};
      }
    }
    return out;
  }
  throw Error(ErrorCode::OrientationUnsupported,
              "cells of depth " + std::to_string(d) + " cannot appear in a cone");
}

std::vector<ConeEntry> Plex::closure(PointId p) const {
  check_point(p);
  std::vector<ConeEntry> out{{p, 0}};
  std::unordered_set<PointId> seen{p};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const auto& entry : oriented_cone(out[head].point, out[head].orientation)) {
      if (seen.insert(entry.point).second) out.push_back(entry);
    }
  }
  return out;
}

std::vector<PointId> Plex::closure_points(PointId p) const {
  std::vector<PointId> out;
  for (const auto& e : closure(p)) out.push_back(e.point);
  return out;
}

std::vector<PointId> Plex::closure_vertices(PointId p) const {
  std::vector<PointId> out;
  for (const auto& e : closure(p)) {
    if (depth_[e.point] == 0) out.push_back(e.point);
  }
  return out;
}

std::vector<PointId> Plex::star(PointId p) const {
  check_point(p);
  std::vector<PointId> out{p};
  std::unordered_set<PointId> seen{p};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (PointId s : supports_[out[head]]) {
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  return out;
}

std::span<const double> Plex::vertex_coordinates(PointId v) const {
  check_point(v);
  if (depth_[v] != 0) throw Error(ErrorCode::InvalidArgument, "not a vertex");
  const PointId first = depth_stratum(0).begin;
  return {coords_.data() + static_cast<std::size_t>(v - first) * coord_dim_,
          static_cast<std::size_t>(coord_dim_)};
}

std::vector<double> Plex::closure_coordinates(PointId p) const {
  std::vector<double> out;
  for (PointId v : closure_vertices(p)) {
    auto x = vertex_coordinates(v);
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

std::vector<double> Plex::centroid(PointId p) const {
  const auto verts = closure_vertices(p);
  std::vector<double> c(coord_dim_, 0.0);
  for (PointId v : verts) {
    auto x = vertex_coordinates(v);
    for (int k = 0; k < coord_dim_; ++k) c[k] += x[k];
  }
  for (auto& v : c) v /= static_cast<double>(verts.size());
  return c;
}

void Plex::build_supports() {
  base_supports_.assign(num_points(), {});
  for (PointId p = 0; p < num_points(); ++p) {
    for (PointId q : cone_points(p)) base_supports_[q].push_back(p);
  }
  for (auto& s : base_supports_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  supports_ = base_supports_;
}

// --- tree overlay ------------------------------------------------------------

void Plex::set_reference_tree(std::shared_ptr<const ReferenceTree> tree) {
  reference_tree_ = std::move(tree);
}

std::optional<TreeParent> Plex::tree_parent(PointId p) const {
  check_point(p);
  if (parent_.empty() || parent_[p] == kNoPoint) return std::nullopt;
  return TreeParent{parent_[p], child_id_[p]};
}

std::span<const PointId> Plex::tree_children(PointId p) const {
  check_point(p);
  if (children_.empty()) return {};
  return children_[p];
}

std::vector<PointId> Plex::constrained_points() const {
  std::vector<PointId> out;
  for (PointId p = 0; p < static_cast<PointId>(parent_.size()); ++p) {
    if (parent_[p] != kNoPoint) out.push_back(p);
  }
  return out;
}

std::span<const PointId> Plex::anchors(PointId p) const {
  check_point(p);
  if (parent_.empty() || parent_[p] == kNoPoint) {
    throw Error(ErrorCode::NotConstrained, "point " + std::to_string(p) + " has no parent");
  }
  return anchors_[p];
}

void Plex::set_tree(std::span<const int> parent_section, std::span<const PointId> parents,
                    std::span<const PointId> child_ids) {
  if (!reference_tree_) throw Error(ErrorCode::NoReferenceTree, "set_reference_tree first");
  if (static_cast<PointId>(parent_section.size()) != num_points()) {
    throw Error(ErrorCode::SizeMismatch, "parent section must cover the chart");
  }
  std::size_t count = 0;
  for (int c : parent_section) {
    if (c != 0 && c != 1) throw Error(ErrorCode::InvalidArgument, "parent counts must be 0 or 1");
    count += static_cast<std::size_t>(c);
  }
  if (parents.size() != count || child_ids.size() != count) {
    throw Error(ErrorCode::SizeMismatch, "parents/childIDs do not match the parent section");
  }
  const Plex& ref = reference_tree_->plex();
  std::vector<PointId> parent(num_points(), kNoPoint);
  std::vector<PointId> child_id(num_points(), kNoPoint);
  std::size_t k = 0;
  for (PointId p = 0; p < num_points(); ++p) {
    if (!parent_section[p]) continue;
    const PointId q = parents[k];
    const PointId cid = child_ids[k];
    ++k;
    check_point(q);
    if (q == p) throw Error(ErrorCode::CycleDetected, "point is its own parent");
    if (cid < 0 || cid >= ref.num_points() || !ref.tree_parent(cid)) {
      throw Error(ErrorCode::BadChildID,
                  "childID " + std::to_string(cid) + " has no parent in the reference tree");
    }
    if (ref.depth(cid) != depth_[p]) {
      throw Error(ErrorCode::BadChildID, "childID " + std::to_string(cid) +
                                             " has a different depth than point " +
                                             std::to_string(p));
    }
    parent[p] = q;
    child_id[p] = cid;
  }
  install_tree(std::move(parent), std::move(child_id));
}

void Plex::install_tree(std::vector<PointId> parent, std::vector<PointId> child_id) {
  const PointId n = num_points();
  // Acyclicity: every chain must terminate within n steps.
  for (PointId p = 0; p < n; ++p) {
    PointId a = parent[p];
    for (PointId steps = 0; a != kNoPoint; ++steps) {
      if (a == p || steps > n) throw Error(ErrorCode::CycleDetected, "parent chain of " + std::to_string(p));
      a = parent[a];
    }
  }
  parent_ = std::move(parent);
  child_id_ = std::move(child_id);
  children_.assign(n, {});
  num_constrained_ = 0;
  for (PointId p = 0; p < n; ++p) {
    if (parent_[p] == kNoPoint) continue;
    children_[parent_[p]].push_back(p);
    ++num_constrained_;
  }

  // A same-dimension child sits inside its ancestor: the cells bounding the
  // ancestor also bound the child and vice versa.
  supports_ = base_supports_;
  for (PointId p = 0; p < n; ++p) {
    for (PointId a = parent_[p]; a != kNoPoint; a = parent_[a]) {
      if (depth_[a] != depth_[p]) continue;
      supports_[p].insert(supports_[p].end(), base_supports_[a].begin(), base_supports_[a].end());
      supports_[a].insert(supports_[a].end(), base_supports_[p].begin(), base_supports_[p].end());
    }
  }
  for (auto& s : supports_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }

  anchors_.assign(n, {});
  for (PointId p = 0; p < n; ++p) {
    if (parent_[p] == kNoPoint) continue;
    std::vector<PointId> current{p};
    for (int iter = 0;; ++iter) {
      if (iter > n) throw Error(ErrorCode::CycleDetected, "anchor iteration did not terminate");
      bool expanded = false;
      std::vector<PointId> next;
      std::unordered_set<PointId> seen;
      for (PointId s : current) {
        if (parent_[s] == kNoPoint) {
          if (seen.insert(s).second) next.push_back(s);
          continue;
        }
        expanded = true;
        for (PointId t : closure_points(parent_[s])) {
          if (seen.insert(t).second) next.push_back(t);
        }
      }
      current = std::move(next);
      if (!expanded) break;
    }
    anchors_[p] = std::move(current);
  }
}

// --- construction -------------------------------------------------------------

Plex create_from_dag(std::span<const int> stratum_sizes, std::span<const int> cone_sizes,
                     std::span<const PointId> cones, std::span<const Orientation> orientations,
                     int coord_dim, std::span<const double> vertex_coords) {
  if (stratum_sizes.empty() || stratum_sizes.size() > 4) {
    throw Error(ErrorCode::BadDimension, "expected 1 to 4 strata");
  }
  Plex plex;
  plex.stratum_sizes_.assign(stratum_sizes.begin(), stratum_sizes.end());
  const int dim = plex.dimension();
  PointId n = 0;
  for (int s : stratum_sizes) {
    if (s < 0) throw Error(ErrorCode::InvalidArgument, "negative stratum size");
    n += s;
  }
  for (int h = 0; h <= dim; ++h) plex.depth_.insert(plex.depth_.end(), stratum_sizes[h], dim - h);
  if (static_cast<PointId>(cone_sizes.size()) != n) {
    throw Error(ErrorCode::SizeMismatch, "cone sizes must cover the chart");
  }
  const std::size_t total = std::accumulate(cone_sizes.begin(), cone_sizes.end(), std::size_t{0});
  if (cones.size() != total || orientations.size() != total) {
    throw Error(ErrorCode::SizeMismatch, "cone/orientation arrays do not match cone sizes");
  }
  const PointId num_vertices = stratum_sizes[dim];
  if (coord_dim < 0 || vertex_coords.size() != static_cast<std::size_t>(num_vertices) * coord_dim) {
    throw Error(ErrorCode::SizeMismatch, "vertex coordinate array has the wrong size");
  }
  plex.coord_dim_ = coord_dim;
  plex.coords_.assign(vertex_coords.begin(), vertex_coords.end());
  plex.cone_points_.assign(cones.begin(), cones.end());
  plex.cone_orients_.assign(orientations.begin(), orientations.end());
  plex.cone_offsets_.assign(1, 0);
  for (int s : cone_sizes) plex.cone_offsets_.push_back(plex.cone_offsets_.back() + s);

  for (PointId p = 0; p < n; ++p) {
    const int d = plex.depth_[p];
    const int size = cone_sizes[p];
    const bool ok = (d == 0 && size == 0) || (d == 1 && size == 2) ||
                    (d == 2 && (size == 3 || size == 4)) || (d == 3 && (size == 4 || size == 6));
    if (!ok) {
      throw Error(ErrorCode::UnsupportedShape, "point " + std::to_string(p) + " of depth " +
                                                   std::to_string(d) + " has cone size " +
                                                   std::to_string(size));
    }
    for (int k = plex.cone_offsets_[p]; k < plex.cone_offsets_[p + 1]; ++k) {
      const PointId q = plex.cone_points_[k];
      if (q < 0 || q >= n) {
        throw Error(ErrorCode::DanglingPoint, "cone of " + std::to_string(p) + " references " +
                                                  std::to_string(q));
      }
      if (plex.depth_[q] != d - 1) {
        throw Error(ErrorCode::DepthViolation, "cone of " + std::to_string(p) +
                                                   " crosses strata at " + std::to_string(q));
      }
      const int m = shape_num_vertices(plex.shape(q));
      const Orientation o = plex.cone_orients_[k];
      if (o < -m || o >= m) {
        throw Error(ErrorCode::InvalidArgument, "orientation " + std::to_string(o) +
                                                    " out of range in cone of " + std::to_string(p));
      }
    }
    if (d == 3) {
      const int face_size = size == 4 ? 3 : 4;
      for (PointId f : plex.cone_points(p)) {
        if (plex.cone_points(f).size() != static_cast<std::size_t>(face_size)) {
          throw Error(ErrorCode::UnsupportedShape, "mixed face shapes on cell " + std::to_string(p));
        }
      }
    }
  }
  plex.build_supports();
  return plex;
}

namespace {

struct LocalTopology {
  std::vector<std::pair<int, int>> edges;  // 2D cells: boundary edges
  std::vector<std::vector<int>> faces;     // 3D cells: boundary face cycles
};

const LocalTopology& local_topology(CellShape shape) {
  static const LocalTopology tri{{{0, 1}, {1, 2}, {2, 0}}, {}};
  static const LocalTopology quad{{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {}};
  static const LocalTopology tet{{}, {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
  static const LocalTopology hex{
      {},
      {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}}};
  static const LocalTopology none{};
  switch (shape) {
    case CellShape::Triangle: return tri;
    case CellShape::Quadrilateral: return quad;
    case CellShape::Tetrahedron: return tet;
    case CellShape::Hexahedron: return hex;
    default: return none;
  }
}

}  // namespace

Plex create_from_cell_list(CellShape shape, std::span<const int> cell_vertices, int coord_dim,
                           std::span<const double> vertex_coords) {
  if (shape == CellShape::Point) throw Error(ErrorCode::UnsupportedShape, "point cells");
  const int nv_cell = shape_num_vertices(shape);
  if (cell_vertices.size() % nv_cell != 0) {
    throw Error(ErrorCode::SizeMismatch, "cell vertex list is not a multiple of the cell size");
  }
  if (coord_dim <= 0 && !vertex_coords.empty()) {
    throw Error(ErrorCode::InvalidArgument, "coordinate dimension must be positive");
  }
  const int num_vertices = coord_dim > 0 ? static_cast<int>(vertex_coords.size()) / coord_dim
                                         : (cell_vertices.empty() ? 0 : *std::max_element(cell_vertices.begin(), cell_vertices.end()) + 1);
  if (coord_dim > 0 && vertex_coords.size() % coord_dim != 0) {
    throw Error(ErrorCode::SizeMismatch, "coordinate array size");
  }
  for (int v : cell_vertices) {
    if (v < 0 || v >= num_vertices) throw Error(ErrorCode::DanglingPoint, "vertex index " + std::to_string(v));
  }
  const int dim = shape_dimension(shape);
  const int num_cells = static_cast<int>(cell_vertices.size()) / nv_cell;
  const auto& topo = local_topology(shape);

  std::map<std::pair<int, int>, int> edge_index;
  std::vector<std::pair<int, int>> edges;  // own vertex order
  std::map<std::vector<int>, int> face_index;
  std::vector<std::vector<int>> faces;  // own cycle
  std::vector<std::vector<ConeEntry>> face_cones;
  std::vector<std::vector<ConeEntry>> cell_cones(num_cells);  // indices local per stratum

  auto get_edge = [&](int a, int b) -> ConeEntry {
    auto key = std::minmax(a, b);
    auto it = edge_index.find({key.first, key.second});
    if (it == edge_index.end()) {
      const int id = static_cast<int>(edges.size());
      edges.emplace_back(a, b);
      edge_index[{key.first, key.second}] = id;
      return {id, 0};
    }
    return {it->second, edges[it->second].first == a ? 0 : -2};
  };

  for (int c = 0; c < num_cells; ++c) {
    const int* cv = cell_vertices.data() + static_cast<std::size_t>(c) * nv_cell;
    if (dim == 1) {
      cell_cones[c] = {{cv[0], 0}, {cv[1], 0}};
    } else if (dim == 2) {
      for (auto [a, b] : topo.edges) cell_cones[c].push_back(get_edge(cv[a], cv[b]));
    } else {
      for (const auto& lf : topo.faces) {
        std::vector<int> cycle;
        for (int i : lf) cycle.push_back(cv[i]);
        std::vector<int> key = cycle;
        std::sort(key.begin(), key.end());
        auto it = face_index.find(key);
        if (it == face_index.end()) {
          const int id = static_cast<int>(faces.size());
          face_index[key] = id;
          faces.push_back(cycle);
          std::vector<ConeEntry> fc;
          for (std::size_t k = 0; k < cycle.size(); ++k) {
            fc.push_back(get_edge(cycle[k], cycle[(k + 1) % cycle.size()]));
          }
          face_cones.push_back(std::move(fc));
          cell_cones[c].push_back({id, 0});
        } else {
          cell_cones[c].push_back({it->second, orientation_between(faces[it->second], cycle)});
        }
      }
    }
  }

  const int nf = static_cast<int>(faces.size());
  const int ne = static_cast<int>(edges.size());
  std::vector<int> sizes;
  int face_off = 0, edge_off = 0, vert_off = 0;
  if (dim == 1) {
    sizes = {num_cells, num_vertices};
    vert_off = num_cells;
  } else if (dim == 2) {
    sizes = {num_cells, ne, num_vertices};
    edge_off = num_cells;
    vert_off = num_cells + ne;
  } else {
    sizes = {num_cells, nf, ne, num_vertices};
    face_off = num_cells;
    edge_off = num_cells + nf;
    vert_off = num_cells + nf + ne;
  }
  const int child_off = dim == 1 ? vert_off : (dim == 2 ? edge_off : face_off);

  std::vector<int> cone_sizes;
  std::vector<PointId> cones;
  std::vector<Orientation> orients;
  for (const auto& cc : cell_cones) {
    cone_sizes.push_back(static_cast<int>(cc.size()));
    for (const auto& e : cc) {
      cones.push_back(e.point + child_off);
      orients.push_back(e.orientation);
    }
  }
  for (const auto& fc : face_cones) {
    cone_sizes.push_back(static_cast<int>(fc.size()));
    for (const auto& e : fc) {
      cones.push_back(e.point + edge_off);
      orients.push_back(e.orientation);
    }
  }
  if (dim >= 2) {
    for (auto [a, b] : edges) {
      cone_sizes.push_back(2);
      cones.push_back(a + vert_off);
      cones.push_back(b + vert_off);
      orients.push_back(0);
      orients.push_back(0);
    }
  }
  cone_sizes.insert(cone_sizes.end(), num_vertices, 0);
  return create_from_dag(sizes, cone_sizes, cones, orients, coord_dim, vertex_coords);
}

const std::vector<int>& closure_vertex_order(CellShape shape) {
  static std::once_flag once;
  static std::map<CellShape, std::vector<int>> table;
  std::call_once(once, [] {
    for (CellShape s : {CellShape::Segment, CellShape::Triangle, CellShape::Quadrilateral,
                        CellShape::Tetrahedron, CellShape::Hexahedron}) {
      const int n = shape_num_vertices(s);
      std::vector<int> verts(n);
      std::iota(verts.begin(), verts.end(), 0);
      std::vector<double> coords(static_cast<std::size_t>(n), 0.0);
      const Plex cell = create_from_cell_list(s, verts, 1, coords);
      const PointId first = cell.depth_stratum(0).begin;
      std::vector<int> order;
      for (PointId v : cell.closure_vertices(0)) order.push_back(v - first);
      table[s] = std::move(order);
    }
    table[CellShape::Point] = {0};
  });
  return table.at(shape);
}

std::vector<PointId> cell_input_vertices(const Plex& plex, PointId cell) {
  const auto cv = plex.closure_vertices(cell);
  const auto& order = closure_vertex_order(plex.shape(cell));
  if (order.size() != cv.size()) throw Error(ErrorCode::BadCell, "closure vertex count mismatch");
  std::vector<PointId> input(cv.size());
  for (std::size_t i = 0; i < cv.size(); ++i) input[order[i]] = cv[i];
  return input;
}

bool check_cone_support_duality(const Plex& plex) {
  for (PointId p = 0; p < plex.num_points(); ++p) {
    for (PointId q : plex.cone_points(p)) {
      const auto s = plex.support(q);
      if (std::find(s.begin(), s.end(), p) == s.end()) return false;
    }
    for (PointId s : plex.support(p)) {
      const auto c = plex.cone_points(s);
      if (std::find(c.begin(), c.end(), p) == c.end()) return false;
    }
  }
  return true;
}

}  // namespace ncplex
