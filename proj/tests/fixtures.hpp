#pragma once
// Shared meshes and brute-force oracles for the unit and acceptance tests.
// The oracles work in physical space (cell maps, tabulation, dense algebra)
// and never read the reference-tree constraint blocks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncplex/assembly.hpp"
#include "ncplex/constraints.hpp"
#include "ncplex/element.hpp"
#include "ncplex/forest.hpp"
#include "ncplex/geometry.hpp"
#include "ncplex/plex.hpp"
#include "ncplex/refine.hpp"
#include "ncplex/reference_tree.hpp"
#include "ncplex/section.hpp"

namespace fixtures {

using namespace ncplex;

// Three triangles A, B, C. B and C bisect the edge c of A; d and e are the
// halves of c and delta (14) its midpoint.
//   cells 0..2, edges 3..10 (c = 5, d = 6, e = 7), vertices 11..15.
inline Plex fig5_untreed() {
  const std::vector<int> sizes{3, 8, 5};
  const std::vector<int> cone_sizes{3, 3, 3, 2, 2, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0};
  const std::vector<int> cones{3,  5,  4,  8,  10, 6,  10, 9,  7,  11, 12, 13, 11,
                               12, 13, 12, 14, 14, 13, 12, 15, 15, 13, 14, 15};
  std::vector<int> orients(cones.size(), 0);
  orients[4] = orients[5] = -2;
  orients[8] = -2;
  const std::vector<double> x{0, 1, 1, 0, 1, 2, 1, 1, 2, 1};
  return create_from_dag(sizes, cone_sizes, cones, orients, 2, x);
}

inline Plex fig5() {
  Plex plex = fig5_untreed();
  plex.set_reference_tree(reference_tree_by_name("green-triangle"));
  std::vector<int> section(16, 0);
  section[6] = section[7] = section[14] = 1;
  const std::vector<PointId> parents{5, 5, 5}, child_ids{7, 8, 12};
  plex.set_tree(section, parents, child_ids);
  return plex;
}

inline Plex box(int dim, bool simplex, std::vector<int> cells) {
  return generate_box(dim, simplex, cells);
}

inline Plex forest_corner(int dim, int levels) {
  const std::vector<int> roots(dim, 1);
  Forest f = Forest::brick(dim, roots);
  for (int l = 0; l < levels; ++l) {
    f = f.refine([](int root, int, Morton m) { return root == 0 && m == 0; });
  }
  return convert_to_plex(f.balance_2to1());
}

// Unit quad [0,1]^2 next to [1,2]x[0,1] split into four, whose lower-left
// quarter is split again. The intermediate edge (1,0)-(1,0.5) is added as an
// extra point so the overlay chains: (1,0.25) -> that edge -> (1,0)-(1,1).
// Not 2:1 balanced, which is the point.
inline Plex two_level_quads() {
  std::vector<double> x;
  std::vector<int> quads;
  std::map<std::pair<int, int>, int> ids;  // coordinates in units of 1/4
  auto vid = [&](int i, int j) {
    auto [it, fresh] = ids.try_emplace({i, j}, static_cast<int>(ids.size()));
    if (fresh) {
      x.push_back(i / 4.0);
      x.push_back(j / 4.0);
    }
    return it->second;
  };
  auto quad = [&](int i, int j, int s) {
    for (int v : {vid(i, j), vid(i + s, j), vid(i + s, j + s), vid(i, j + s)}) quads.push_back(v);
  };
  quad(0, 0, 4);
  quad(6, 0, 2);
  quad(4, 2, 2);
  quad(6, 2, 2);
  for (int i : {4, 5})
    for (int j : {0, 1}) quad(i, j, 1);
  const Plex flat = create_from_cell_list(CellShape::Quadrilateral, quads, 2, x);

  // Re-emit the DAG with the intermediate edge appended to the edge stratum.
  const Stratum verts = flat.depth_stratum(0);
  auto shift = [&](PointId p) { return p >= verts.begin ? p + 1 : p; };
  std::vector<int> sizes{flat.height_stratum(0).size(), flat.height_stratum(1).size() + 1,
                         verts.size()};
  std::vector<int> cone_sizes;
  std::vector<PointId> cones;
  std::vector<Orientation> orients;
  for (PointId p = 0; p < flat.num_points(); ++p) {
    if (p == verts.begin) {
      cone_sizes.push_back(2);
      cones.push_back(shift(verts.begin + vid(4, 0)));
      cones.push_back(shift(verts.begin + vid(4, 2)));
      orients.insert(orients.end(), {0, 0});
    }
    cone_sizes.push_back(static_cast<int>(flat.cone_points(p).size()));
    for (PointId q : flat.cone_points(p)) cones.push_back(shift(q));
    for (Orientation o : flat.cone_orientations(p)) orients.push_back(o);
  }
  Plex plex = create_from_dag(sizes, cone_sizes, cones, orients, 2, x);
  build_tree_from_geometry(plex, default_tree_for(CellShape::Quadrilateral));
  return plex;
}

struct NamedMesh {
  std::string name;
  Plex plex;
  std::string element;  // lowest order element of the family
};

// Non-conformal meshes used across suites; every one has a refined cell.
inline std::vector<NamedMesh> treed_meshes() {
  std::vector<NamedMesh> out;
  out.push_back({"fig5", fig5(), "p1"});
  out.push_back({"tri 2x2 refine 0", refine_cell(box(2, true, {2, 2}), 0), "p1"});
  out.push_back({"quad 2x2 refine 0", refine_cell(box(2, false, {2, 2}), 0), "q1"});
  out.push_back({"quad 3x2 refine 4", refine_cell(box(2, false, {3, 2}), 4), "q1"});
  out.push_back({"tet 1x1x1 refine 0", refine_cell(box(3, true, {1, 1, 1}), 0), "p1"});
  out.push_back({"hex 2x1x1 refine 0", refine_cell(box(3, false, {2, 1, 1}), 0), "q1"});
  out.push_back({"forest 2d corner 3", forest_corner(2, 3), "q1"});
  out.push_back({"forest 3d corner 2", forest_corner(3, 2), "q1"});
  out.push_back({"two-level quads", two_level_quads(), "q1"});
  return out;
}

inline std::string second_order(const std::string& element) {
  return element == "p1" ? "p2" : "q2";
}

// ---------------------------------------------------------------------------
// Constraint oracle: the value of every global basis function at the node of
// a constrained point, found by evaluating the coarse neighbour's shape
// functions at the node's physical location.

struct DofSpace {
  ReferenceElement element;
  Section local;
  GlobalSection global;
};

inline DofSpace dof_space(const Plex& plex, const std::string& name, int components) {
  ReferenceElement el = ReferenceElement::from_name(name, plex.dimension(), components);
  Section s = section_from_element(plex, el);
  GlobalSection g = global_section(plex, s);
  return {el, s, g};
}

inline Eigen::MatrixXd oracle_constraint_matrix(const Plex& plex, const DofSpace& space) {
  const auto& el = space.element;
  const auto& s = space.local;
  const auto& g = space.global;
  const int comps = el.components();
  const Eigen::MatrixXd nodes = node_coordinates(plex, el);
  const Stratum cells = plex.height_stratum(0);
  const int cd = plex.coordinate_dimension();

  // rows[p]: expansion of the scalar node of p in global scalar nodes
  // (indexed by global offset / comps).
  std::map<PointId, Eigen::VectorXd> rows;
  const int nglobal = g.global_size() / comps;
  std::function<Eigen::VectorXd(PointId)> expand = [&](PointId p) -> Eigen::VectorXd {
    if (auto it = rows.find(p); it != rows.end()) return it->second;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nglobal);
    if (!g.constrained(p)) {
      row[g.offset(p) / comps] = 1.0;
      return rows[p] = row;
    }
    std::vector<double> x(cd);
    for (int k = 0; k < cd; ++k) x[k] = nodes(p, k);
    for (PointId cell = cells.begin; cell < cells.end; ++cell) {
      const auto clos = plex.closure_points(cell);
      if (std::find(clos.begin(), clos.end(), p) != clos.end()) continue;
      CellMap map = point_map(plex, cell, el.simplex());
      Eigen::VectorXd xi;
      try {
        xi = map.inverse(x);
      } catch (const Error&) {
        continue;
      }
      if (!el.cell().contains(std::span<const double>(xi.data(), xi.size()), 1e-10)) continue;
      Eigen::MatrixXd values;
      el.tabulate(std::span<const double>(xi.data(), xi.size()), values);
      for (int n = 0; n < el.num_nodes(); ++n) {
        const PointId owner = clos[el.nodes()[n].closure_position];
        const double phi = values(0, n);
        if (std::abs(phi) < 1e-15) continue;
        row += phi * expand(owner);
      }
      return rows[p] = row;
    }
    throw std::runtime_error("oracle: no coarse cell contains the node of point " +
                             std::to_string(p));
  };

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s.storage_size(), g.global_size());
  for (PointId p = 0; p < plex.num_points(); ++p) {
    if (s.dof(p) == 0) continue;
    const Eigen::VectorXd row = expand(p);
    for (int j = 0; j < nglobal; ++j) {
      if (row[j] == 0.0) continue;
      for (int comp = 0; comp < comps; ++comp) {
        c(s.offset(p) + comp, j * comps + comp) = row[j];
      }
    }
  }
  return c;
}

// Unconstrained operator: element matrices summed into the local numbering.
inline Eigen::MatrixXd unconstrained_operator(const Plex& plex, const DofSpace& space) {
  const int n = space.local.storage_size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const Stratum cells = plex.height_stratum(0);
  for (PointId cell = cells.begin; cell < cells.end; ++cell) {
    const Eigen::MatrixXd ae = symmetric_gradient_element_matrix(plex, space.element, cell);
    const auto idx = closure_dof_indices(plex, space.local, cell);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) a(idx[i], idx[j]) += ae(i, j);
  }
  return a;
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Polynomial of total degree <= k in every coordinate, one per component.
inline Eigen::VectorXd test_polynomial(const Eigen::VectorXd& x, int k, int components) {
  Eigen::VectorXd v(components);
  for (int c = 0; c < components; ++c) {
    double s = 0.3 + 0.1 * c;
    for (int i = 0; i < x.size(); ++i) s += (0.7 - 0.2 * i + 0.05 * c) * x[i];
    if (k >= 2) {
      for (int i = 0; i < x.size(); ++i) {
        s += (0.4 + 0.1 * i) * x[i] * x[i];
        for (int j = i + 1; j < x.size(); ++j) s -= (0.3 + 0.05 * c) * x[i] * x[j];
      }
    }
    v[c] = s;
  }
  return v;
}

// Largest |C g - u| over nodes for a degree-k polynomial.
inline double reproduction_error(const Plex& plex, const DofSpace& space, const ConstraintMatrix& c,
                                 int k) {
  const Eigen::MatrixXd nodes = node_coordinates(plex, space.element);
  const int comps = space.element.components();
  const Eigen::VectorXd g = interpolate_global(
      plex, space.global, nodes,
      [&](const Eigen::VectorXd& x) { return test_polynomial(x, k, comps); });
  const Eigen::VectorXd u = c.apply(g);
  double err = 0.0;
  for (PointId p = 0; p < plex.num_points(); ++p) {
    if (space.local.dof(p) == 0) continue;
    const Eigen::VectorXd x = nodes.row(p).transpose();
    const Eigen::VectorXd exact = test_polynomial(x, k, comps);
    for (int comp = 0; comp < comps; ++comp) {
      err = std::max(err, std::abs(u[space.local.offset(p) + comp] - exact[comp]));
    }
  }
  return err;
}

// ---------------------------------------------------------------------------
// Topology oracles.

inline std::set<PointId> as_set(const std::vector<PointId>& v) { return {v.begin(), v.end()}; }

inline bool closure_idempotent(const Plex& plex) {
  for (PointId p = 0; p < plex.num_points(); ++p) {
    const auto clos = as_set(plex.closure_points(p));
    std::set<PointId> again;
    for (PointId q : clos) {
      for (PointId r : plex.closure_points(q)) again.insert(r);
    }
    if (again != clos) return false;
  }
  return true;
}

inline bool star_closure_adjoint(const Plex& plex) {
  const PointId n = plex.num_points();
  std::vector<std::set<PointId>> stars(n);
  for (PointId p = 0; p < n; ++p) stars[p] = as_set(plex.star(p));
  for (PointId p = 0; p < n; ++p) {
    const auto clos = as_set(plex.closure_points(p));
    for (PointId q = 0; q < n; ++q) {
      if ((clos.count(q) != 0) != (stars[q].count(p) != 0)) return false;
    }
  }
  return true;
}

// q in cone(p) => p in supp(q), with at least one p in supp(q), q not in cone(p).
inline bool one_sided_duality_with_broken_pair(const Plex& plex) {
  bool broken = false;
  for (PointId p = 0; p < plex.num_points(); ++p) {
    for (PointId q : plex.cone_points(p)) {
      const auto s = plex.support(q);
      if (std::find(s.begin(), s.end(), p) == s.end()) return false;
    }
    for (PointId s : plex.support(p)) {
      const auto c = plex.cone_points(s);
      if (std::find(c.begin(), c.end(), p) == c.end()) broken = true;
    }
  }
  return broken;
}

// Conformal box meshes with randomized shape and divisions, deterministic
// per seed.
inline Plex random_conformal_mesh(unsigned seed) {
  std::uint64_t state = 0x9e3779b97f4a7c15ull ^ (seed * 0xbf58476d1ce4e5b9ull);
  auto next = [&state](int n) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return static_cast<int>((state * 0x2545f4914f6cdd1dull) >> 33) % n;
  };
  const int dim = 1 + next(3);
  const bool simplex = next(2) == 0;
  std::vector<int> cells(dim);
  for (int& c : cells) c = 1 + next(dim == 3 ? 2 : 3);
  return generate_box(dim, simplex, cells);
}

}  // namespace fixtures
