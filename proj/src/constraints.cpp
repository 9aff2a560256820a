#include "ncplex/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "ncplex/geometry.hpp"

namespace ncplex {

namespace {

constexpr double kDropTolerance = 1e-14;

Eigen::VectorXd reference_centroid(const ReferenceCell& cell) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(cell.dim);
  if (cell.dim == 0) return c;
  const int n = static_cast<int>(cell.vertex_coords.size()) / cell.dim;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < cell.dim; ++k) c[k] += cell.vertex_coords[j * cell.dim + k] / n;
  }
  return c;
}

}  // namespace

std::map<PointId, ReferenceBlock> reference_constraints(const ReferenceTree& tree,
                                                        const ReferenceElement& element) {
  const Plex& t = tree.plex();
  const PointId coarse = tree.coarse_cell();
  if (element.shape() != t.shape(coarse) || element.simplex() != tree.simplex()) {
    throw Error(ErrorCode::ShapeMismatch, "element " + element.name() + " does not match tree " +
                                              tree.name());
  }
  const auto coarse_closure = t.closure_points(coarse);
  const auto coarse_coords = t.closure_coordinates(coarse);
  const auto& ref_coords = element.cell().vertex_coords;
  if (coarse_coords.size() != ref_coords.size()) {
    throw Error(ErrorCode::ShapeMismatch, "reference tree coarse cell differs from the element cell");
  }
  for (std::size_t i = 0; i < ref_coords.size(); ++i) {
    if (std::abs(coarse_coords[i] - ref_coords[i]) > 1e-14) {
      throw Error(ErrorCode::ShapeMismatch,
                  "reference tree coarse cell is not the element's reference cell");
    }
  }

  std::vector<PointId> node_owner;
  for (const auto& node : element.nodes()) node_owner.push_back(coarse_closure[node.closure_position]);

  std::map<PointId, ReferenceBlock> blocks;
  Eigen::MatrixXd values;
  for (PointId r = 0; r < t.num_points(); ++r) {
    const auto tp = t.tree_parent(r);
    if (!tp) continue;
    const int nodes = element.nodes_on(t.shape(r));
    if (nodes == 0) continue;
    const PointId q = tp->parent;
    if (std::find(coarse_closure.begin(), coarse_closure.end(), q) == coarse_closure.end()) {
      throw Error(ErrorCode::InvalidArgument, "reference tree parent outside the coarse closure");
    }
    const auto map = tree.child_to_parent_map(r);
    const Eigen::VectorXd x = map.apply(reference_centroid(reference_cell(t.shape(r), tree.simplex())));
    element.tabulate(std::span<const double>(x.data(), x.size()), values);

    const auto parent_closure = t.closure_points(q);
    ReferenceBlock block{r, q, Eigen::MatrixXd(nodes, 0), {}};
    std::vector<int> columns;
    for (std::size_t pos = 0; pos < parent_closure.size(); ++pos) {
      for (int j = 0; j < element.num_nodes(); ++j) {
        if (node_owner[j] != parent_closure[pos]) continue;
        columns.push_back(j);
        block.column_positions.push_back(static_cast<int>(pos));
      }
    }
    for (int j = 0; j < element.num_nodes(); ++j) {
      if (std::find(columns.begin(), columns.end(), j) != columns.end()) continue;
      if (std::abs(values(0, j)) > 1e-12) {
        throw Error(ErrorCode::InconsistentChildID,
                    "child " + std::to_string(r) + " sees basis functions outside its parent closure");
      }
    }
    block.coefficients.resize(nodes, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) block.coefficients(0, c) = values(0, columns[c]);
    blocks.emplace(r, std::move(block));
  }
  return blocks;
}

ConstraintMatrix::ConstraintMatrix(int rows, int cols)
    : rows_(std::max(rows, 0)), constrained_(std::max(rows, 0), 0), cols_(cols) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix size");
}

ConstraintMatrix ConstraintMatrix::identity(int n) {
  ConstraintMatrix c(n, n);
  for (int i = 0; i < n; ++i) c.rows_[i] = {{i, 1.0}};
  return c;
}

void ConstraintMatrix::set_row(int i, std::vector<Entry> entries, bool constrained) {
  if (i < 0 || i >= rows()) throw Error(ErrorCode::SizeMismatch, "row out of range");
  for (const auto& e : entries) {
    if (e.col < 0 || e.col >= cols_) throw Error(ErrorCode::SizeMismatch, "column out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  rows_[i] = std::move(entries);
  constrained_[i] = constrained ? 1 : 0;
}

int ConstraintMatrix::nonzeros() const {
  int n = 0;
  for (const auto& r : rows_) n += static_cast<int>(r.size());
  return n;
}

int ConstraintMatrix::num_constrained_rows() const {
  int n = 0;
  for (char c : constrained_) n += c;
  return n;
}

Eigen::VectorXd ConstraintMatrix::apply(const Eigen::VectorXd& global) const {
  if (global.size() != cols_) throw Error(ErrorCode::SizeMismatch, "global vector size");
  Eigen::VectorXd local = Eigen::VectorXd::Zero(rows());
  for (int i = 0; i < rows(); ++i) {
    double s = 0.0;
    for (const auto& e : rows_[i]) s += e.value * global[e.col];
    local[i] = s;
  }
  return local;
}

void ConstraintMatrix::apply_transpose(const Eigen::VectorXd& local, Eigen::VectorXd& global,
                                       bool accumulate) const {
  if (local.size() != rows()) throw Error(ErrorCode::SizeMismatch, "local vector size");
  if (!accumulate) global = Eigen::VectorXd::Zero(cols_);
  if (global.size() != cols_) throw Error(ErrorCode::SizeMismatch, "global vector size");
  for (int i = 0; i < rows(); ++i) {
    for (const auto& e : rows_[i]) global[e.col] += e.value * local[i];
  }
}

Eigen::MatrixXd ConstraintMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows(), cols_);
  for (int i = 0; i < rows(); ++i) {
    for (const auto& e : rows_[i]) d(i, e.col) += e.value;
  }
  return d;
}

void ConstraintMatrix::write_coo(std::ostream& out) const {
  const auto precision = out.precision(17);
  for (int i = 0; i < rows(); ++i) {
    for (const auto& e : rows_[i]) out << i << ' ' << e.col << ' ' << e.value << '\n';
  }
  out.precision(precision);
}

void check_constraint_shape(const ConstraintMatrix& c, const Section& section,
                            const GlobalSection& global) {
  if (c.rows() != section.storage_size() || c.cols() != global.global_size()) {
    throw Error(ErrorCode::SizeMismatch,
                "constraint matrix is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                    ", expected " + std::to_string(section.storage_size()) + "x" +
                    std::to_string(global.global_size()));
  }
}

ConstraintMatrix trivial_constraint_matrix(const Section& section, const GlobalSection& global) {
  ConstraintMatrix c(section.storage_size(), global.global_size());
  for (PointId p = 0; p < section.num_points(); ++p) {
    for (int d = 0; d < section.dof(p); ++d) {
      if (global.constrained(p)) {
        c.set_row(section.offset(p) + d, {}, true);
      } else {
        c.set_row(section.offset(p) + d, {{global.offset(p) + d, 1.0}});
      }
    }
  }
  return c;
}

ConstraintMatrix build_constraint_matrix(const Plex& plex, const Section& section,
                                         const GlobalSection& global,
                                         const ReferenceElement& element) {
  if (section.num_points() != plex.num_points()) {
    throw Error(ErrorCode::SizeMismatch, "section chart differs from the mesh");
  }
  ConstraintMatrix c = trivial_constraint_matrix(section, global);
  if (plex.is_conformal()) return c;

  const auto& tree = plex.reference_tree();
  if (!tree) throw Error(ErrorCode::NoReferenceTree, "treed plex without a reference tree");
  const Plex& t = tree->plex();
  const auto blocks = reference_constraints(*tree, element);
  const int ncomp = element.components();

  using Expansion = std::vector<std::pair<PointId, double>>;
  std::vector<std::optional<Expansion>> memo(plex.num_points());

  auto check_geometry = [&](PointId p, PointId q, PointId r, PointId q_ref) {
    auto inconsistent = [&](const std::string& why) {
      return Error(ErrorCode::InconsistentChildID, "point " + std::to_string(p) + " with childID " +
                                                       std::to_string(r) + ": " + why);
    };
    if (plex.shape(p) != t.shape(r) || plex.shape(q) != t.shape(q_ref)) {
      throw inconsistent("shapes differ from the reference tree");
    }
    Eigen::VectorXd xi;
    try {
      xi = point_map(t, q_ref, tree->simplex()).inverse(t.centroid(r));
    } catch (const Error&) {
      throw inconsistent("reference child lies outside its parent");
    }
    const Eigen::VectorXd expected =
        point_map(plex, q, tree->simplex()).map(std::span<const double>(xi.data(), xi.size()));
    const auto actual = plex.centroid(p);
    double err = 0.0;
    for (int k = 0; k < plex.coordinate_dimension(); ++k) err = std::max(err, std::abs(expected[k] - actual[k]));
    if (err > 1e-8 * std::max(point_diameter(plex, q), 1e-300)) {
      throw inconsistent("child position does not match the reference tree");
    }
  };

  // Row of p over ancestor-free node-carrying points; parents are expanded
  // recursively, so composition follows the tree from p towards the roots.
  std::function<const Expansion&(PointId)> expand = [&](PointId p) -> const Expansion& {
    if (memo[p]) return *memo[p];
    const auto tp = plex.tree_parent(p);
    if (!tp) {
      memo[p] = Expansion{{p, 1.0}};
      return *memo[p];
    }
    const PointId q = tp->parent;
    const PointId r = tp->child_id;
    const PointId q_ref = t.tree_parent(r)->parent;
    check_geometry(p, q, r, q_ref);
    const auto it = blocks.find(r);
    if (it == blocks.end()) {
      throw Error(ErrorCode::InconsistentChildID,
                  "childID " + std::to_string(r) + " carries no nodes for this element");
    }
    const auto& block = it->second;
    const auto parent_closure = plex.closure_points(q);
    std::map<PointId, double> acc;
    for (std::size_t col = 0; col < block.column_positions.size(); ++col) {
      const double coef = block.coefficients(0, static_cast<Eigen::Index>(col));
      if (std::abs(coef) < kDropTolerance) continue;
      const PointId s = parent_closure[block.column_positions[col]];
      for (const auto& [u, v] : expand(s)) acc[u] += coef * v;
    }
    Expansion out;
    for (const auto& [u, v] : acc) {
      if (std::abs(v) >= kDropTolerance) out.emplace_back(u, v);
    }
    memo[p] = std::move(out);
    return *memo[p];
  };

  for (PointId p : plex.constrained_points()) {
    if (section.dof(p) == 0) continue;
    if (section.dof(p) != ncomp) {
      throw Error(ErrorCode::SizeMismatch, "section does not match the element");
    }
    const Expansion& e = expand(p);
    for (int comp = 0; comp < ncomp; ++comp) {
      std::vector<ConstraintMatrix::Entry> row;
      for (const auto& [u, v] : e) row.push_back({global.offset(u) + comp, v});
      c.set_row(section.offset(p) + comp, std::move(row), true);
    }
  }
  return c;
}

bool perturb_first_constraint(ConstraintMatrix& c, double delta) {
  for (int i = 0; i < c.rows(); ++i) {
    if (!c.is_constrained_row(i) || c.row(i).empty()) continue;
    std::vector<ConstraintMatrix::Entry> row(c.row(i).begin(), c.row(i).end());
    row[0].value += delta;
    c.set_row(i, std::move(row), true);
    return true;
  }
  return false;
}

}  // namespace ncplex
