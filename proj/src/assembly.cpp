#include "ncplex/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncplex/geometry.hpp"

namespace ncplex {

SystemMatrix::SystemMatrix(int n, std::vector<std::vector<int>> pattern) : n_(n) {
  if (static_cast<int>(pattern.size()) != n) {
    throw Error(ErrorCode::SizeMismatch, "pattern must list every row");
  }
  for (auto& row : pattern) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (int c : row) {
      if (c < 0 || c >= n) throw Error(ErrorCode::SizeMismatch, "pattern column out of range");
    }
    cols_.insert(cols_.end(), row.begin(), row.end());
    row_ptr_.push_back(static_cast<int>(cols_.size()));
  }
  values_.assign(cols_.size(), 0.0);
}

int SystemMatrix::find(int row, int col) const {
  if (row < 0 || row >= n_) return -1;
  const auto begin = cols_.begin() + row_ptr_[row];
  const auto end = cols_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return -1;
  return static_cast<int>(it - cols_.begin());
}

bool SystemMatrix::has_entry(int row, int col) const { return find(row, col) >= 0; }

double SystemMatrix::get(int row, int col) const {
  const int k = find(row, col);
  return k < 0 ? 0.0 : values_[k];
}

void SystemMatrix::add(int row, int col, double value) {
  const int k = find(row, col);
  if (k < 0) {
    throw Error(ErrorCode::SparsityViolation,
                "entry (" + std::to_string(row) + "," + std::to_string(col) + ") not preallocated");
  }
  values_[k] += value;
}

void SystemMatrix::zero() { std::fill(values_.begin(), values_.end(), 0.0); }

Eigen::VectorXd SystemMatrix::multiply(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw Error(ErrorCode::SizeMismatch, "vector size differs from the matrix");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[i] += values_[k] * x[cols_[k]];
  }
  return y;
}

Eigen::MatrixXd SystemMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, cols_[k]) = values_[k];
  }
  return d;
}

double SystemMatrix::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

bool SystemMatrix::structurally_symmetric() const {
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (!has_entry(cols_[k], i)) return false;
    }
  }
  return true;
}

std::span<const int> SystemMatrix::row_columns(int row) const {
  return std::span<const int>(cols_).subspan(row_ptr_.at(row), row_ptr_.at(row + 1) - row_ptr_.at(row));
}

Eigen::VectorXd vec_get_closure(const Plex& plex, const Section& section,
                                const Eigen::VectorXd& local, PointId cell) {
  if (local.size() != section.storage_size()) {
    throw Error(ErrorCode::SizeMismatch, "local vector does not match the section");
  }
  const auto idx = closure_dof_indices(plex, section, cell);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = local[idx[i]];
  return out;
}

void vec_set_closure(const Plex& plex, const Section& section, Eigen::VectorXd& local,
                     PointId cell, std::span<const double> values, InsertMode mode) {
  if (mode != InsertMode::Insert && mode != InsertMode::Add) {
    throw Error(ErrorCode::BadMode, "insert mode must be Insert or Add");
  }
  if (local.size() != section.storage_size()) {
    throw Error(ErrorCode::SizeMismatch, "local vector does not match the section");
  }
  const auto idx = closure_dof_indices(plex, section, cell);
  if (values.size() != idx.size()) {
    throw Error(ErrorCode::SizeMismatch, "closure values have the wrong length");
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (mode == InsertMode::Add) {
      local[idx[i]] += values[i];
    } else {
      local[idx[i]] = values[i];
    }
  }
}

Eigen::VectorXd global_to_local(const ConstraintMatrix& c, const Eigen::VectorXd& global) {
  return c.apply(global);
}

void local_to_global_add(const ConstraintMatrix& c, const Eigen::VectorXd& local,
                         Eigen::VectorXd& global) {
  c.apply_transpose(local, global, true);
}

void mat_set_closure(const Plex& plex, const Section& section, const ConstraintMatrix& c,
                     SystemMatrix& matrix, PointId cell, const Eigen::MatrixXd& element_matrix) {
  const auto idx = closure_dof_indices(plex, section, cell);
  const auto n = static_cast<Eigen::Index>(idx.size());
  if (element_matrix.rows() != n || element_matrix.cols() != n) {
    throw Error(ErrorCode::SizeMismatch, "element matrix does not match the closure size");
  }
  if (c.rows() != section.storage_size()) {
    throw Error(ErrorCode::SizeMismatch, "constraint matrix does not match the section");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = element_matrix(i, j);
      if (a == 0.0) continue;
      for (const auto& ri : c.row(idx[i])) {
        for (const auto& rj : c.row(idx[j])) matrix.add(ri.col, rj.col, ri.value * a * rj.value);
      }
    }
  }
}

SystemMatrix create_matrix(const Plex& plex, const GlobalSection& global) {
  const Section& section = global.local();
  std::vector<std::vector<int>> pattern(global.global_size());
  const Stratum cells = plex.height_stratum(0);
  std::vector<int> dofs;
  for (PointId cell = cells.begin; cell < cells.end; ++cell) {
    dofs.clear();
    auto add_point = [&](PointId p) {
      if (global.constrained(p)) return;
      for (int d = 0; d < section.dof(p); ++d) dofs.push_back(global.offset(p) + d);
    };
    for (PointId p : plex.closure_points(cell)) {
      if (global.constrained(p)) {
        for (PointId a : plex.anchors(p)) add_point(a);
      } else {
        add_point(p);
      }
    }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    for (int r : dofs) pattern[r].insert(pattern[r].end(), dofs.begin(), dofs.end());
  }
  return SystemMatrix(global.global_size(), std::move(pattern));
}

Eigen::MatrixXd symmetric_gradient_element_matrix(const Plex& plex,
                                                  const ReferenceElement& element, PointId cell) {
  const int d = element.dimension();
  if (element.components() != d) {
    throw Error(ErrorCode::BadField, "symmetric gradient needs one component per dimension");
  }
  if (plex.coordinate_dimension() != d) {
    throw Error(ErrorCode::BadDimension, "symmetric gradient needs coordinate dimension == dimension");
  }
  if (!plex.height_stratum(0).contains(cell)) throw Error(ErrorCode::BadCell, "not a cell");
  const Quadrature quad = element_quadrature(element);
  const CellMap map = point_map(plex, cell, element.simplex());
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  element.tabulate(quad.points, values, &grads);

  const int nn = element.num_nodes();
  Eigen::MatrixXd ae = Eigen::MatrixXd::Zero(nn * d, nn * d);
  for (int q = 0; q < quad.size(); ++q) {
    const auto xi = std::span<const double>(quad.points).subspan(static_cast<std::size_t>(q) * d, d);
    const Eigen::MatrixXd jac = map.jacobian(xi);
    const double det = jac.determinant();
    if (!(det > 0.0)) {
      throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(cell) + " has non-positive Jacobian");
    }
    const Eigen::MatrixXd g = grads[q] * jac.inverse();  // nn x d physical gradients
    const double w = quad.weights[q] * det;
    for (int a = 0; a < nn; ++a) {
      for (int b = 0; b < nn; ++b) {
        const double dot = g.row(a).dot(g.row(b));
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            ae(a * d + i, b * d + j) += w * 0.5 * ((i == j ? dot : 0.0) + g(a, j) * g(b, i));
          }
        }
      }
    }
  }
  return ae;
}

SystemMatrix assemble_symmetric_gradient(const Plex& plex, const Section& section,
                                         const GlobalSection& global, const ConstraintMatrix& c,
                                         const ReferenceElement& element) {
  check_constraint_shape(c, section, global);
  SystemMatrix matrix = create_matrix(plex, global);
  const Stratum cells = plex.height_stratum(0);
  for (PointId cell = cells.begin; cell < cells.end; ++cell) {
    mat_set_closure(plex, section, c, matrix, cell, symmetric_gradient_element_matrix(plex, element, cell));
  }
  return matrix;
}

Eigen::VectorXd symmetric_gradient_residual(const Plex& plex, const Section& section,
                                            const ConstraintMatrix& c,
                                            const ReferenceElement& element,
                                            const Eigen::VectorXd& u_global) {
  const Eigen::VectorXd u_local = global_to_local(c, u_global);
  Eigen::VectorXd r_local = Eigen::VectorXd::Zero(section.storage_size());
  const Stratum cells = plex.height_stratum(0);
  for (PointId cell = cells.begin; cell < cells.end; ++cell) {
    const Eigen::VectorXd ue = vec_get_closure(plex, section, u_local, cell);
    const Eigen::VectorXd re = symmetric_gradient_element_matrix(plex, element, cell) * ue;
    vec_set_closure(plex, section, r_local, cell, std::span<const double>(re.data(), re.size()),
                    InsertMode::Add);
  }
  Eigen::VectorXd r_global = Eigen::VectorXd::Zero(c.cols());
  local_to_global_add(c, r_local, r_global);
  return r_global;
}

Eigen::MatrixXd node_coordinates(const Plex& plex, const ReferenceElement& element) {
  const int cd = plex.coordinate_dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(plex.num_points(), cd,
                                                  std::numeric_limits<double>::quiet_NaN());
  const Stratum cells = plex.height_stratum(0);
  for (PointId cell = cells.begin; cell < cells.end; ++cell) {
    const auto closure = plex.closure_points(cell);
    const auto x = element.pushforward_functionals(plex.closure_coordinates(cell), cd);
    for (int j = 0; j < element.num_nodes(); ++j) {
      const PointId p = closure[element.nodes()[j].closure_position];
      for (int k = 0; k < cd; ++k) out(p, k) = x[static_cast<std::size_t>(j) * cd + k];
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> rigid_body_modes(const Plex& plex, const GlobalSection& global,
                                              const ReferenceElement& element) {
  const int d = element.dimension();
  if (element.components() != d || plex.coordinate_dimension() != d) {
    throw Error(ErrorCode::BadField, "rigid body modes need a vector field of mesh dimension");
  }
  const Eigen::MatrixXd nodes = node_coordinates(plex, element);
  std::vector<Eigen::VectorXd> modes;
  for (int k = 0; k < d; ++k) {
    modes.push_back(interpolate_global(plex, global, nodes, [&](const Eigen::VectorXd&) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      v[k] = 1.0;
      return v;
    }));
  }
  if (d == 2) {
    modes.push_back(interpolate_global(plex, global, nodes, [](const Eigen::VectorXd& x) {
      return Eigen::Vector2d(-x[1], x[0]).eval();
    }));
  } else if (d == 3) {
    modes.push_back(interpolate_global(plex, global, nodes, [](const Eigen::VectorXd& x) {
      return Eigen::Vector3d(-x[1], x[0], 0.0).eval();
    }));
    modes.push_back(interpolate_global(plex, global, nodes, [](const Eigen::VectorXd& x) {
      return Eigen::Vector3d(-x[2], 0.0, x[0]).eval();
    }));
    modes.push_back(interpolate_global(plex, global, nodes, [](const Eigen::VectorXd& x) {
      return Eigen::Vector3d(0.0, -x[2], x[1]).eval();
    }));
  }
  return modes;
}

double null_space_residual(const SystemMatrix& matrix, const std::vector<Eigen::VectorXd>& modes) {
  const double norm = matrix.norm_inf();
  double worst = 0.0;
  for (const auto& m : modes) {
    const double scale = norm * m.cwiseAbs().maxCoeff();
    const double r = matrix.multiply(m).cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      if (r > 0.0) worst = std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, r / scale);
  }
  return worst;
}

bool null_space_test(const SystemMatrix& matrix, const std::vector<Eigen::VectorXd>& modes,
                     double tol) {
  return null_space_residual(matrix, modes) <= tol;
}

}  // namespace ncplex
