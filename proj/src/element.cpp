#include "ncplex/element.hpp"

#include <cmath>
#include <functional>

namespace ncplex {

namespace {

bool owns_node(CellShape point_shape, int degree) {
  if (point_shape == CellShape::Point) return true;
  if (degree == 1) return false;
  return point_shape == CellShape::Segment || point_shape == CellShape::Quadrilateral ||
         point_shape == CellShape::Hexahedron;
}

CellShape shape_for(int dim, bool simplex) {
  switch (dim) {
    case 1: return CellShape::Segment;
    case 2: return simplex ? CellShape::Triangle : CellShape::Quadrilateral;
    case 3: return simplex ? CellShape::Tetrahedron : CellShape::Hexahedron;
    default: throw Error(ErrorCode::BadDimension, "dimension must be 1, 2 or 3");
  }
}

}  // namespace

ReferenceElement::ReferenceElement(CellShape shape, int degree, int components, bool simplex)
    : cell_(nullptr), degree_(degree), components_(components) {
  if (shape == CellShape::Point) throw Error(ErrorCode::UnsupportedShape, "element on a vertex");
  if (degree < 1 || degree > 2) {
    throw Error(ErrorCode::InvalidArgument, "only degrees 1 and 2 are supported");
  }
  if (components < 1) throw Error(ErrorCode::InvalidArgument, "components must be positive");
  if (shape != CellShape::Segment && simplex != shape_is_simplex(shape)) {
    throw Error(ErrorCode::ShapeMismatch, "element family does not match the cell shape");
  }
  cell_ = &reference_cell(shape, simplex);
  const int dim = cell_->dim;

  const auto closure = cell_->plex.closure_points(0);
  for (std::size_t pos = 0; pos < closure.size(); ++pos) {
    const PointId p = closure[pos];
    if (!owns_node(cell_->plex.shape(p), degree)) continue;
    nodes_.push_back(Node{cell_->plex.centroid(p), static_cast<int>(pos)});
  }

  std::vector<int> exps(dim, 0);
  std::function<void(int)> enumerate = [&](int axis) {
    if (axis == dim) {
      int total = 0;
      for (int e : exps) total += e;
      if (!cell_->simplex || total <= degree) exponents_.push_back(exps);
      return;
    }
    for (int e = 0; e <= degree; ++e) {
      exps[axis] = e;
      enumerate(axis + 1);
    }
  };
  enumerate(0);
  if (exponents_.size() != nodes_.size()) {
    throw Error(ErrorCode::InvalidArgument, "node count does not match the polynomial space");
  }

  const int n = num_nodes();
  Eigen::MatrixXd vandermonde(n, n);
  Eigen::VectorXd row;
  for (int i = 0; i < n; ++i) {
    monomials(nodes_[i].xi, row, nullptr);
    vandermonde.row(i) = row.transpose();
  }
  coefficients_ = vandermonde.fullPivLu().inverse();
}

ReferenceElement ReferenceElement::from_name(const std::string& name, int dim, int components) {
  if (name.size() != 2 || (name[0] != 'p' && name[0] != 'q') || (name[1] != '1' && name[1] != '2')) {
    throw Error(ErrorCode::InvalidArgument, "unknown element '" + name + "'");
  }
  const bool simplex = name[0] == 'p';
  return ReferenceElement(shape_for(dim, simplex), name[1] - '0', components, simplex);
}

std::string ReferenceElement::name() const {
  return std::string(simplex() ? "p" : "q") + std::to_string(degree_);
}

int ReferenceElement::nodes_on(CellShape point_shape) const {
  if (point_shape == CellShape::Point) return 1;
  if (shape_dimension(point_shape) > dimension()) return 0;
  if (point_shape != CellShape::Segment && shape_is_simplex(point_shape) != simplex()) {
    throw Error(ErrorCode::UnsupportedShape,
                std::string("element ") + name() + " has no layout on " + shape_name(point_shape));
  }
  return owns_node(point_shape, degree_) ? 1 : 0;
}

void ReferenceElement::monomials(std::span<const double> x, Eigen::VectorXd& values,
                                 Eigen::MatrixXd* grads) const {
  const int dim = cell_->dim;
  const int m = static_cast<int>(exponents_.size());
  values.resize(m);
  if (grads) grads->setZero(m, dim);
  for (int l = 0; l < m; ++l) {
    const auto& e = exponents_[l];
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= std::pow(x[k], e[k]);
    values[l] = v;
    if (!grads) continue;
    for (int k = 0; k < dim; ++k) {
      if (e[k] == 0) continue;
      double g = e[k] * std::pow(x[k], e[k] - 1);
      for (int j = 0; j < dim; ++j) {
        if (j != k) g *= std::pow(x[j], e[j]);
      }
      (*grads)(l, k) = g;
    }
  }
}

void ReferenceElement::tabulate(std::span<const double> points, Eigen::MatrixXd& values,
                                std::vector<Eigen::MatrixXd>* gradients) const {
  const int dim = cell_->dim;
  if (points.size() % dim != 0) {
    throw Error(ErrorCode::SizeMismatch, "tabulation points must have dimension() coordinates");
  }
  const int npts = static_cast<int>(points.size()) / dim;
  values.resize(npts, num_nodes());
  if (gradients) gradients->assign(npts, Eigen::MatrixXd());
  Eigen::VectorXd mono;
  Eigen::MatrixXd mono_grad;
  for (int i = 0; i < npts; ++i) {
    const auto x = points.subspan(static_cast<std::size_t>(i) * dim, dim);
    if (!cell_->contains(x)) {
      throw Error(ErrorCode::PointOutsideCell, "tabulation point outside the reference cell");
    }
    monomials(x, mono, gradients ? &mono_grad : nullptr);
    values.row(i) = (coefficients_.transpose() * mono).transpose();
    if (gradients) (*gradients)[i] = coefficients_.transpose() * mono_grad;
  }
}

std::vector<double> ReferenceElement::pushforward_functionals(
    std::span<const double> vertex_coords, int coord_dim) const {
  const CellMap map(*cell_, vertex_coords, coord_dim);
  double scale = 0.0;
  for (double c : vertex_coords) scale = std::max(scale, std::abs(c));
  scale = std::max(scale, 1.0);
  std::vector<double> out;
  out.reserve(nodes_.size() * coord_dim);
  for (const auto& node : nodes_) {
    const double factor = map.measure_factor(node.xi);
    if (!(factor > 1e-13 * std::pow(scale, cell_->dim))) {
      throw Error(ErrorCode::DegenerateCell, "cell map is not orientation preserving");
    }
    const Eigen::VectorXd x = map.map(node.xi);
    out.insert(out.end(), x.data(), x.data() + x.size());
  }
  return out;
}

Quadrature gauss_legendre(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Quadrature q;
  q.dim = 1;
  for (int i = 0; i < n; ++i) {
    q.points.push_back(eig.eigenvalues()[i]);
    const double v = eig.eigenvectors()(0, i);
    q.weights.push_back(2.0 * v * v);
  }
  return q;
}

Quadrature simplex_quadrature(int dim, int degree) {
  const int n = (degree + dim) / 2 + 1;
  const Quadrature g = gauss_legendre(n);
  std::vector<double> u(n), w(n);
  for (int i = 0; i < n; ++i) {
    u[i] = 0.5 * (g.points[i] + 1.0);
    w[i] = 0.5 * g.weights[i];
  }
  Quadrature q;
  q.dim = dim;
  if (dim == 1) {
    q.points = u;
    q.weights = w;
  } else if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        q.points.insert(q.points.end(), {u[i], u[j] * (1.0 - u[i])});
        q.weights.push_back(w[i] * w[j] * (1.0 - u[i]));
      }
    }
  } else if (dim == 3) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const double a = 1.0 - u[i], b = 1.0 - u[j];
          q.points.insert(q.points.end(), {u[i], u[j] * a, u[k] * a * b});
          q.weights.push_back(w[i] * w[j] * w[k] * a * a * b);
        }
      }
    }
  } else {
    throw Error(ErrorCode::BadDimension, "quadrature dimension must be 1, 2 or 3");
  }
  return q;
}

Quadrature tensor_quadrature(int dim, int points_per_direction) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::BadDimension, "quadrature dimension must be 1, 2 or 3");
  const Quadrature g = gauss_legendre(points_per_direction);
  Quadrature q;
  q.dim = dim;
  const int n = points_per_direction;
  int total = 1;
  for (int k = 0; k < dim; ++k) total *= n;
  for (int idx = 0; idx < total; ++idx) {
    double weight = 1.0;
    int rest = idx;
    for (int k = 0; k < dim; ++k) {
      const int i = rest % n;
      rest /= n;
      q.points.push_back(g.points[i]);
      weight *= g.weights[i];
    }
    q.weights.push_back(weight);
  }
  return q;
}

Quadrature element_quadrature(const ReferenceElement& element) {
  const int k = element.degree();
  return element.simplex() ? simplex_quadrature(element.dimension(), 2 * k)
                           : tensor_quadrature(element.dimension(), k + 1);
}

}  // namespace ncplex
