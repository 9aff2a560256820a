#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace ncplex;

namespace {

std::vector<std::pair<std::string, int>> element_variants(const fixtures::NamedMesh& m) {
  const int d = m.plex.dimension();
  return {{m.element, 1}, {m.element, d}, {fixtures::second_order(m.element), 1},
          {fixtures::second_order(m.element), d}};
}

}  // namespace

TEST_CASE("section offsets") {
  const Section s({1, 0, 2, 3});
  CHECK(s.offset(0) == 0);
  CHECK(s.offset(1) == 1);
  CHECK(s.offset(2) == 1);
  CHECK(s.offset(3) == 3);
  CHECK(s.storage_size() == 6);
  const GlobalSection g(s, {0, 0, 1, 0});
  CHECK(g.global_size() == 4);
  CHECK(g.offset(2) == -1);
  CHECK(g.offset(3) == 1);
  CHECK(g.constrained(2));
}

TEST_CASE("three-triangle fixture: P1 sizes and the hanging vertex row") {
  const Plex plex = fixtures::fig5();
  const auto space = fixtures::dof_space(plex, "p1", 1);
  // Five vertices with the midpoint of c constrained.
  CHECK(space.local.storage_size() == 5);
  CHECK(space.global.global_size() == 4);
  const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
  CHECK(c.num_constrained_rows() == 1);
  const int row = space.local.offset(14);
  CHECK(c.is_constrained_row(row));
  const auto entries = c.row(row);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(entries[1].value == doctest::Approx(0.5).epsilon(1e-15));
  std::set<int> cols{entries[0].col, entries[1].col};
  std::set<int> ends;
  for (PointId v : plex.closure_vertices(5)) ends.insert(space.global.offset(v));
  CHECK(cols == ends);
}

TEST_CASE("three-triangle fixture: P2 rows on the halves of c") {
  const Plex plex = fixtures::fig5();
  const auto space = fixtures::dof_space(plex, "p2", 1);
  CHECK(space.global.global_size() == 10);
  const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
  CHECK(c.num_constrained_rows() == 3);
  // delta sits at the node of c.
  const auto delta = c.row(space.local.offset(14));
  REQUIRE(delta.size() == 1);
  CHECK(delta[0].col == space.global.offset(5));
  CHECK(delta[0].value == doctest::Approx(1.0));
  // midpoints of d and e: 3/4 on c, 3/8 on the near end, -1/8 on the far end.
  for (PointId half : {6, 7}) {
    std::vector<double> values;
    for (const auto& e : c.row(space.local.offset(half))) values.push_back(e.value);
    std::sort(values.begin(), values.end());
    REQUIRE(values.size() == 3);
    CHECK(values[0] == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(values[1] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(values[2] == doctest::Approx(0.75).epsilon(1e-14));
  }
}

TEST_CASE("reference blocks of the green tree") {
  const auto tree = reference_tree_by_name("green-triangle");
  const ReferenceElement p1(CellShape::Triangle, 1);
  const auto blocks = reference_constraints(*tree, p1);
  REQUIRE(blocks.count(12) == 1);
  const auto& b = blocks.at(12);
  CHECK(b.parent == 4);
  CHECK(b.coefficients.rows() == 1);
  CHECK(b.coefficients.cols() == 2);
  CHECK(b.coefficients(0, 0) == doctest::Approx(0.5));
  CHECK(b.coefficients(0, 1) == doctest::Approx(0.5));
  const ReferenceElement q1(CellShape::Quadrilateral, 1);
  CHECK_THROWS_AS(reference_constraints(*tree, q1), Error);
}

TEST_CASE("computed constraints equal the physical-space oracle") {
  for (const auto& mesh : fixtures::treed_meshes()) {
    for (const auto& [name, comps] : element_variants(mesh)) {
      CAPTURE(mesh.name);
      CAPTURE(name);
      CAPTURE(comps);
      const auto space = fixtures::dof_space(mesh.plex, name, comps);
      if (space.local.storage_size() > 200) continue;
      const auto c = build_constraint_matrix(mesh.plex, space.local, space.global, space.element);
      check_constraint_shape(c, space.local, space.global);
      const Eigen::MatrixXd oracle = fixtures::oracle_constraint_matrix(mesh.plex, space);
      CHECK(fixtures::max_abs(c.to_dense() - oracle) <= 1e-12);
    }
  }
}

TEST_CASE("constraint rows: partition of unity and anchor sparsity") {
  for (const auto& mesh : fixtures::treed_meshes()) {
    for (const auto& [name, comps] : element_variants(mesh)) {
      CAPTURE(mesh.name);
      CAPTURE(name);
      const Plex& plex = mesh.plex;
      const auto space = fixtures::dof_space(plex, name, comps);
      const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
      int constrained_dofs = 0;
      for (PointId p = 0; p < plex.num_points(); ++p) {
        const int ndof = space.local.dof(p);
        if (ndof == 0) continue;
        std::set<int> allowed;
        if (space.global.constrained(p)) {
          constrained_dofs += ndof;
          for (PointId a : plex.anchors(p)) {
            for (int k = 0; k < space.local.dof(a); ++k) allowed.insert(space.global.offset(a) + k);
          }
        } else {
          for (int k = 0; k < ndof; ++k) allowed.insert(space.global.offset(p) + k);
        }
        for (int k = 0; k < ndof; ++k) {
          const int row = space.local.offset(p) + k;
          CHECK(c.is_constrained_row(row) == space.global.constrained(p));
          double sum = 0.0;
          for (const auto& e : c.row(row)) {
            sum += e.value;
            CHECK(allowed.count(e.col) == 1);
            // components stay decoupled
            CHECK(e.col % comps == k);
          }
          CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
      }
      CHECK(c.num_constrained_rows() == constrained_dofs);
    }
  }
}

TEST_CASE("polynomial reproduction through the constraints") {
  for (const auto& mesh : fixtures::treed_meshes()) {
    for (const auto& [name, comps] : element_variants(mesh)) {
      CAPTURE(mesh.name);
      CAPTURE(name);
      const auto space = fixtures::dof_space(mesh.plex, name, comps);
      const auto c = build_constraint_matrix(mesh.plex, space.local, space.global, space.element);
      for (int k = 1; k <= space.element.degree(); ++k) {
        CAPTURE(k);
        CHECK(fixtures::reproduction_error(mesh.plex, space, c, k) <= 1e-10);
      }
    }
  }
}

TEST_CASE("trivial matrix, perturbation and shape checks") {
  const Plex plex = fixtures::fig5();
  const auto space = fixtures::dof_space(plex, "p1", 1);
  auto t = trivial_constraint_matrix(space.local, space.global);
  CHECK(t.rows() == 5);
  CHECK(t.cols() == 4);
  CHECK(t.num_constrained_rows() == 1);
  CHECK(t.row(space.local.offset(14)).empty());
  CHECK(t.nonzeros() == 4);

  auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
  const double before = c.row(space.local.offset(14))[0].value;
  CHECK(perturb_first_constraint(c, 0.1));
  CHECK(c.row(space.local.offset(14))[0].value == doctest::Approx(before + 0.1));
  auto conformal = trivial_constraint_matrix(Section({1, 1}), GlobalSection(Section({1, 1}), {0, 0}));
  CHECK_FALSE(perturb_first_constraint(conformal, 0.1));

  const ConstraintMatrix wrong(3, 4);
  try {
    check_constraint_shape(wrong, space.local, space.global);
    FAIL("expected SizeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeMismatch);
  }

  std::ostringstream coo;
  build_constraint_matrix(plex, space.local, space.global, space.element).write_coo(coo);
  int lines = 0;
  std::istringstream in(coo.str());
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 6);  // four identity rows and the two halves of the hanging row
}

TEST_CASE("apply and apply_transpose are adjoint") {
  const Plex plex = fixtures::forest_corner(2, 2);
  const auto space = fixtures::dof_space(plex, "q2", 2);
  const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(c.cols(), -1.0, 2.0);
  const Eigen::VectorXd l = Eigen::VectorXd::LinSpaced(c.rows(), 0.5, -0.7);
  Eigen::VectorXd ctl = Eigen::VectorXd::Zero(c.cols());
  c.apply_transpose(l, ctl, false);
  CHECK(l.dot(c.apply(g)) == doctest::Approx(g.dot(ctl)).epsilon(1e-13));
  CHECK((c.to_dense() * g - c.apply(g)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("closure dof indices reject non-cells") {
  const Plex plex = fixtures::fig5();
  const auto space = fixtures::dof_space(plex, "p1", 1);
  CHECK(closure_dof_indices(plex, space.local, 1).size() == 3);
  CHECK_THROWS_AS(closure_dof_indices(plex, space.local, 5), Error);
}
