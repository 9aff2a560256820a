#include <doctest.h>

#include <random>

#include "fixtures.hpp"

using namespace ncplex;

namespace {

// Intersection dimension of two closed leaf boxes, -1 when disjoint.
int intersection_dim(const Forest& f, const Quadrant& a, const Quadrant& b) {
  const auto pa = f.global_anchor(a), pb = f.global_anchor(b);
  const std::int64_t sa = Forest::side(a.level), sb = Forest::side(b.level);
  int dim = 0;
  for (int k = 0; k < f.dimension(); ++k) {
    const std::int64_t lo = std::max(pa[k], pb[k]);
    const std::int64_t hi = std::min(pa[k] + sa, pb[k] + sb);
    if (hi < lo) return -1;
    if (hi > lo) ++dim;
  }
  return dim;
}

bool oracle_balanced(const Forest& f) {
  const auto& leaves = f.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      const int d = intersection_dim(f, leaves[i], leaves[j]);
      if (d >= 1 && d < f.dimension() && std::abs(leaves[i].level - leaves[j].level) > 1) {
        return false;
      }
    }
  }
  return true;
}

double covered_volume(const Forest& f) {
  double v = 0.0;
  for (const auto& q : f.leaves()) v += std::pow(0.5, q.level * f.dimension());
  return v;
}

// Every leaf of `fine` lies inside a leaf of `coarse` of lower or equal level.
bool refines(const Forest& fine, const Forest& coarse) {
  for (const auto& q : fine.leaves()) {
    const auto p = fine.global_anchor(q);
    bool inside = false;
    for (const auto& c : coarse.leaves()) {
      if (c.level > q.level) continue;
      const auto pc = coarse.global_anchor(c);
      bool ok = true;
      for (int k = 0; k < fine.dimension(); ++k) {
        ok = ok && p[k] >= pc[k] && p[k] + Forest::side(q.level) <= pc[k] + Forest::side(c.level);
      }
      if (ok) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

Forest random_forest(int dim, std::vector<int> roots, unsigned seed, int rounds) {
  std::mt19937 rng(seed);
  Forest f = Forest::brick(dim, roots);
  for (int r = 0; r < rounds; ++r) {
    std::bernoulli_distribution flip(0.3);
    f = f.refine([&](int, int level, Morton) { return level < 5 && flip(rng); });
  }
  return f;
}

}  // namespace

TEST_CASE("leaf counts and Morton order") {
  const std::vector<int> one{1, 1};
  Forest f = Forest::brick(2, one).refine([](int, int, Morton) { return true; });
  CHECK(f.num_leaves() == 4);
  f = f.refine([](int, int, Morton m) { return m == 0; });
  CHECK(f.num_leaves() == 7);
  // x is the lowest interleaved bit
  Quadrant q{0, 1, {1u << 28, 0, 0}};
  CHECK(f.morton(q) == (Morton{1} << 56));
  q.anchor = {0, 1u << 28, 0};
  CHECK(f.morton(q) == (Morton{1} << 57));
  for (int i = 1; i < f.num_leaves(); ++i) {
    const auto& a = f.leaves()[i - 1];
    const auto& b = f.leaves()[i];
    CHECK((a.root < b.root || (a.root == b.root && f.morton(a) < f.morton(b))));
  }
  CHECK(covered_volume(f) == doctest::Approx(1.0));
}

TEST_CASE("refinement stops at the maximum level") {
  const std::vector<int> one{1, 1};
  Forest f = Forest::brick(2, one);
  for (int l = 0; l < Forest::kMaxLevel; ++l) {
    f = f.refine([](int, int, Morton m) { return m == 0; });
  }
  CHECK(f.num_leaves() == 1 + 3 * Forest::kMaxLevel);
  try {
    f.refine([](int, int, Morton m) { return m == 0; });
    FAIL("expected LevelOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelOverflow);
  }
  CHECK_THROWS_AS(Forest::brick(4, std::vector<int>{1, 1, 1, 1}), Error);
}

TEST_CASE("adjacency") {
  const std::vector<int> one{1, 1, 1};
  const Forest f = Forest::brick(3, one).refine([](int, int, Morton) { return true; });
  int face = 0, edge = 0, corner = 0;
  const auto& l = f.leaves();
  for (std::size_t j = 1; j < l.size(); ++j) {
    const int d = intersection_dim(f, l[0], l[j]);
    face += d == 2;
    edge += d == 1;
    corner += d == 0;
    CHECK(f.adjacent(l[0], l[j]) == (d == 1 || d == 2));
  }
  CHECK(face == 3);
  CHECK(edge == 3);
  CHECK(corner == 1);
}

TEST_CASE("balance agrees with the pairwise oracle") {
  for (unsigned seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    const int dim = seed % 3 == 0 ? 3 : 2;
    const std::vector<int> roots = dim == 2 ? std::vector<int>{2, 1} : std::vector<int>{1, 1, 1};
    const Forest f = random_forest(dim, roots, seed, dim == 2 ? 5 : 3);
    if (f.num_leaves() > 1000) continue;
    CHECK(f.is_balanced() == oracle_balanced(f));
    const Forest b = f.balance_2to1();
    if (b.num_leaves() > 1000) continue;
    CHECK(oracle_balanced(b));
    CHECK(b.is_balanced());
    CHECK(refines(b, f));
    CHECK(covered_volume(b) == doctest::Approx(static_cast<double>(f.num_roots())));
    CHECK(b.balance_2to1().leaves() == b.leaves());
  }
}

TEST_CASE("balance propagates across roots") {
  const std::vector<int> roots{2, 1};
  Forest f = Forest::brick(2, roots);
  // root 0 at level 3 next to root 1 at level 0
  for (int l = 0; l < 3; ++l) f = f.refine([](int root, int, Morton) { return root == 0; });
  CHECK_FALSE(oracle_balanced(f));
  CHECK_FALSE(f.is_balanced());
  const Forest b = f.balance_2to1();
  CHECK(oracle_balanced(b));
  int root1_leaves = 0;
  for (const auto& q : b.leaves()) root1_leaves += q.root == 1;
  CHECK(root1_leaves > 1);
}

TEST_CASE("conversion to a plex") {
  const std::vector<int> one{1, 1};
  const Plex uniform = convert_to_plex(Forest::brick(2, one).refine([](int, int, Morton) { return true; }));
  CHECK(uniform.height_stratum(0).size() == 4);
  CHECK(uniform.height_stratum(1).size() == 12);
  CHECK(uniform.depth_stratum(0).size() == 9);
  CHECK(uniform.is_conformal());

  const std::vector<int> two{2, 1};
  const Plex hanging =
      convert_to_plex(Forest::brick(2, two).refine([](int root, int, Morton) { return root == 0; }));
  CHECK(hanging.height_stratum(0).size() == 5);
  CHECK(hanging.height_stratum(1).size() == 16);
  CHECK(hanging.depth_stratum(0).size() == 11);
  CHECK(hanging.num_constrained_points() == 3);
  CHECK(hanging.reference_tree()->name() == "default-hypercube-2");

  const std::vector<int> cube{1, 1, 1};
  const Plex hex = convert_to_plex(Forest::brick(3, cube).refine([](int, int, Morton) { return true; }));
  CHECK(hex.height_stratum(0).size() == 8);
  CHECK(hex.height_stratum(1).size() == 36);
  CHECK(hex.height_stratum(2).size() == 54);
  CHECK(hex.depth_stratum(0).size() == 27);

  // root 0 at level 2 against root 1 at level 0
  Forest deep = Forest::brick(2, two);
  for (int l = 0; l < 2; ++l) deep = deep.refine([](int root, int, Morton) { return root == 0; });
  try {
    convert_to_plex(deep);
    FAIL("expected Unbalanced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unbalanced);
  }
}

TEST_CASE("corner-refined forests convert and verify") {
  for (int dim : {2, 3}) {
    CAPTURE(dim);
    const Plex plex = fixtures::forest_corner(dim, dim == 2 ? 4 : 2);
    CHECK(plex.num_constrained_points() > 0);
    CHECK(fixtures::one_sided_duality_with_broken_pair(plex));
    const auto space = fixtures::dof_space(plex, "q1", dim);
    const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
    const auto e = assemble_symmetric_gradient(plex, space.local, space.global, c, space.element);
    CHECK(null_space_test(e, rigid_body_modes(plex, space.global, space.element)));
  }
}
