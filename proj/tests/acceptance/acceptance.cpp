// Acceptance run: one PASS/FAIL line per criterion.
//
//   ncplex_acceptance [--allow-fail N]...
//
// The exit status is 0 when every failing criterion was named with
// --allow-fail; a criterion listed there still prints its honest result.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include "../fixtures.hpp"
#include "ncplex/mesh_io.hpp"
#include "ncplex/verify.hpp"

using namespace ncplex;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = true;
  std::ostringstream detail;
  std::string failed;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed += (failed.empty() ? "" : ", ") + what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct NullSpaceCase {
  std::string name;
  Plex plex;
  std::string element;
};

std::vector<NullSpaceCase> null_space_cases() {
  std::vector<NullSpaceCase> out;
  out.push_back({"2D simplex P1", refine_cell(fixtures::box(2, true, {2, 2}), 0), "p1"});
  out.push_back({"2D simplex P2", refine_cell(fixtures::box(2, true, {2, 2}), 3), "p2"});
  out.push_back({"2D hypercube Q1", fixtures::forest_corner(2, 3), "q1"});
  out.push_back({"3D hypercube Q1", fixtures::forest_corner(3, 2), "q1"});
  out.push_back({"3D simplex P1", refine_cell(fixtures::box(3, true, {1, 1, 1}), 2), "p1"});
  return out;
}

double null_space_max(const Plex& plex, const std::string& element, double perturb) {
  VerifyOptions opts;
  opts.element = element;
  opts.perturb = perturb;
  return verify_rigid_body_null_space(plex, opts).max_residual;
}

// 1. Rigid body modes lie in the null space of the constrained operator.
Result criterion_null_space() {
  Result r;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& c : null_space_cases()) {
    r.require(c.plex.num_constrained_points() > 0, c.name + " has no refined cell");
    const double res = null_space_max(c.plex, c.element, 0.0);
    worst = std::max(worst, res);
    r.require(res <= 1e-9, c.name);
  }
  const double elapsed = seconds_since(t0);
  r.require(elapsed < 10.0, "runtime");
  r.detail << "worst relative residual " << worst << ", " << elapsed << " s";
  return r;
}

// 2. A 0.1 perturbation of one coefficient breaks the null space.
Result criterion_negative_control() {
  Result r;
  double weakest = 1e300;
  auto meshes = fixtures::treed_meshes();
  for (auto& c : null_space_cases()) meshes.push_back({c.name, std::move(c.plex), c.element});
  for (const auto& m : meshes) {
    const double res = null_space_max(m.plex, m.element, 0.1);
    weakest = std::min(weakest, res);
    r.require(res > 1e-4, m.name);
  }
  r.detail << meshes.size() << " meshes, smallest perturbed residual " << weakest;
  return r;
}

// 3. Reference-tree constraints equal the physical oracle; assembly equals C^T A_u C.
Result criterion_oracles() {
  Result r;
  double worst_c = 0.0, worst_a = 0.0;
  int checked = 0;
  for (const auto& m : fixtures::treed_meshes()) {
    const int d = m.plex.dimension();
    for (const std::string& name : {m.element, fixtures::second_order(m.element)}) {
      for (int comps : {1, d}) {
        const auto space = fixtures::dof_space(m.plex, name, comps);
        if (space.local.storage_size() > 200) continue;
        ++checked;
        const auto c = build_constraint_matrix(m.plex, space.local, space.global, space.element);
        const double ec = fixtures::max_abs(c.to_dense() - fixtures::oracle_constraint_matrix(m.plex, space));
        worst_c = std::max(worst_c, ec);
        r.require(ec <= 1e-12, m.name + " " + name + " constraints");
        if (comps != d) continue;
        const auto e = assemble_symmetric_gradient(m.plex, space.local, space.global, c, space.element);
        const Eigen::MatrixXd cd = c.to_dense();
        const double ea = fixtures::max_abs(
            e.to_dense() - cd.transpose() * fixtures::unconstrained_operator(m.plex, space) * cd);
        worst_a = std::max(worst_a, ea);
        r.require(ea <= 1e-11, m.name + " " + name + " assembly");
      }
    }
  }
  r.require(checked > 0, "no mesh small enough");
  r.detail << checked << " spaces, max |C - oracle| " << worst_c << ", max |E - C^T A C| " << worst_a;
  return r;
}

// 4. Polynomials of degree <= k pass through the constraints unchanged.
Result criterion_reproduction() {
  Result r;
  double worst = 0.0;
  std::set<std::string> shapes;
  for (const auto& m : fixtures::treed_meshes()) {
    shapes.insert(shape_name(m.plex.shape(0)));
    for (const std::string& name : {m.element, fixtures::second_order(m.element)}) {
      const auto space = fixtures::dof_space(m.plex, name, 1);
      const auto c = build_constraint_matrix(m.plex, space.local, space.global, space.element);
      for (int k = 1; k <= space.element.degree(); ++k) {
        const double err = fixtures::reproduction_error(m.plex, space, c, k);
        worst = std::max(worst, err);
        r.require(err <= 1e-10, m.name + " " + name + " k=" + std::to_string(k));
      }
    }
  }
  r.require(shapes.size() == 4, "not every 2D/3D shape covered");
  r.detail << shapes.size() << " cell shapes, max error " << worst;
  return r;
}

// 5. Topology invariants.
Result criterion_topology() {
  Result r;
  int untreed = 0, random = 0;
  for (unsigned seed = 0; seed < 24; ++seed) {
    const Plex plex = fixtures::random_conformal_mesh(seed);
    ++random;
    ++untreed;
    r.require(check_cone_support_duality(plex), "duality, seed " + std::to_string(seed));
    r.require(fixtures::closure_idempotent(plex), "idempotence, seed " + std::to_string(seed));
    r.require(fixtures::star_closure_adjoint(plex), "adjointness, seed " + std::to_string(seed));
  }
  for (const Plex& plex : {fixtures::fig5_untreed(), fixtures::box(3, false, {2, 2, 1}),
                           fixtures::box(3, true, {2, 1, 1})}) {
    ++untreed;
    r.require(check_cone_support_duality(plex), "duality on an untreed fixture");
  }
  const auto treed = fixtures::treed_meshes();
  for (const auto& m : treed) {
    r.require(fixtures::one_sided_duality_with_broken_pair(m.plex), "one-sided duality, " + m.name);
    r.require(!check_cone_support_duality(m.plex), "duality should fail on " + m.name);
  }
  r.detail << untreed << " untreed meshes (" << random << " randomized), " << treed.size()
           << " treed meshes";
  return r;
}

// 6. The three-triangle fixture with the overlay (6 5 7), (7 5 8), (14 5 12).
Result criterion_fixture() {
  Result r;
  const Plex plex = fixtures::fig5();
  const auto space = fixtures::dof_space(plex, "p1", 1);
  const auto c = build_constraint_matrix(plex, space.local, space.global, space.element);
  std::vector<int> rows;
  for (int i = 0; i < c.rows(); ++i) {
    if (c.is_constrained_row(i)) rows.push_back(i);
  }
  bool halves = rows.size() == 1 && c.row(rows[0]).size() == 2;
  if (halves) {
    for (const auto& e : c.row(rows[0])) halves = halves && std::abs(e.value - 0.5) <= 1e-12;
  }
  r.require(space.global.global_size() == 5, "globalSize");
  r.require(rows.size() == 1, "one constrained row");
  r.require(halves, "entries (0.5, 0.5)");
  r.detail << "strata " << plex.height_stratum(0).size() << "/" << plex.height_stratum(1).size()
           << "/" << plex.height_stratum(2).size() << ", globalSize " << space.global.global_size()
           << " (expected 5), constrained rows " << rows.size();
  if (halves) r.detail << " with entries (0.5, 0.5)";
  return r;
}

// 7. Balanced corner-refined forests pass criteria 1 and 5.
Result criterion_forest() {
  Result r;
  for (int dim : {2, 3}) {
    const std::vector<int> roots(dim, 1);
    Forest f = Forest::brick(dim, roots);
    for (int l = 0; l < (dim == 2 ? 4 : 3); ++l) {
      f = f.refine([](int root, int, Morton m) { return root == 0 && m == 0; });
    }
    // also push one extra level into a neighbour so balancing has work to do
    f = f.refine([](int, int level, Morton m) { return level == 1 && m != 0; });
    const Forest b = f.balance_2to1();
    r.require(b.num_leaves() <= 1000, "forest too large for the oracle");
    // O(n^2) adjacency oracle
    bool oracle = true;
    const auto& leaves = b.leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (std::size_t j = i + 1; j < leaves.size(); ++j) {
        if (b.adjacent(leaves[i], leaves[j]) && std::abs(leaves[i].level - leaves[j].level) > 1) {
          oracle = false;
        }
      }
    }
    r.require(oracle, std::to_string(dim) + "D balance");
    const Plex plex = convert_to_plex(b);
    r.require(plex.num_constrained_points() > 0, std::to_string(dim) + "D has no hanging points");
    const double res = null_space_max(plex, "q1", 0.0);
    r.require(res <= 1e-9, std::to_string(dim) + "D null space");
    r.require(fixtures::one_sided_duality_with_broken_pair(plex), std::to_string(dim) + "D duality");
    r.require(fixtures::closure_idempotent(plex), std::to_string(dim) + "D idempotence");
    r.detail << (dim == 3 ? "; " : "") << dim << "D: " << b.num_leaves() << " leaves, residual " << res;
  }
  return r;
}

// 8. Byte-stable DAG round trips and the legacy VTK header and type codes.
Result criterion_serialization() {
  Result r;
  int fixtures_checked = 0;
  std::vector<Plex> meshes;
  for (auto& m : fixtures::treed_meshes()) meshes.push_back(std::move(m.plex));
  meshes.push_back(fixtures::fig5_untreed());
  meshes.push_back(fixtures::box(2, true, {2, 1}));
  meshes.push_back(fixtures::box(3, false, {1, 1, 2}));
  for (const Plex& plex : meshes) {
    const std::string once = write_dag(plex);
    r.require(write_dag(read_dag(once)) == once, "round trip " + std::to_string(fixtures_checked));
    ++fixtures_checked;
  }
  const std::string header = "# vtk DataFile Version 2.0\nncplex mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const std::pair<const char*, Plex> typed[] = {
      {"5", fixtures::box(2, true, {1, 1})},
      {"9", fixtures::box(2, false, {1, 1})},
      {"10", fixtures::box(3, true, {1, 1, 1})},
      {"12", fixtures::box(3, false, {1, 1, 1})},
  };
  for (const auto& [code, plex] : typed) {
    const std::string vtk = write_vtk(plex);
    r.require(vtk.rfind(header, 0) == 0, std::string("header for type ") + code);
    const auto at = vtk.find("CELL_TYPES");
    r.require(at != std::string::npos &&
                  vtk.find(std::string("\n") + code + "\n", at) != std::string::npos,
              std::string("type code ") + code);
  }
  r.detail << fixtures_checked << " DAG fixtures, VTK types 5/9/10/12";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> allowed;
  app.add_option("--allow-fail", allowed, "Criterion whose failure does not affect the exit status");
  CLI11_PARSE(app, argc, argv);

  const std::pair<const char*, Result (*)()> criteria[] = {
      {"rigid-body null space", criterion_null_space},
      {"negative control", criterion_negative_control},
      {"constraint and assembly oracles", criterion_oracles},
      {"polynomial reproduction", criterion_reproduction},
      {"topology invariants", criterion_topology},
      {"three-triangle fixture", criterion_fixture},
      {"forest pipeline", criterion_forest},
      {"serialization", criterion_serialization},
  };
  int unexpected = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << "exception: " << e.what();
    }
    const bool tolerated = std::find(allowed.begin(), allowed.end(), index) != allowed.end();
    std::string line = r.detail.str();
    if (!r.failed.empty()) line += " [failed: " + r.failed + "]";
    if (!r.pass && tolerated) line += " (allowed to fail)";
    std::printf("criterion %d %s: %s - %s\n", index, name, r.pass ? "PASS" : "FAIL", line.c_str());
    if (!r.pass && !tolerated) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
