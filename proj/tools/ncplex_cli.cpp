// Command-line driver. Everything goes through the C API.
//
// Exit codes: 0 success / verification passed, 1 verification failed or the
// library reported an error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ncplex/ncplex.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct LibraryFailure {
  ncp_status status;
};

void check(ncp_status status) {
  if (status != NCP_OK) throw LibraryFailure{status};
}

struct PlexDeleter {
  void operator()(ncp_plex* p) const { ncp_plex_destroy(p); }
};
struct ForestDeleter {
  void operator()(ncp_forest* f) const { ncp_forest_destroy(f); }
};
using PlexPtr = std::unique_ptr<ncp_plex, PlexDeleter>;
using ForestPtr = std::unique_ptr<ncp_forest, ForestDeleter>;

PlexPtr read_plex(const std::string& path) {
  ncp_plex* p = nullptr;
  check(ncp_plex_read_dag(path.c_str(), &p));
  return PlexPtr(p);
}

std::vector<int> parse_cells(const std::string& text, int dim) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, 'x')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--cells", "expected positive integers like 2x3, got '" + text + "'");
    }
  }
  if (static_cast<int>(out.size()) != dim) {
    throw CLI::ValidationError("--cells", "need " + std::to_string(dim) + " counts for --dim " +
                                              std::to_string(dim));
  }
  return out;
}

void write_dag(const ncp_plex* plex, const std::string& path) {
  if (path == "-") {
    char* text = nullptr;
    check(ncp_plex_dag_string(plex, &text));
    std::fputs(text, stdout);
    ncp_free_string(text);
  } else {
    check(ncp_plex_write_dag(plex, path.c_str()));
  }
}

int run_info(const std::string& file) {
  auto plex = read_plex(file);
  ncp_plex_info info{};
  check(ncp_plex_get_info(plex.get(), &info));
  std::printf("dimension: %d (coordinates %d), points: %d\n", info.dimension,
              info.coordinate_dimension, info.num_points);
  std::printf("strata: ");
  for (int h = 0; h <= info.dimension; ++h) std::printf(h ? "/%d" : "%d", info.strata[h]);
  std::printf(", constrained points: %d\n", info.num_constrained);
  std::printf("reference tree: %s\n", info.reference_tree[0] ? info.reference_tree : "none");
  std::printf("cone/support duality: %s\n", info.duality_holds ? "holds" : "fails");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchically non-conformal meshes: generation, refinement and verification"};
  app.require_subcommand(1);

  int dim = 2;
  bool simplex = false, hypercube = false;
  std::string cells = "1x1", output;
  auto* generate = app.add_subcommand("generate", "Write a conformal box mesh");
  generate->add_option("--dim", dim, "Mesh dimension")->check(CLI::Range(1, 3));
  auto* simplex_flag = generate->add_flag("--simplex", simplex, "Simplicial cells");
  generate->add_flag("--hypercube", hypercube, "Tensor-product cells")->excludes(simplex_flag);
  generate->add_option("--cells", cells, "Divisions per axis, e.g. 2x3");
  generate->add_option("-o,--output", output, "Output DAG file ('-' for stdout)")->required();

  std::string input;
  int cell = 0;
  auto* refine = app.add_subcommand("refine-cell", "Refine one cell and record the hanging interface");
  refine->add_option("file", input, "Input DAG file")->required();
  refine->add_option("--cell", cell, "Cell to refine")->required();
  refine->add_option("-o,--output", output, "Output DAG file ('-' for stdout)")->required();

  std::string element = "p1", constraints = "computed", dump;
  double perturb = 0.0, tolerance = 1e-9;
  auto* verify = app.add_subcommand("verify", "Check rigid body modes against the assembled operator");
  verify->add_option("file", input, "Input DAG file")->required();
  verify->add_option("--element", element, "Element")->check(CLI::IsMember({"p1", "p2", "q1", "q2"}));
  verify->add_option("--constraints", constraints, "Constraint matrix source")
      ->check(CLI::IsMember({"computed", "identity"}));
  verify->add_option("--perturb", perturb, "Add this to the first constrained coefficient");
  verify->add_option("--tolerance", tolerance, "Relative null-space tolerance");
  verify->add_option("--dump-constraints", dump, "Write the constraint matrix as 'row col value' lines");

  std::string pattern = "corner";
  bool balance = false;
  std::string roots;
  auto* forest = app.add_subcommand("forest", "Build a quadtree/octree forest and convert it");
  forest->add_option("--dim", dim, "Forest dimension")->check(CLI::Range(2, 3));
  forest->add_option("--refine-pattern", pattern, "corner[:L] or uniform:L");
  forest->add_option("--roots", roots, "Roots per axis, e.g. 2x1 (default one root)");
  forest->add_flag("--balance", balance, "Enforce 2:1 balance before conversion");
  forest->add_option("-o,--output", output, "Output DAG file ('-' for stdout)")->required();

  std::string format = "vtk";
  auto* exporter = app.add_subcommand("export", "Export a DAG file for visualization");
  exporter->add_option("file", input, "Input DAG file")->required();
  exporter->add_option("--format", format, "Output format")->check(CLI::IsMember({"vtk"}));
  exporter->add_option("-o,--output", output, "Output file")->required();

  auto* info = app.add_subcommand("info", "Summarize a DAG file");
  info->add_option("file", input, "Input DAG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) {
      if (!simplex && !hypercube) throw CLI::ValidationError("generate", "pass --simplex or --hypercube");
      const auto counts = parse_cells(cells, dim);
      ncp_plex* p = nullptr;
      check(ncp_generate_box(dim, simplex ? 1 : 0, counts.data(), &p));
      PlexPtr plex(p);
      write_dag(plex.get(), output);
      return 0;
    }
    if (*refine) {
      auto plex = read_plex(input);
      ncp_plex* p = nullptr;
      check(ncp_refine_cell(plex.get(), cell, &p));
      PlexPtr refined(p);
      write_dag(refined.get(), output);
      return 0;
    }
    if (*verify) {
      auto plex = read_plex(input);
      ncp_verify_options options{element.c_str(),
                                 constraints == "identity" ? NCP_CONSTRAINTS_IDENTITY
                                                           : NCP_CONSTRAINTS_COMPUTED,
                                 perturb, tolerance};
      if (!dump.empty()) {
        char* text = nullptr;
        check(ncp_constraints_coo(plex.get(), &options, &text));
        std::ofstream out(dump);
        out << text;
        ncp_free_string(text);
        if (!out) {
          std::fprintf(stderr, "error: cannot write '%s'\n", dump.c_str());
          return kExitFail;
        }
      }
      ncp_verify_report report{};
      check(ncp_verify(plex.get(), &options, &report));
      std::printf("element: %s, constraints: %s\n", element.c_str(), constraints.c_str());
      std::printf("local size: %d, global size: %d, constrained dofs: %d\n", report.local_size,
                  report.global_size, report.constrained_dofs);
      std::printf("rigid body modes: %d\n", report.num_modes);
      for (int m = 0; m < report.num_modes; ++m) {
        std::printf("  mode %d residual: %.3e\n", m, report.residuals[m]);
      }
      std::printf("max residual: %.3e (tolerance %.1e)\n", report.max_residual, tolerance);
      std::printf("%s\n", report.passed ? "PASS" : "FAIL");
      return report.passed ? 0 : kExitFail;
    }
    if (*forest) {
      std::vector<int> root_counts(dim, 1);
      if (!roots.empty()) root_counts = parse_cells(roots, dim);
      ncp_forest* f = nullptr;
      check(ncp_forest_create_brick(dim, root_counts.data(), &f));
      ForestPtr fp(f);
      const auto colon = pattern.find(':');
      const std::string kind = pattern.substr(0, colon);
      int levels = 3;
      if (colon != std::string::npos) {
        try {
          levels = std::stoi(pattern.substr(colon + 1));
        } catch (const std::exception&) {
          levels = -1;
        }
      }
      if ((kind != "corner" && kind != "uniform") || levels < 0 ||
          (kind == "uniform" && colon == std::string::npos)) {
        throw CLI::ValidationError("--refine-pattern", "expected corner[:L] or uniform:L");
      }
      check(kind == "corner" ? ncp_forest_refine_corner(fp.get(), levels)
                             : ncp_forest_refine_uniform(fp.get(), levels));
      if (balance) check(ncp_forest_balance(fp.get()));
      ncp_plex* p = nullptr;
      check(ncp_forest_to_plex(fp.get(), &p));
      PlexPtr plex(p);
      write_dag(plex.get(), output);
      return 0;
    }
    if (*exporter) {
      auto plex = read_plex(input);
      check(ncp_plex_write_vtk(plex.get(), output.c_str(), nullptr, 0));
      return 0;
    }
    if (*info) return run_info(input);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const LibraryFailure& f) {
    std::fprintf(stderr, "error (%s): %s\n", ncp_status_name(f.status), ncp_last_error());
    return kExitFail;
  }
  return kExitUsage;
}
