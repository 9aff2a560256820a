#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "ncplex/forest.hpp"
#include "ncplex/mesh_io.hpp"
#include "ncplex/ncplex.h"
#include "ncplex/refine.hpp"
#include "ncplex/reference_tree.hpp"
#include "ncplex/verify.hpp"

struct ncp_plex {
  ncplex::Plex plex;
};

struct ncp_forest {
  ncplex::Forest forest;
};

namespace {

thread_local std::string g_last_error;

ncp_status fail(ncp_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class F>
ncp_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NCP_OK;
  } catch (const ncplex::Error& e) {
    return fail(static_cast<ncp_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NCP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NCP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NCP_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw ncplex::Error(ncplex::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T>
void copy_out(const T& values, int* dst, int capacity, int* size) {
  require(size, "size");
  *size = static_cast<int>(values.size());
  if (capacity > 0) require(dst, "output buffer");
  const int n = std::min(capacity, *size);
  for (int i = 0; i < n; ++i) dst[i] = values[i];
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ncplex::Error(ncplex::ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ncplex::Error(ncplex::ErrorCode::IoError, "failed writing '" + path + "'");
}

ncplex::VerifyOptions to_options(const ncp_verify_options* options) {
  require(options, "options");
  require(options->element, "options->element");
  ncplex::VerifyOptions o;
  o.element = options->element;
  if (options->constraints != NCP_CONSTRAINTS_COMPUTED &&
      options->constraints != NCP_CONSTRAINTS_IDENTITY) {
    throw ncplex::Error(ncplex::ErrorCode::InvalidArgument, "unknown constraint source");
  }
  o.constraints = options->constraints == NCP_CONSTRAINTS_IDENTITY
                      ? ncplex::ConstraintSource::Identity
                      : ncplex::ConstraintSource::Computed;
  o.perturb = options->perturb;
  if (options->tolerance > 0.0) o.tolerance = options->tolerance;
  return o;
}

}  // namespace

extern "C" {

const char* ncp_last_error(void) { return g_last_error.c_str(); }

const char* ncp_status_name(ncp_status status) {
  if (status == NCP_OK) return "OK";
  if (status == NCP_ERR_INTERNAL) return "Internal";
  return ncplex::error_code_name(static_cast<ncplex::ErrorCode>(static_cast<int>(status)));
}

void ncp_free_string(char* s) { std::free(s); }

ncp_status ncp_plex_create_from_dag(int num_strata, const int* stratum_sizes, const int* cone_sizes,
                                    const int* cones, const int* orientations, int coord_dim,
                                    const double* vertex_coords, ncp_plex** out) {
  return guarded([&] {
    require(out, "out");
    require(stratum_sizes, "stratum_sizes");
    if (num_strata < 1 || num_strata > 4) {
      throw ncplex::Error(ncplex::ErrorCode::BadDimension, "num_strata must be 1 to 4");
    }
    std::size_t npoints = 0;
    for (int i = 0; i < num_strata; ++i) npoints += static_cast<std::size_t>(std::max(stratum_sizes[i], 0));
    if (npoints > 0) require(cone_sizes, "cone_sizes");
    std::size_t ncone = 0;
    for (std::size_t p = 0; p < npoints; ++p) ncone += static_cast<std::size_t>(std::max(cone_sizes[p], 0));
    if (ncone > 0) {
      require(cones, "cones");
      require(orientations, "orientations");
    }
    const std::size_t nverts = static_cast<std::size_t>(std::max(stratum_sizes[num_strata - 1], 0));
    const std::size_t ncoords = nverts * static_cast<std::size_t>(std::max(coord_dim, 0));
    if (ncoords > 0) require(vertex_coords, "vertex_coords");
    auto plex = ncplex::create_from_dag(
        std::span<const int>(stratum_sizes, num_strata), std::span<const int>(cone_sizes, npoints),
        std::span<const int>(cones, ncone), std::span<const int>(orientations, ncone), coord_dim,
        std::span<const double>(vertex_coords, ncoords));
    *out = new ncp_plex{std::move(plex)};
  });
}

void ncp_plex_destroy(ncp_plex* plex) { delete plex; }

ncp_status ncp_plex_read_dag(const char* path, ncp_plex** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ncp_plex{ncplex::read_dag_file(path)};
  });
}

ncp_status ncp_plex_read_dag_string(const char* text, ncp_plex** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ncp_plex{ncplex::read_dag(text)};
  });
}

ncp_status ncp_plex_write_dag(const ncp_plex* plex, const char* path) {
  return guarded([&] {
    require(plex, "plex");
    require(path, "path");
    ncplex::write_dag_file(plex->plex, path);
  });
}

ncp_status ncp_plex_dag_string(const ncp_plex* plex, char** out) {
  return guarded([&] {
    require(plex, "plex");
    require(out, "out");
    *out = copy_string(ncplex::write_dag(plex->plex));
  });
}

ncp_status ncp_plex_write_vtk(const ncp_plex* plex, const char* path, const double* field,
                              size_t field_size) {
  return guarded([&] {
    require(plex, "plex");
    require(path, "path");
    if (field_size > 0) require(field, "field");
    write_text(path, ncplex::write_vtk(plex->plex, std::span<const double>(field, field ? field_size : 0)));
  });
}

ncp_status ncp_plex_dimension(const ncp_plex* plex, int* dim) {
  return guarded([&] {
    require(plex, "plex");
    require(dim, "dim");
    *dim = plex->plex.dimension();
  });
}

ncp_status ncp_plex_num_points(const ncp_plex* plex, int* n) {
  return guarded([&] {
    require(plex, "plex");
    require(n, "n");
    *n = plex->plex.num_points();
  });
}

ncp_status ncp_plex_height_stratum(const ncp_plex* plex, int height, int* begin, int* end) {
  return guarded([&] {
    require(plex, "plex");
    require(begin, "begin");
    require(end, "end");
    const auto s = plex->plex.height_stratum(height);
    *begin = s.begin;
    *end = s.end;
  });
}

ncp_status ncp_plex_depth_stratum(const ncp_plex* plex, int depth, int* begin, int* end) {
  return guarded([&] {
    require(plex, "plex");
    require(begin, "begin");
    require(end, "end");
    const auto s = plex->plex.depth_stratum(depth);
    *begin = s.begin;
    *end = s.end;
  });
}

ncp_status ncp_plex_cone(const ncp_plex* plex, int point, int* points, int* orientations,
                         int capacity, int* size) {
  return guarded([&] {
    require(plex, "plex");
    const auto pts = plex->plex.cone_points(point);
    const auto ors = plex->plex.cone_orientations(point);
    copy_out(pts, points, capacity, size);
    if (orientations) copy_out(ors, orientations, capacity, size);
  });
}

ncp_status ncp_plex_support(const ncp_plex* plex, int point, int* points, int capacity, int* size) {
  return guarded([&] {
    require(plex, "plex");
    copy_out(plex->plex.support(point), points, capacity, size);
  });
}

ncp_status ncp_plex_closure(const ncp_plex* plex, int point, int* points, int* orientations,
                            int capacity, int* size) {
  return guarded([&] {
    require(plex, "plex");
    const auto closure = plex->plex.closure(point);
    std::vector<int> pts, ors;
    for (const auto& e : closure) {
      pts.push_back(e.point);
      ors.push_back(e.orientation);
    }
    copy_out(pts, points, capacity, size);
    if (orientations) copy_out(ors, orientations, capacity, size);
  });
}

ncp_status ncp_plex_set_tree(ncp_plex* plex, const char* reference_tree, const int* parent_section,
                             const int* parents, const int* child_ids, int num_constrained) {
  return guarded([&] {
    require(plex, "plex");
    require(reference_tree, "reference_tree");
    require(parent_section, "parent_section");
    if (num_constrained < 0) {
      throw ncplex::Error(ncplex::ErrorCode::SizeMismatch, "negative constrained count");
    }
    if (num_constrained > 0) {
      require(parents, "parents");
      require(child_ids, "child_ids");
    }
    auto& p = plex->plex;
    ncplex::Plex updated = p;
    updated.set_reference_tree(ncplex::reference_tree_by_name(reference_tree));
    updated.set_tree(std::span<const int>(parent_section, p.num_points()),
                     std::span<const int>(parents, num_constrained),
                     std::span<const int>(child_ids, num_constrained));
    p = std::move(updated);
  });
}

ncp_status ncp_plex_tree_parent(const ncp_plex* plex, int point, int* parent, int* child_id) {
  return guarded([&] {
    require(plex, "plex");
    require(parent, "parent");
    const auto tp = plex->plex.tree_parent(point);
    *parent = tp ? tp->parent : -1;
    if (child_id) *child_id = tp ? tp->child_id : -1;
  });
}

ncp_status ncp_plex_tree_children(const ncp_plex* plex, int point, int* points, int capacity,
                                  int* size) {
  return guarded([&] {
    require(plex, "plex");
    copy_out(plex->plex.tree_children(point), points, capacity, size);
  });
}

ncp_status ncp_plex_anchors(const ncp_plex* plex, int point, int* points, int capacity, int* size) {
  return guarded([&] {
    require(plex, "plex");
    copy_out(plex->plex.anchors(point), points, capacity, size);
  });
}

ncp_status ncp_plex_get_info(const ncp_plex* plex, ncp_plex_info* info) {
  return guarded([&] {
    require(plex, "plex");
    require(info, "info");
    const auto& p = plex->plex;
    std::memset(info, 0, sizeof *info);
    info->dimension = p.dimension();
    info->coordinate_dimension = p.coordinate_dimension();
    info->num_points = p.num_points();
    for (int h = 0; h <= p.dimension(); ++h) info->strata[h] = p.height_stratum(h).size();
    info->num_constrained = p.num_constrained_points();
    info->duality_holds = ncplex::check_cone_support_duality(p) ? 1 : 0;
    if (p.reference_tree()) {
      std::strncpy(info->reference_tree, p.reference_tree()->name().c_str(),
                   sizeof info->reference_tree - 1);
    }
  });
}

ncp_status ncp_generate_box(int dim, int simplex, const int* cells, ncp_plex** out) {
  return guarded([&] {
    require(cells, "cells");
    require(out, "out");
    if (dim < 1 || dim > 3) throw ncplex::Error(ncplex::ErrorCode::BadDimension, "dim must be 1, 2 or 3");
    *out = new ncp_plex{ncplex::generate_box(dim, simplex != 0, std::span<const int>(cells, dim))};
  });
}

ncp_status ncp_refine_cell(const ncp_plex* plex, int cell, ncp_plex** out) {
  return guarded([&] {
    require(plex, "plex");
    require(out, "out");
    *out = new ncp_plex{ncplex::refine_cell(plex->plex, cell)};
  });
}

ncp_status ncp_forest_create_brick(int dim, const int* roots_per_axis, ncp_forest** out) {
  return guarded([&] {
    require(roots_per_axis, "roots_per_axis");
    require(out, "out");
    if (dim != 2 && dim != 3) throw ncplex::Error(ncplex::ErrorCode::BadDimension, "dim must be 2 or 3");
    *out = new ncp_forest{ncplex::Forest::brick(dim, std::span<const int>(roots_per_axis, dim))};
  });
}

void ncp_forest_destroy(ncp_forest* forest) { delete forest; }

ncp_status ncp_forest_refine(ncp_forest* forest, ncp_refine_predicate predicate, void* context) {
  return guarded([&] {
    require(forest, "forest");
    require(reinterpret_cast<const void*>(predicate), "predicate");
    forest->forest = forest->forest.refine([&](int root, int level, ncplex::Morton m) {
      return predicate(root, level, static_cast<uint64_t>(m), static_cast<uint64_t>(m >> 64),
                       context) != 0;
    });
  });
}

ncp_status ncp_forest_refine_uniform(ncp_forest* forest, int level) {
  return guarded([&] {
    require(forest, "forest");
    if (level < 0 || level > ncplex::Forest::kMaxLevel) {
      throw ncplex::Error(ncplex::ErrorCode::LevelOverflow, "level out of range");
    }
    for (int l = 0; l < level; ++l) {
      forest->forest = forest->forest.refine([&](int, int lv, ncplex::Morton) { return lv < level; });
    }
  });
}

ncp_status ncp_forest_refine_corner(ncp_forest* forest, int levels) {
  return guarded([&] {
    require(forest, "forest");
    if (levels < 0) throw ncplex::Error(ncplex::ErrorCode::InvalidArgument, "negative level count");
    // The leaf with Morton index 0 in root 0 is always the origin corner.
    for (int l = 0; l < levels; ++l) {
      forest->forest =
          forest->forest.refine([](int root, int, ncplex::Morton m) { return root == 0 && m == 0; });
    }
  });
}

ncp_status ncp_forest_balance(ncp_forest* forest) {
  return guarded([&] {
    require(forest, "forest");
    forest->forest = forest->forest.balance_2to1();
  });
}

ncp_status ncp_forest_num_leaves(const ncp_forest* forest, int* n) {
  return guarded([&] {
    require(forest, "forest");
    require(n, "n");
    *n = forest->forest.num_leaves();
  });
}

ncp_status ncp_forest_is_balanced(const ncp_forest* forest, int* balanced) {
  return guarded([&] {
    require(forest, "forest");
    require(balanced, "balanced");
    *balanced = forest->forest.is_balanced() ? 1 : 0;
  });
}

ncp_status ncp_forest_to_plex(const ncp_forest* forest, ncp_plex** out) {
  return guarded([&] {
    require(forest, "forest");
    require(out, "out");
    *out = new ncp_plex{ncplex::convert_to_plex(forest->forest)};
  });
}

ncp_status ncp_verify(const ncp_plex* plex, const ncp_verify_options* options,
                      ncp_verify_report* report) {
  return guarded([&] {
    require(plex, "plex");
    require(report, "report");
    const auto r = ncplex::verify_rigid_body_null_space(plex->plex, to_options(options));
    std::memset(report, 0, sizeof *report);
    report->local_size = r.local_size;
    report->global_size = r.global_size;
    report->constrained_dofs = r.constrained_dofs;
    report->num_modes = static_cast<int>(r.residuals.size());
    for (std::size_t i = 0; i < r.residuals.size() && i < 6; ++i) report->residuals[i] = r.residuals[i];
    report->max_residual = r.max_residual;
    report->passed = r.passed ? 1 : 0;
  });
}

ncp_status ncp_constraints_coo(const ncp_plex* plex, const ncp_verify_options* options, char** out) {
  return guarded([&] {
    require(plex, "plex");
    require(out, "out");
    std::ostringstream s;
    ncplex::verification_constraints(plex->plex, to_options(options)).write_coo(s);
    *out = copy_string(s.str());
  });
}

}  // extern "C"
