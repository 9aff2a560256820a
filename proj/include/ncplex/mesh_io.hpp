#pragma once

#include <span>
#include <string>
#include <string_view>

#include "ncplex/plex.hpp"

namespace ncplex {

/// Text DAG format:
///
///   plexdag 1
///   dimension <topological> <coordinate>
///   strata <count at height 0> ... <count at height dim>
///   cones <num points>
///   <cone size> <cone points...> <orientations...>     one line per point
///   coordinates <num vertices>
///   <x> [<y> [<z>]]                                      one line per vertex
///   tree <reference tree name> <num constrained>          optional
///   <point> <parent> <childID>                            one line each
///
/// Coordinates are printed with 17 significant digits. The tree block is
/// written only when the overlay is non-empty.
std::string write_dag(const Plex& plex);

/// Throws ParseError (with line number) on malformed text and
/// VersionMismatch on an unknown format version.
Plex read_dag(std::string_view text);

void write_dag_file(const Plex& plex, const std::string& path);
Plex read_dag_file(const std::string& path);

/// Legacy ASCII VTK unstructured grid. Cells use their input vertex order,
/// which is the VTK order for every supported shape. `point_field`, when
/// non-empty, holds one scalar per vertex.
std::string write_vtk(const Plex& plex, std::span<const double> point_field = {},
                      const std::string& field_name = "field");

}  // namespace ncplex
