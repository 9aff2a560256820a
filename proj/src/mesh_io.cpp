#include "ncplex/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ncplex/reference_tree.hpp"

namespace ncplex {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.push_back(line);
      start = end + 1;
    }
    while (!lines_.empty() && lines_.back().find_first_not_of(" \t") == std::string_view::npos) {
      lines_.pop_back();
    }
  }

  int line_number() const { return static_cast<int>(next_); }
  bool done() const { return next_ >= lines_.size(); }

  std::vector<std::string_view> next_tokens(const char* what) {
    if (done()) fail("unexpected end of file, expected " + std::string(what));
    const std::string_view line = lines_[next_++];
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    return tokens;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_number(), msg);
  }

  long long to_int(std::string_view token) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("expected an integer, got '" + std::string(token) + "'");
    }
    return v;
  }

  double to_double(std::string_view token) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("expected a number, got '" + std::string(token) + "'");
    }
    return v;
  }

  void expect_keyword(const std::vector<std::string_view>& tokens, std::string_view keyword,
                      std::size_t count) const {
    if (tokens.empty() || tokens[0] != keyword) fail("expected '" + std::string(keyword) + "'");
    if (tokens.size() != count) {
      fail("'" + std::string(keyword) + "' line has " + std::to_string(tokens.size()) +
           " fields, expected " + std::to_string(count));
    }
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t next_ = 0;
};

int vtk_cell_type(CellShape shape) {
  switch (shape) {
    case CellShape::Segment: return 3;
    case CellShape::Triangle: return 5;
    case CellShape::Quadrilateral: return 9;
    case CellShape::Tetrahedron: return 10;
    case CellShape::Hexahedron: return 12;
    default: throw Error(ErrorCode::UnsupportedShape, "no VTK cell type for a vertex");
  }
}

}  // namespace

std::string write_dag(const Plex& plex) {
  std::ostringstream out;
  const int dim = plex.dimension();
  out << "plexdag 1\n";
  out << "dimension " << dim << ' ' << plex.coordinate_dimension() << '\n';
  out << "strata";
  for (int h = 0; h <= dim; ++h) out << ' ' << plex.height_stratum(h).size();
  out << '\n';
  out << "cones " << plex.num_points() << '\n';
  for (PointId p = 0; p < plex.num_points(); ++p) {
    const auto pts = plex.cone_points(p);
    const auto ors = plex.cone_orientations(p);
    out << pts.size();
    for (PointId q : pts) out << ' ' << q;
    for (Orientation o : ors) out << ' ' << o;
    out << '\n';
  }
  const Stratum verts = plex.depth_stratum(0);
  out << "coordinates " << verts.size() << '\n';
  for (PointId v = verts.begin; v < verts.end; ++v) {
    const auto x = plex.vertex_coordinates(v);
    for (std::size_t k = 0; k < x.size(); ++k) out << (k ? " " : "") << format_double(x[k]);
    out << '\n';
  }
  if (plex.has_tree_overlay()) {
    const auto constrained = plex.constrained_points();
    out << "tree " << plex.reference_tree()->name() << ' ' << constrained.size() << '\n';
    for (PointId p : constrained) {
      const auto tp = plex.tree_parent(p);
      out << p << ' ' << tp->parent << ' ' << tp->child_id << '\n';
    }
  }
  return out.str();
}

Plex read_dag(std::string_view text) {
  LineReader in(text);
  auto header = in.next_tokens("header");
  if (header.size() != 2 || header[0] != "plexdag") in.fail("missing 'plexdag' header");
  if (in.to_int(header[1]) != 1) {
    throw Error(ErrorCode::VersionMismatch,
                "unsupported plexdag version " + std::string(header[1]));
  }

  auto tokens = in.next_tokens("dimension");
  in.expect_keyword(tokens, "dimension", 3);
  const long long dim = in.to_int(tokens[1]);
  const long long coord_dim = in.to_int(tokens[2]);
  if (dim < 0 || dim > 3) in.fail("dimension must be between 0 and 3");
  if (coord_dim < 0 || coord_dim > 3) in.fail("coordinate dimension must be between 0 and 3");

  tokens = in.next_tokens("strata");
  in.expect_keyword(tokens, "strata", static_cast<std::size_t>(dim) + 2);
  std::vector<int> strata;
  long long total = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const long long s = in.to_int(tokens[i]);
    if (s < 0) in.fail("negative stratum size");
    strata.push_back(static_cast<int>(s));
    total += s;
  }

  tokens = in.next_tokens("cones");
  in.expect_keyword(tokens, "cones", 2);
  if (in.to_int(tokens[1]) != total) in.fail("cone count differs from the strata total");
  std::vector<int> cone_sizes;
  std::vector<PointId> cones;
  std::vector<Orientation> orientations;
  for (long long p = 0; p < total; ++p) {
    tokens = in.next_tokens("cone line");
    if (tokens.empty()) in.fail("empty cone line");
    const long long size = in.to_int(tokens[0]);
    if (size < 0 || tokens.size() != static_cast<std::size_t>(2 * size + 1)) {
      in.fail("cone line must hold its size, the cone points and their orientations");
    }
    cone_sizes.push_back(static_cast<int>(size));
    for (long long i = 0; i < size; ++i) {
      const long long q = in.to_int(tokens[1 + i]);
      if (q < 0 || q >= total) {
        in.fail("cone point " + std::to_string(q) + " outside the chart [0, " + std::to_string(total) + ")");
      }
      cones.push_back(static_cast<PointId>(q));
    }
    for (long long i = 0; i < size; ++i) {
      orientations.push_back(static_cast<Orientation>(in.to_int(tokens[1 + size + i])));
    }
  }

  tokens = in.next_tokens("coordinates");
  in.expect_keyword(tokens, "coordinates", 2);
  const long long nverts = in.to_int(tokens[1]);
  if (nverts != strata.back()) in.fail("coordinate count differs from the vertex stratum");
  std::vector<double> coords;
  for (long long v = 0; v < nverts; ++v) {
    tokens = in.next_tokens("vertex coordinates");
    if (tokens.size() != static_cast<std::size_t>(coord_dim)) in.fail("wrong number of coordinates");
    for (auto t : tokens) coords.push_back(in.to_double(t));
  }

  Plex plex;
  const int structure_line = in.line_number();
  try {
    plex = create_from_dag(strata, cone_sizes, cones, orientations, static_cast<int>(coord_dim), coords);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(structure_line, e.what());
  }

  if (in.done()) return plex;
  tokens = in.next_tokens("tree");
  in.expect_keyword(tokens, "tree", 3);
  const int tree_line = in.line_number();
  std::shared_ptr<const ReferenceTree> tree;
  try {
    tree = reference_tree_by_name(std::string(tokens[1]));
  } catch (const Error& e) {
    in.fail(e.what());
  }
  const long long count = in.to_int(tokens[2]);
  if (count < 0 || count > total) in.fail("bad constrained point count");
  std::vector<int> section(static_cast<std::size_t>(total), 0);
  std::vector<std::pair<PointId, std::pair<PointId, PointId>>> entries;
  for (long long i = 0; i < count; ++i) {
    tokens = in.next_tokens("tree entry");
    if (tokens.size() != 3) in.fail("tree entry must be 'point parent childID'");
    const long long p = in.to_int(tokens[0]);
    const long long q = in.to_int(tokens[1]);
    const long long c = in.to_int(tokens[2]);
    if (p < 0 || p >= total || q < 0 || q >= total) in.fail("tree entry outside the chart");
    if (section[p]) in.fail("point " + std::to_string(p) + " listed twice");
    section[p] = 1;
    entries.push_back({static_cast<PointId>(p), {static_cast<PointId>(q), static_cast<PointId>(c)}});
  }
  if (!in.done()) {
    in.next_tokens("end of file");
    in.fail("trailing content after the tree block");
  }
  std::sort(entries.begin(), entries.end());
  std::vector<PointId> parents, child_ids;
  for (const auto& [p, qc] : entries) {
    parents.push_back(qc.first);
    child_ids.push_back(qc.second);
  }
  plex.set_reference_tree(tree);
  try {
    plex.set_tree(section, parents, child_ids);
  } catch (const Error& e) {
    throw ParseError(tree_line, e.what());
  }
  return plex;
}

void write_dag_file(const Plex& plex, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << write_dag(plex);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

Plex read_dag_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_dag(buf.str());
}

std::string write_vtk(const Plex& plex, std::span<const double> point_field,
                      const std::string& field_name) {
  if (plex.dimension() < 1) throw Error(ErrorCode::UnsupportedShape, "VTK export needs cells");
  const Stratum verts = plex.depth_stratum(0);
  const Stratum cells = plex.height_stratum(0);
  if (!point_field.empty() && static_cast<PointId>(point_field.size()) != verts.size()) {
    throw Error(ErrorCode::SizeMismatch, "point field needs one value per vertex");
  }
  std::ostringstream out;
  out << "# vtk DataFile Version 2.0\n";
  out << "ncplex mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << verts.size() << " double\n";
  for (PointId v = verts.begin; v < verts.end; ++v) {
    const auto x = plex.vertex_coordinates(v);
    for (int k = 0; k < 3; ++k) {
      out << (k ? " " : "") << format_double(k < static_cast<int>(x.size()) ? x[k] : 0.0);
    }
    out << '\n';
  }
  std::vector<std::vector<PointId>> conn;
  std::size_t size = 0;
  for (PointId c = cells.begin; c < cells.end; ++c) {
    vtk_cell_type(plex.shape(c));
    conn.push_back(cell_input_vertices(plex, c));
    size += conn.back().size() + 1;
  }
  out << "CELLS " << cells.size() << ' ' << size << '\n';
  for (const auto& cv : conn) {
    out << cv.size();
    for (PointId v : cv) out << ' ' << (v - verts.begin);
    out << '\n';
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (PointId c = cells.begin; c < cells.end; ++c) out << vtk_cell_type(plex.shape(c)) << '\n';
  if (!point_field.empty()) {
    out << "POINT_DATA " << verts.size() << '\n';
    out << "SCALARS " << field_name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : point_field) out << format_double(v) << '\n';
  }
  return out.str();
}

}  // namespace ncplex
