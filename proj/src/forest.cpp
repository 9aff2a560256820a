#include "ncplex/forest.hpp"

#include <algorithm>
#include <map>

#include "ncplex/refine.hpp"

namespace ncplex {

Forest::Forest(int dim, std::vector<std::array<int, 3>> root_origins)
    : dim_(dim), roots_(std::move(root_origins)) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::BadDimension, "forests are 2D or 3D");
  if (roots_.empty()) throw Error(ErrorCode::InvalidArgument, "forest needs at least one root");
  for (auto& r : roots_) {
    if (dim == 2) r[2] = 0;
  }
  auto sorted = roots_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate root origin");
  }
  for (int r = 0; r < num_roots(); ++r) leaves_.push_back(Quadrant{r, 0, {0, 0, 0}});
}

Forest Forest::brick(int dim, std::span<const int> roots_per_axis) {
  if (static_cast<int>(roots_per_axis.size()) != dim) {
    throw Error(ErrorCode::SizeMismatch, "need one root count per dimension");
  }
  std::array<int, 3> n{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    if (roots_per_axis[k] < 1) throw Error(ErrorCode::InvalidArgument, "root counts must be positive");
    n[k] = roots_per_axis[k];
  }
  std::vector<std::array<int, 3>> origins;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) origins.push_back({i, j, k});
    }
  }
  return Forest(dim, std::move(origins));
}

Morton Forest::morton(const Quadrant& q) const {
  Morton m = 0;
  for (int bit = 0; bit < kMaxLevel; ++bit) {
    for (int k = 0; k < dim_; ++k) {
      if ((q.anchor[k] >> bit) & 1u) m |= Morton{1} << (bit * dim_ + k);
    }
  }
  return m;
}

void Forest::sort_leaves() {
  std::sort(leaves_.begin(), leaves_.end(), [this](const Quadrant& a, const Quadrant& b) {
    if (a.root != b.root) return a.root < b.root;
    return morton(a) < morton(b);
  });
}

Forest Forest::refine(const std::function<bool(int, int, Morton)>& pred) const {
  Forest out;
  out.dim_ = dim_;
  out.roots_ = roots_;
  for (const auto& q : leaves_) {
    if (!pred(q.root, q.level, morton(q))) {
      out.leaves_.push_back(q);
      continue;
    }
    if (q.level >= kMaxLevel) {
      throw Error(ErrorCode::LevelOverflow, "cannot refine beyond level " + std::to_string(kMaxLevel));
    }
    const auto h = static_cast<std::uint32_t>(side(q.level + 1));
    for (int c = 0; c < (1 << dim_); ++c) {
      Quadrant child{q.root, q.level + 1, q.anchor};
      for (int k = 0; k < dim_; ++k) {
        if ((c >> k) & 1) child.anchor[k] += h;
      }
      out.leaves_.push_back(child);
    }
  }
  out.sort_leaves();
  return out;
}

std::array<std::int64_t, 3> Forest::global_anchor(const Quadrant& q) const {
  std::array<std::int64_t, 3> g{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    g[k] = static_cast<std::int64_t>(roots_[q.root][k]) * side(0) + q.anchor[k];
  }
  return g;
}

bool Forest::adjacent(const Quadrant& a, const Quadrant& b) const {
  const auto ga = global_anchor(a), gb = global_anchor(b);
  const std::int64_t sa = side(a.level), sb = side(b.level);
  int positive = 0;
  for (int k = 0; k < dim_; ++k) {
    const std::int64_t overlap = std::min(ga[k] + sa, gb[k] + sb) - std::max(ga[k], gb[k]);
    if (overlap < 0) return false;
    if (overlap > 0) ++positive;
  }
  return positive >= 1 && positive < dim_;
}

bool Forest::is_balanced() const {
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves_.size(); ++j) {
      if (std::abs(leaves_[i].level - leaves_[j].level) > 1 && adjacent(leaves_[i], leaves_[j])) {
        return false;
      }
    }
  }
  return true;
}

Forest Forest::balance_2to1() const {
  Forest current = *this;
  for (;;) {
    const auto& leaves = current.leaves_;
    std::vector<char> flag(leaves.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (std::size_t j = 0; j < leaves.size(); ++j) {
        if (leaves[j].level < leaves[i].level - 1 && current.adjacent(leaves[i], leaves[j])) {
          flag[j] = 1;
          any = true;
        }
      }
    }
    if (!any) return current;
    std::map<std::pair<int, Morton>, char> marked;
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      if (flag[j]) marked[{leaves[j].root, current.morton(leaves[j])}] = 1;
    }
    current = current.refine([&](int root, int, Morton m) { return marked.count({root, m}) > 0; });
  }
}

Plex convert_to_plex(const Forest& forest) {
  if (!forest.is_balanced()) throw Error(ErrorCode::Unbalanced, "forest is not 2:1 balanced");
  const int dim = forest.dimension();
  std::map<std::array<std::int64_t, 3>, int> vertex_ids;
  std::vector<double> coords;
  std::vector<int> conn;
  const double unit = 1.0 / static_cast<double>(Forest::side(0));
  auto vertex = [&](const std::array<std::int64_t, 3>& key) {
    auto [it, inserted] = vertex_ids.emplace(key, static_cast<int>(vertex_ids.size()));
    if (inserted) {
      for (int k = 0; k < dim; ++k) coords.push_back(static_cast<double>(key[k]) * unit);
    }
    return it->second;
  };
  static constexpr int kQuad[] = {0, 1, 3, 2};
  static constexpr int kHex[] = {0, 1, 3, 2, 4, 5, 7, 6};
  for (const auto& q : forest.leaves()) {
    const auto g = forest.global_anchor(q);
    const std::int64_t s = Forest::side(q.level);
    const int n = dim == 2 ? 4 : 8;
    for (int c = 0; c < n; ++c) {
      const int bits = dim == 2 ? kQuad[c] : kHex[c];
      std::array<std::int64_t, 3> key = g;
      for (int k = 0; k < dim; ++k) {
        if ((bits >> k) & 1) key[k] += s;
      }
      conn.push_back(vertex(key));
    }
  }
  Plex plex = create_from_cell_list(dim == 2 ? CellShape::Quadrilateral : CellShape::Hexahedron,
                                    conn, dim, coords);
  build_tree_from_geometry(plex, create_default_reference_tree(dim, false));
  return plex;
}

}  // namespace ncplex
