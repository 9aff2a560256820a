#include "ncplex/orientation.hpp"

#include <numeric>

#include "ncplex/error.hpp"

namespace ncplex {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::DepthViolation: return "DepthViolation";
    case ErrorCode::DanglingPoint: return "DanglingPoint";
    case ErrorCode::BadStratum: return "BadStratum";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::NoReferenceTree: return "NoReferenceTree";
    case ErrorCode::BadChildID: return "BadChildID";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::NotConstrained: return "NotConstrained";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::NotAChild: return "NotAChild";
    case ErrorCode::PointOutsideCell: return "PointOutsideCell";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::OrientationUnsupported: return "OrientationUnsupported";
    case ErrorCode::InconsistentChildID: return "InconsistentChildID";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BadCell: return "BadCell";
    case ErrorCode::BadMode: return "BadMode";
    case ErrorCode::SparsityViolation: return "SparsityViolation";
    case ErrorCode::BadField: return "BadField";
    case ErrorCode::LevelOverflow: return "LevelOverflow";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::AlreadyTreed: return "AlreadyTreed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::vector<int> orientation_permutation(int m, Orientation o) {
  if (m > 0 && (o < -m || o >= m)) {
    throw Error(ErrorCode::InvalidArgument, "orientation " + std::to_string(o) +
                                                " out of range for " + std::to_string(m) +
                                                " vertices");
  }
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  return orient_sequence<int>(idx, o);
}

Orientation orientation_between(std::span<const int> own, std::span<const int> view) {
  const int m = static_cast<int>(own.size());
  if (static_cast<int>(view.size()) != m) {
    throw Error(ErrorCode::OrientationUnsupported, "sequence length mismatch");
  }
  if (m == 0) return 0;
  for (int o = 0; o < m; ++o) {
    if (orient_sequence(own, o) == std::vector<int>(view.begin(), view.end())) return o;
  }
  for (int o = -1; o >= -m; --o) {
    if (orient_sequence(own, o) == std::vector<int>(view.begin(), view.end())) return o;
  }
  throw Error(ErrorCode::OrientationUnsupported, "vertex sequence is not a dihedral image");
}

Orientation invert_orientation(int m, Orientation o) {
  const auto perm = orientation_permutation(m, o);
  std::vector<int> inv(m);
  for (int i = 0; i < m; ++i) inv[perm[i]] = i;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  return orientation_between(idx, inv);
}

Orientation compose_orientations(int m, Orientation first, Orientation second) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  const auto a = orient_sequence<int>(idx, first);
  const auto b = orient_sequence<int>(a, second);
  return orientation_between(idx, b);
}

}  // namespace ncplex
