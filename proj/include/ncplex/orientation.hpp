#pragma once

#include <span>
#include <vector>

namespace ncplex {

// Orientation of a cone entry with m vertices is an integer in [-m, m-1].
// Non-negative codes rotate the vertex sequence by `code`; a negative code is
// a reflection that starts at vertex -(code+1) and walks backwards.
using Orientation = int;

/// Applies `o` to `seq`: result[i] = seq[(i+o) mod m] for o >= 0 and
/// seq[(s-i) mod m] with s = -(o+1) otherwise.
template <class T>
std::vector<T> orient_sequence(std::span<const T> seq, Orientation o) {
  const int m = static_cast<int>(seq.size());
  std::vector<T> out(seq.size());
  if (m == 0) return out;
  for (int i = 0; i < m; ++i) {
    int k = o >= 0 ? (i + o) % m : ((-(o + 1) - i) % m + m) % m;
    out[i] = seq[k];
  }
  return out;
}

/// Index map of `o` on m entries: entry i of the oriented sequence comes from
/// position perm[i] of the original.
std::vector<int> orientation_permutation(int m, Orientation o);

/// Smallest code o (non-negative codes first) with orient_sequence(own, o) == view.
/// Throws Error(OrientationUnsupported) when `view` is not a dihedral image of `own`.
Orientation orientation_between(std::span<const int> own, std::span<const int> view);

/// Code o' such that applying o then o' yields the identity on m entries.
Orientation invert_orientation(int m, Orientation o);

/// Code equivalent to applying `first` and then `second`.
Orientation compose_orientations(int m, Orientation first, Orientation second);

/// True when the code reverses a two-vertex sequence.
inline bool reverses_segment(Orientation o) { return o == 1 || o == -2; }

}  // namespace ncplex
