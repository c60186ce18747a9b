#pragma once

#include <compare>
#include <string>
#include <vector>

namespace momhier {

// Label (j, m) of a symmetric-ordered monomial of degree 2j in the two
// quadratures, with j + m powers of position and j - m powers of momentum.
// Stored doubled (two_j = 2j, two_m = 2m) so half-integer bookkeeping is
// exact integer arithmetic. The default comparison gives a deterministic
// (two_j, two_m)-lexicographic order used by moment-table storage.
struct MonomialIndex {
  int two_j = 0;
  int two_m = 0;
  friend constexpr auto operator<=>(const MonomialIndex&,
                                    const MonomialIndex&) = default;
};

// Valid labels satisfy |m| <= j and j - m integer.
constexpr bool valid_index(MonomialIndex idx) {
  return idx.two_j >= 0 && idx.two_m <= idx.two_j && -idx.two_m <= idx.two_j &&
         (idx.two_j - idx.two_m) % 2 == 0;
}

// Throws InvalidArgument when the label is out of range.
void require_valid(MonomialIndex idx);

// "(j, m)" with halves rendered exactly, e.g. "(3/2, -1/2)".
std::string to_string(MonomialIndex idx);

// Side length J(2J + 3) of the order-J moment matrix.
int hierarchy_side(int two_J);

// Row labels of the order-J moment matrix: j = 1/2, 1, ..., J ascending,
// and m = j, j - 1, ..., -j descending within each j.
std::vector<MonomialIndex> hierarchy_indices(int two_J);

// hierarchy_indices(two_j_max) preceded by the constant label (0, 0).
std::vector<MonomialIndex> moment_indices(int two_j_max);

}  // namespace momhier
