#include "momhier/monomial.hpp"

#include "momhier/errors.hpp"

namespace momhier {

void require_valid(MonomialIndex idx) {
  if (!valid_index(idx)) {
    throw InvalidArgument("invalid monomial label " + to_string(idx));
  }
}

namespace {

std::string half_to_string(int doubled) {
  if (doubled % 2 == 0) return std::to_string(doubled / 2);
  return std::to_string(doubled) + "/2";
}

}  // namespace

std::string to_string(MonomialIndex idx) {
  return "(" + half_to_string(idx.two_j) + ", " + half_to_string(idx.two_m) +
         ")";
}

int hierarchy_side(int two_J) {
  if (two_J < 1) throw InvalidArgument("moment-matrix order must be >= 1/2");
  // J(2J + 3) with J = two_J / 2; the product two_J * (two_J + 3) is even.
  return two_J * (two_J + 3) / 2;
}

std::vector<MonomialIndex> hierarchy_indices(int two_J) {
  std::vector<MonomialIndex> out;
  out.reserve(static_cast<std::size_t>(hierarchy_side(two_J)));
  for (int two_j = 1; two_j <= two_J; ++two_j) {
    for (int two_m = two_j; two_m >= -two_j; two_m -= 2) {
      out.push_back({two_j, two_m});
    }
  }
  return out;
}

std::vector<MonomialIndex> moment_indices(int two_j_max) {
  std::vector<MonomialIndex> out{{0, 0}};
  if (two_j_max >= 1) {
    auto tail = hierarchy_indices(two_j_max);
    out.insert(out.end(), tail.begin(), tail.end());
  }
  return out;
}

}  // namespace momhier
