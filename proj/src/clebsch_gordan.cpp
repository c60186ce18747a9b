#include "momhier/clebsch_gordan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include <boost/multiprecision/cpp_int.hpp>

namespace momhier {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Cached n! for the arguments that occur at the supported spin range;
// larger arguments are computed on the fly. The table is initialized once
// under the magic-static guard, so concurrent readers are safe.
const cpp_int& factorial(int n) {
  constexpr int kCached = 128;
  static const auto table = [] {
    std::array<cpp_int, kCached + 1> t;
    t[0] = 1;
    for (int k = 1; k <= kCached; ++k) t[k] = t[k - 1] * k;
    return t;
  }();
  if (n <= kCached) return table[static_cast<std::size_t>(n)];
  thread_local cpp_int big;
  big = table[kCached];
  for (int k = kCached + 1; k <= n; ++k) big *= k;
  return big;
}

}  // namespace

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_J) {
  const int two_M = two_m1 + two_m2;
  if (two_j1 < 0 || two_j2 < 0 || two_J < 0) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 ||
      std::abs(two_M) > two_J) {
    return 0.0;
  }
  // j and m must both be integers or both half-odd-integers.
  if ((two_j1 - two_m1) % 2 != 0 || (two_j2 - two_m2) % 2 != 0 ||
      (two_J - two_M) % 2 != 0) {
    return 0.0;
  }
  // j1 + j2 + J must be an integer satisfying the triangle inequality.
  if ((two_j1 + two_j2 + two_J) % 2 != 0) return 0.0;
  if (two_J < std::abs(two_j1 - two_j2) || two_J > two_j1 + two_j2) return 0.0;

  // Integer factorial arguments; nonnegative by the checks above.
  const int j1j2_J = (two_j1 + two_j2 - two_J) / 2;
  const int j1_j2J = (two_j1 - two_j2 + two_J) / 2;
  const int _j1j2J = (-two_j1 + two_j2 + two_J) / 2;
  const int perim = (two_j1 + two_j2 + two_J) / 2 + 1;
  const int j1pm = (two_j1 + two_m1) / 2;
  const int j1mm = (two_j1 - two_m1) / 2;
  const int j2pm = (two_j2 + two_m2) / 2;
  const int j2mm = (two_j2 - two_m2) / 2;
  const int JpM = (two_J + two_M) / 2;
  const int JmM = (two_J - two_M) / 2;

  // Offsets of the two k-dependent factorials that can start negative.
  const int t1 = (two_J - two_j2 + two_m1) / 2;
  const int t2 = (two_J - two_j1 - two_m2) / 2;
  const int k_lo = std::max({0, -t1, -t2});
  const int k_hi = std::min({j1j2_J, j1mm, j2pm});
  if (k_lo > k_hi) return 0.0;

  cpp_rational sum = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    cpp_rational term(1);
    term /= factorial(k);
    term /= factorial(j1j2_J - k);
    term /= factorial(j1mm - k);
    term /= factorial(j2pm - k);
    term /= factorial(t1 + k);
    term /= factorial(t2 + k);
    if (k % 2 != 0) term = -term;
    sum += term;
  }
  if (sum == 0) return 0.0;

  cpp_rational norm(two_J + 1);
  norm *= factorial(j1j2_J);
  norm *= factorial(j1_j2J);
  norm *= factorial(_j1j2J);
  norm /= factorial(perim);
  norm *= factorial(JpM);
  norm *= factorial(JmM);
  norm *= factorial(j1pm);
  norm *= factorial(j1mm);
  norm *= factorial(j2pm);
  norm *= factorial(j2mm);

  // |C|^2 = sum^2 * norm exactly; one sqrt rounding at the end.
  const cpp_rational square = sum * sum * norm;
  const double magnitude = std::sqrt(square.convert_to<double>());
  return sum < 0 ? -magnitude : magnitude;
}

}  // namespace momhier
