#include "momhier/product_rule.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

#include "momhier/clebsch_gordan.hpp"
#include "momhier/errors.hpp"

namespace momhier {

namespace {

// Exact double factorials; arguments stay below 2j_a + 2j_b + 1 quanta,
// far inside the 2^53 integer range.
double dfact(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// i^s for integer s >= 0.
std::complex<double> i_power(int s) {
  static constexpr std::array<std::complex<double>, 4> cycle{
      std::complex<double>{1.0, 0.0}, std::complex<double>{0.0, 1.0},
      std::complex<double>{-1.0, 0.0}, std::complex<double>{0.0, -1.0}};
  return cycle[static_cast<std::size_t>(s % 4)];
}

}  // namespace

PolynomialExpansion tau_product_expansion(MonomialIndex a, MonomialIndex b,
                                          HbarConfig hbar) {
  require_valid(a);
  require_valid(b);
  const int two_mpp = a.two_m + b.two_m;
  const double half_hbar = hbar.value() / 2.0;

  PolynomialExpansion out;
  for (int two_jpp = std::abs(a.two_j - b.two_j);
       two_jpp <= a.two_j + b.two_j; two_jpp += 2) {
    if (std::abs(two_mpp) > two_jpp) continue;
    const double cg = clebsch_gordan(a.two_j, a.two_m, b.two_j, b.two_m,
                                     two_jpp);
    if (cg == 0.0) continue;

    // Degree drop of this term; the prefactor is (i hbar / 2)^drop.
    const int drop = (a.two_j + b.two_j - two_jpp) / 2;

    // Weight from converting between the unit-normalized ladder basis
    // (where the coupling is a bare Clebsch-Gordan series) and the
    // monomial normalization with its (j + m)! (j - m)! denominators.
    const double mono = dfact((a.two_j + a.two_m) / 2) *
                        dfact((a.two_j - a.two_m) / 2) *
                        dfact((b.two_j + b.two_m) / 2) *
                        dfact((b.two_j - b.two_m) / 2) /
                        (dfact((two_jpp + two_mpp) / 2) *
                         dfact((two_jpp - two_mpp) / 2));
    const double couple =
        dfact((a.two_j + b.two_j + two_jpp) / 2 + 1) /
        (static_cast<double>(two_jpp + 1) *
         dfact((a.two_j + b.two_j - two_jpp) / 2) *
         dfact((b.two_j + two_jpp - a.two_j) / 2) *
         dfact((two_jpp + a.two_j - b.two_j) / 2));

    const std::complex<double> coeff = i_power(drop) *
                                       std::pow(half_hbar, drop) *
                                       std::sqrt(mono * couple) * cg;
    out.emplace(MonomialIndex{two_jpp, two_mpp}, coeff);
  }
  return out;
}

}  // namespace momhier
