#pragma once

#include <complex>
#include <map>

#include "momhier/fock.hpp"
#include "momhier/monomial.hpp"

namespace momhier {

// Finite expansion of an operator in the symmetric-ordered monomial
// basis: the operator equals the sum of coefficient * monomial over the
// stored labels. Absent labels carry coefficient zero. std::map keeps a
// deterministic (j, m)-lexicographic term order for evaluation.
using PolynomialExpansion = std::map<MonomialIndex, std::complex<double>>;

// Expansion of the product of two symmetric-ordered monomials. The
// product of monomials with labels (ja, ma) and (jb, mb) is again a
// polynomial, supported on labels (j'', ma + mb) with j'' running from
// |ja - jb| to ja + jb in integer steps; labels with |ma + mb| > j''
// do not occur and are omitted, as are exact zeros.
//
// Structure guarantees: the top coefficient at j'' = ja + jb is exactly 1;
// coefficients with ja + jb - j'' even are real and those with it odd are
// purely imaginary (each carries i^(ja+jb-j'') times a real weight); and
// hbar enters only through the factor (hbar/2)^(ja+jb-j'').
PolynomialExpansion tau_product_expansion(MonomialIndex a, MonomialIndex b,
                                          HbarConfig hbar = {});

}  // namespace momhier
