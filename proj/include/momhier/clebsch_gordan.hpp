#pragma once

namespace momhier {

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J (m1 + m2)> in the
// Condon-Shortley phase convention: the top coefficient
// <j1 j1; j2 (J - j1) | J J> of every multiplet is positive and all
// coefficients are real. Arguments are doubled (two_j = 2j) so
// half-integer spins are exact.
//
// Selection-rule violations (triangle inequality, |m| > j, non-integer
// perimeter, mismatched j/m parity) return 0 rather than throwing, so the
// coefficient can be used directly as the weight in product expansions.
//
// The combinatorics run in exact rational arithmetic; the single rounding
// step is the final square root, so results are correctly rounded to a
// few ulps even when intermediate factorials overflow double range.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_J);

}  // namespace momhier
