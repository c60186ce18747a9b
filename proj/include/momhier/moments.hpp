#pragma once

#include <map>

#include "momhier/monomial.hpp"
#include "momhier/states.hpp"

namespace momhier {

// How a moment table was obtained; carried into reports.
enum class MomentProvenance { operator_trace, phase_space_quadrature };

// Expectation values of the symmetric-ordered monomials up to degree
// 2 j_max, keyed by label. The constant label (0, 0) is present: exactly
// 1 on the trace route, the measured grid mass on the quadrature route.
// All stored values are real: monomials are Hermitian, so any imaginary
// residue is a numerical artifact that is validated away.
struct MomentTable {
  HbarConfig hbar{};
  int two_j_max = 0;
  MomentProvenance provenance = MomentProvenance::operator_trace;
  std::map<MonomialIndex, double> values;

  // Throws InvalidArgument when the label is absent from the table.
  double at(MonomialIndex idx) const;
};

// Probability mass allowed above the band-safe part of the basis.
inline constexpr double kMomentTailTol = 1e-10;
// Largest imaginary residue tolerated on a Hermitian expectation value.
inline constexpr double kMomentImagTol = 1e-9;

// Trace-route moments: <T_jm> = tr(rho T_jm) for every label with
// j <= j_max. Throws CutoffTooSmall when the state keeps more than
// kMomentTailTol of its mass in the top 2 j_max basis states, where
// monomial truncation corrupts the traces; throws NumericalFailure when
// an imaginary residue exceeds kMomentImagTol.
MomentTable compute_moments(const DensityMatrix& rho, int two_j_max);

// Centered 2x2 quadrature covariance matrix assembled from a table with
// j_max >= 1: rows/cols ordered (position, momentum).
Eigen::Matrix2d quadrature_covariance(const MomentTable& moments);

}  // namespace momhier
