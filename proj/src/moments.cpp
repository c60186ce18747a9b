#include "momhier/moments.hpp"

#include <cmath>
#include <string>

#include "momhier/errors.hpp"

namespace momhier {

double MomentTable::at(MonomialIndex idx) const {
  const auto it = values.find(idx);
  if (it == values.end()) {
    throw InvalidArgument("moment table has no entry for label " +
                          to_string(idx));
  }
  return it->second;
}

MomentTable compute_moments(const DensityMatrix& rho, int two_j_max) {
  if (two_j_max < 0) throw InvalidArgument("j_max must be >= 0");
  const int cutoff = rho.op.cutoff();
  if (cutoff < two_j_max + 2) {
    throw CutoffTooSmall("cutoff " + std::to_string(cutoff) +
                         " cannot hold monomials of degree " +
                         std::to_string(two_j_max));
  }
  // Monomials of degree 2 j_max reach 2 j_max quanta sideways, so any
  // appreciable mass in that margin corrupts the traces.
  double tail = 0.0;
  for (int k = cutoff - two_j_max; k < cutoff; ++k) {
    tail += rho.op.matrix()(k, k).real();
  }
  if (tail > kMomentTailTol) {
    throw CutoffTooSmall("probability mass " + std::to_string(tail) +
                         " sits within the truncation margin; raise the "
                         "cutoff or lower j_max");
  }

  MomentTable table;
  table.hbar = rho.hbar;
  table.two_j_max = two_j_max;
  table.provenance = MomentProvenance::operator_trace;
  for (const MonomialIndex idx : moment_indices(two_j_max)) {
    const auto op = weyl_monomial(idx, cutoff, rho.hbar);
    const std::complex<double> val = (rho.op.matrix() * op.matrix()).trace();
    if (std::abs(val.imag()) > kMomentImagTol) {
      throw NumericalFailure("moment " + to_string(idx) +
                             " has imaginary residue " +
                             std::to_string(val.imag()));
    }
    table.values.emplace(idx, val.real());
  }
  return table;
}

Eigen::Matrix2d quadrature_covariance(const MomentTable& moments) {
  const double mq = moments.at({1, 1});
  const double mp = moments.at({1, -1});
  Eigen::Matrix2d v;
  v(0, 0) = moments.at({2, 2}) - mq * mq;
  v(1, 1) = moments.at({2, -2}) - mp * mp;
  v(0, 1) = v(1, 0) = moments.at({2, 0}) - mq * mp;
  return v;
}

}  // namespace momhier
