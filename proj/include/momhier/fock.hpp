#pragma once

#include <Eigen/Dense>

#include "momhier/monomial.hpp"

namespace momhier {

// Value of the reduced Planck constant threaded through a computation.
// Validated at construction: positive and finite.
class HbarConfig {
 public:
  HbarConfig() = default;
  explicit HbarConfig(double value);
  double value() const { return value_; }

 private:
  double value_ = 1.0;
};

// Dense operator on the truncated number basis {|0>, ..., |cutoff - 1>}
// carrying its band structure as a hard guarantee: entries with
// |row - col| > bandwidth are exactly zero, enforced at construction.
class FockOperator {
 public:
  // Throws InvalidArgument unless entries is square, bandwidth is in
  // [0, side - 1], and everything outside the band is exactly zero.
  FockOperator(Eigen::MatrixXcd entries, int bandwidth);

  const Eigen::MatrixXcd& matrix() const { return entries_; }
  int cutoff() const { return static_cast<int>(entries_.rows()); }
  int bandwidth() const { return bandwidth_; }

 private:
  Eigen::MatrixXcd entries_;
  int bandwidth_;
};

struct QuadraturePair {
  FockOperator q;
  FockOperator p;
};

// Position and momentum on the truncated basis, both bandwidth 1:
//   q = sqrt(hbar/2) (a + a†),  p = i sqrt(hbar/2) (a† - a),
// with a|k> = sqrt(k)|k - 1>. Their commutator equals i hbar identity
// except in the bottom-right corner, where truncation forces the trace
// of a commutator to vanish. Requires cutoff >= 2.
QuadraturePair make_quadratures(int cutoff, HbarConfig hbar = {});

// Symmetric-ordered monomial of degree 2j: the average of all distinct
// orderings of (j + m) position factors and (j - m) momentum factors.
// The result is exactly Hermitian, has bandwidth exactly 2j, and reduces
// to the identity at (0, 0). Requires cutoff >= 2j + 2.
//
// Truncation semantics: the returned matrix agrees with the untruncated
// operator wherever max(row, col) + 2j < cutoff; entries nearer the
// corner are corrupted by the missing basis states.
FockOperator weyl_monomial(MonomialIndex idx, int cutoff,
                           HbarConfig hbar = {});

}  // namespace momhier
