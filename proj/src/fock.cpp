#include "momhier/fock.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "momhier/errors.hpp"

namespace momhier {

HbarConfig::HbarConfig(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidArgument("hbar must be positive and finite");
  }
}

FockOperator::FockOperator(Eigen::MatrixXcd entries, int bandwidth)
    : entries_(std::move(entries)), bandwidth_(bandwidth) {
  const auto n = entries_.rows();
  if (n == 0 || entries_.cols() != n) {
    throw InvalidArgument("operator matrix must be square and nonempty");
  }
  if (bandwidth_ < 0 || bandwidth_ > n - 1) {
    throw InvalidArgument("bandwidth out of range for matrix side");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (std::abs(r - c) > bandwidth_ && entries_(r, c) != 0.0) {
        throw InvalidArgument("entry outside the declared band is nonzero");
      }
    }
  }
}

QuadraturePair make_quadratures(int cutoff, HbarConfig hbar) {
  if (cutoff < 2) throw InvalidArgument("quadratures need cutoff >= 2");
  const double s = std::sqrt(hbar.value() / 2.0);
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  for (int k = 1; k < cutoff; ++k) {
    const double root = std::sqrt(static_cast<double>(k));
    // a[k-1][k] = sqrt(k); q = s (a + a†), p = i s (a† - a).
    q(k - 1, k) = s * root;
    q(k, k - 1) = s * root;
    p(k - 1, k) = std::complex<double>(0.0, -s * root);
    p(k, k - 1) = std::complex<double>(0.0, s * root);
  }
  return {FockOperator(std::move(q), 1), FockOperator(std::move(p), 1)};
}

FockOperator weyl_monomial(MonomialIndex idx, int cutoff, HbarConfig hbar) {
  require_valid(idx);
  if (cutoff < idx.two_j + 2) {
    throw CutoffTooSmall("cutoff " + std::to_string(cutoff) +
                         " too small for monomial " + to_string(idx) +
                         "; need at least " + std::to_string(idx.two_j + 2));
  }
  if (idx.two_j == 0) {
    return FockOperator(Eigen::MatrixXcd::Identity(cutoff, cutoff), 0);
  }
  // Bare ladder factors (hbar = 2 makes the per-factor scale exactly 1);
  // the quadrature scale is hoisted out of the word products below.
  const auto quads = make_quadratures(cutoff, HbarConfig(2.0));
  const Eigen::MatrixXcd* factors[2] = {&quads.q.matrix(), &quads.p.matrix()};

  const int n_q = (idx.two_j + idx.two_m) / 2;
  const int n_p = (idx.two_j - idx.two_m) / 2;
  // Letters 0 = position, 1 = momentum, starting from the sorted word so
  // next_permutation enumerates each distinct ordering exactly once.
  std::vector<int> word(static_cast<std::size_t>(n_q), 0);
  word.insert(word.end(), static_cast<std::size_t>(n_p), 1);

  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  double n_words = 0.0;
  do {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(cutoff, cutoff);
    for (int letter : word) prod = prod * (*factors[letter]);
    sum += prod;
    n_words += 1.0;
  } while (std::next_permutation(word.begin(), word.end()));
  sum /= n_words;

  // Applying the quadrature scale once keeps even-degree entries exact
  // for dyadic hbar wherever the bare ladder word is exact.
  double scale = 1.0;
  for (int i = 0; i < idx.two_j / 2; ++i) scale *= hbar.value() / 2.0;
  if (idx.two_j % 2 != 0) scale *= std::sqrt(hbar.value() / 2.0);
  sum *= scale;

  // (M + M†)/2 is a floating-point identity on the algebraically
  // Hermitian sum; it makes the result exactly equal to its adjoint.
  Eigen::MatrixXcd herm = (sum + sum.adjoint()) / 2.0;
  return FockOperator(std::move(herm), idx.two_j);
}

}  // namespace momhier
