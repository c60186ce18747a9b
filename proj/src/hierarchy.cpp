#include "momhier/hierarchy.hpp"

#include <cmath>
#include <utility>

#include "momhier/errors.hpp"
#include "momhier/product_rule.hpp"

namespace momhier {

HierarchyMatrix build_omega_tilde(const MomentTable& moments, int two_J) {
  if (two_J < 1) throw InvalidArgument("matrix order must be >= 1/2");
  if (moments.two_j_max < 2 * two_J) {
    throw InvalidArgument(
        "moment table reaches degree " + std::to_string(moments.two_j_max) +
        " but the order-" + std::to_string(two_J) +
        "/2 matrix needs degree " + std::to_string(2 * two_J));
  }
  const auto idx = hierarchy_indices(two_J);
  const int n = static_cast<int>(idx.size());

  Eigen::MatrixXcd raw(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::complex<double> val = 0.0;
      for (const auto& [k, c] :
           tau_product_expansion(idx[a], idx[b], moments.hbar)) {
        val += c * moments.at(k);
      }
      val -= moments.at(idx[a]) * moments.at(idx[b]);
      raw(a, b) = val;
    }
  }

  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  const double herm_defect = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > kStructureTol * scale) {
    throw NumericalFailure("moment matrix lost Hermiticity: defect " +
                           std::to_string(herm_defect));
  }

  HierarchyMatrix h;
  h.two_J = two_J;
  h.index_order = idx;
  h.v_part = (raw.real() + raw.real().transpose()) / 2.0;
  h.w_part = raw.imag() - raw.imag().transpose();
  h.omega_tilde =
      h.v_part.cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.5) * h.w_part.cast<std::complex<double>>();
  if ((h.omega_tilde - raw).cwiseAbs().maxCoeff() > kStructureTol * scale) {
    throw NumericalFailure("v/w split failed to reconstitute the matrix");
  }
  h.source_moments = moments;
  return h;
}

PsdReport check_psd(const Eigen::MatrixXcd& matrix, double tol,
                    std::string label) {
  const auto n = matrix.rows();
  if (n == 0 || matrix.cols() != n) {
    throw InvalidArgument("positivity check needs a nonempty square matrix");
  }
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument("positivity tolerance must be positive");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol * scale) {
    throw InvalidArgument("positivity check requires a Hermitian matrix");
  }
  const Eigen::MatrixXcd herm = (matrix + matrix.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("eigensolver failed in positivity check");
  }

  PsdReport report;
  report.matrix_label = std::move(label);
  report.side = static_cast<int>(n);
  report.tolerance = tol;
  report.eigenvalues.assign(es.eigenvalues().data(),
                            es.eigenvalues().data() + n);
  report.min_eigenvalue = report.eigenvalues.front();
  if (report.min_eigenvalue >= tol) {
    report.verdict = PsdVerdict::positive_definite;
  } else if (report.min_eigenvalue > -tol) {
    report.verdict = PsdVerdict::positive_semidefinite;
  } else {
    report.verdict = PsdVerdict::indefinite;
  }
  return report;
}

SchurReport schur_increment(const HierarchyMatrix& small,
                            const HierarchyMatrix& big, double tol) {
  if (big.two_J != small.two_J + 1) {
    throw InvalidArgument("reduction needs consecutive matrix orders");
  }
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument("rank tolerance must be positive");
  }
  const int na = hierarchy_side(small.two_J);
  const int nt = hierarchy_side(big.two_J);
  const int nb = nt - na;
  if (small.omega_tilde.rows() != na || big.omega_tilde.rows() != nt) {
    throw InvalidArgument("matrix sizes disagree with their stated orders");
  }
  const double scale =
      std::max(1.0, big.omega_tilde.cwiseAbs().maxCoeff());
  const double block_defect =
      (big.omega_tilde.topLeftCorner(na, na) - small.omega_tilde)
          .cwiseAbs()
          .maxCoeff();
  if (block_defect > kStructureTol * scale) {
    throw InvalidArgument(
        "leading block of the larger matrix does not match the smaller "
        "one; the two were not built from the same moments");
  }

  const Eigen::MatrixXcd a = big.omega_tilde.topLeftCorner(na, na);
  const Eigen::MatrixXcd c = big.omega_tilde.bottomLeftCorner(nb, na);
  const Eigen::MatrixXcd b = big.omega_tilde.bottomRightCorner(nb, nb);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("eigensolver failed on the leading block");
  }
  const Eigen::VectorXd lam = es.eigenvalues();  // ascending
  const double lam_max = std::max(lam(na - 1), 0.0);
  const double rank_cut = tol * lam_max;

  SchurReport report;
  report.two_J_small = small.two_J;
  report.a_min_eigenvalue = lam(0);
  int rank = 0;
  for (int k = 0; k < na; ++k) {
    if (lam(k) > rank_cut) ++rank;
  }
  report.a_rank = rank;
  report.a_invertible = (rank == na && lam(0) > rank_cut);

  // Columns of the eigenbasis split into range (kept) and null parts;
  // eigenvalues are ascending so the kept ones sit at the end.
  const Eigen::MatrixXcd u_range = es.eigenvectors().rightCols(rank);
  const Eigen::MatrixXcd u_null = es.eigenvectors().leftCols(na - rank);
  const Eigen::MatrixXcd c1 = c * u_range;
  const Eigen::MatrixXcd c2 = c * u_null;
  report.c2_norm = c2.norm();

  Eigen::MatrixXcd complement = b;
  if (rank > 0) {
    const Eigen::VectorXd kept = lam.tail(rank);
    complement -= c1 * kept.cwiseInverse().asDiagonal() * c1.adjoint();
  }
  report.complement = (complement + complement.adjoint()) / 2.0;
  report.complement_psd =
      check_psd(report.complement, tol,
                "schur-complement(2J=" + std::to_string(small.two_J) + ")");
  return report;
}

SrUpResult sr_up_check(const Eigen::Matrix2d& v2, HbarConfig hbar) {
  if (!v2.allFinite()) {
    throw InvalidArgument("covariance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, v2.cwiseAbs().maxCoeff());
  if (std::abs(v2(0, 1) - v2(1, 0)) > kStructureTol * scale) {
    throw InvalidArgument("covariance matrix must be symmetric");
  }
  SrUpResult r;
  const double x0 = (v2(0, 0) + v2(1, 1)) / 2.0;
  const double x3 = (v2(0, 0) - v2(1, 1)) / 2.0;
  const double x1 = (v2(0, 1) + v2(1, 0)) / 2.0;
  r.x = Eigen::Vector3d(x0, x3, x1);
  r.det_v = v2(0, 0) * v2(1, 1) - x1 * x1;
  r.invariant = x0 * x0 - x3 * x3 - x1 * x1;
  const double hb = hbar.value();
  r.bound = hb * hb / 4.0;
  r.passes = (r.det_v >= r.bound - kSrUpSlack) && x0 > 0.0;
  return r;
}

}  // namespace momhier
