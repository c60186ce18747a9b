#include "momhier/fourth_order.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "momhier/covariance.hpp"
#include "momhier/errors.hpp"

namespace momhier {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// Real symmetric x . sigma over the (0, 3, 1) components.
Eigen::Matrix2d x_dot_sigma(const Eigen::Vector3d& x) {
  Eigen::Matrix2d out;
  out << x(0) + x(1), x(2), x(2), x(0) - x(1);
  return out;
}

Eigen::Matrix2d z_matrix() {
  Eigen::Matrix2d z;
  z << 0.0, 1.0, -1.0, 0.0;  // i sigma_2, real
  return z;
}

Eigen::Vector3d dual_vector_raised(const Eigen::Matrix3d& w_t) {
  // Lower components sit in the pattern [[0, a1, -a3], [-a1, 0, a0],
  // [a3, -a0, 0]]; raising flips the sign of the spacelike pair.
  return {w_t(1, 2), w_t(0, 2), -w_t(0, 1)};
}

EffPair pair_from_m_basis(const Eigen::Matrix3d& v_m,
                          const Eigen::Matrix3d& w_m) {
  const auto& mc = metric_constants();
  EffPair out;
  out.v_eff_m = v_m;
  out.w_eff_m = w_m;
  out.v_eff_t = mc.m * v_m * mc.m.transpose();
  out.w_eff_t = mc.m * w_m * mc.m.transpose();
  out.a_vector = dual_vector_raised(out.w_eff_t);
  return out;
}

FourthOrderVerdict verdict_from_pair(const EffPair& pair, double tol,
                                     bool generic_a) {
  FourthOrderVerdict out;
  out.generic_a = generic_a;

  const Eigen::Matrix3cd herm =
      pair.v_eff_t.cast<std::complex<double>>() +
      (kI / 2.0) * pair.w_eff_t.cast<std::complex<double>>();
  const PsdReport psd = check_psd(herm, tol, "fourth-order");
  out.eigenvalues = psd.eigenvalues;
  out.passes = psd.min_eigenvalue >= -tol;

  const ScsNormalForm nf = scs_normal_form(pair.v_eff_t, tol);
  out.scs_diagonal = nf.diagonal;
  const Eigen::Matrix3d w_scs =
      nf.lambda.matrix() * pair.w_eff_t * nf.lambda.matrix().transpose();
  out.b_invariants = dual_vector_raised(w_scs);
  return out;
}

void validate_pair(const EffPair& pair) {
  const auto& mc = metric_constants();
  const double scale =
      std::max({1.0, pair.v_eff_m.cwiseAbs().maxCoeff(),
                pair.w_eff_m.cwiseAbs().maxCoeff()});
  const bool ok =
      pair.v_eff_m.allFinite() && pair.w_eff_m.allFinite() &&
      (pair.v_eff_m - pair.v_eff_m.transpose()).cwiseAbs().maxCoeff() <=
          kStructureTol * scale &&
      (pair.w_eff_m + pair.w_eff_m.transpose()).cwiseAbs().maxCoeff() <=
          kStructureTol * scale &&
      (pair.v_eff_t - mc.m * pair.v_eff_m * mc.m.transpose())
              .cwiseAbs()
              .maxCoeff() <= kStructureTol * scale &&
      (pair.w_eff_t - mc.m * pair.w_eff_m * mc.m.transpose())
              .cwiseAbs()
              .maxCoeff() <= kStructureTol * scale &&
      (pair.a_vector - dual_vector_raised(pair.w_eff_t)).cwiseAbs().maxCoeff() <=
          kStructureTol * scale;
  if (!ok) {
    throw InvalidArgument(
        "fourth_order_verdict: inconsistent effective pair");
  }
}

}  // namespace

FourthOrderBlocks build_blocks(const MomentTable& moments, HbarConfig hbar) {
  if (moments.hbar.value() != hbar.value()) {
    throw InvalidArgument("build_blocks: hbar does not match the table");
  }
  const HierarchyMatrix h = build_omega_tilde(moments, 2);

  FourthOrderBlocks out;
  out.hbar = hbar;
  out.a_block = h.omega_tilde.topLeftCorner(2, 2);
  out.b_block = h.omega_tilde.bottomRightCorner(3, 3);
  out.c_block = h.omega_tilde.block(2, 0, 3, 2);
  out.a1 = h.v_part.topLeftCorner(2, 2);
  out.a2 = 0.5 * h.w_part.topLeftCorner(2, 2);
  out.b1 = h.v_part.bottomRightCorner(3, 3);
  out.b2 = 0.5 * h.w_part.bottomRightCorner(3, 3);
  out.c1 = h.v_part.block(2, 0, 3, 2);
  out.c2 = 0.5 * h.w_part.block(2, 0, 3, 2);

  out.x_mu = Eigen::Vector3d((out.a1(0, 0) + out.a1(1, 1)) / 2.0,
                             (out.a1(0, 0) - out.a1(1, 1)) / 2.0,
                             out.a1(0, 1));

  const std::complex<double> det = out.a_block.determinant();
  const double hb = hbar.value();
  const double lorentz_square = out.x_mu(0) * out.x_mu(0) -
                                out.x_mu(1) * out.x_mu(1) -
                                out.x_mu(2) * out.x_mu(2);
  const double scale =
      std::max(1.0, out.a_block.cwiseAbs().maxCoeff());
  const double ident_tol = 1e-10 * scale * scale;
  if (std::abs(det.imag()) > ident_tol ||
      std::abs(det.real() - (lorentz_square - hb * hb / 4.0)) > ident_tol) {
    throw NumericalFailure(
        "build_blocks: det(a) disagrees with the Lorentz-square identity");
  }
  out.kappa_inv = det.real();
  return out;
}

Eigen::Matrix2cd invert_a(const FourthOrderBlocks& blocks, double tol) {
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument("invert_a: tolerance must be positive");
  }
  if (blocks.kappa_inv <= tol) {
    throw SingularBlock("invert_a: det(a) is not safely positive");
  }
  const double kappa = 1.0 / blocks.kappa_inv;
  const double hb = blocks.hbar.value();
  const Eigen::Vector3d xt(blocks.x_mu(0), -blocks.x_mu(1), -blocks.x_mu(2));
  Eigen::Matrix2cd sigma2;
  sigma2 << 0.0, -kI, kI, 0.0;
  const Eigen::Matrix2cd inv =
      kappa * (x_dot_sigma(xt).cast<std::complex<double>>() +
               (hb / 2.0) * sigma2);

  const Eigen::Matrix2cd direct = blocks.a_block.inverse();
  const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
  if ((inv - direct).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalFailure(
        "invert_a: closed form disagrees with direct inversion");
  }
  return inv;
}

EffPair eff_pair(const FourthOrderBlocks& blocks, double tol) {
  const Eigen::Matrix2cd a_inv = invert_a(blocks, tol);
  const Eigen::Matrix3cd complement =
      blocks.b_block - blocks.c_block * a_inv * blocks.c_block.adjoint();
  const double scale = std::max(1.0, complement.cwiseAbs().maxCoeff());
  if ((complement - complement.adjoint()).cwiseAbs().maxCoeff() >
      kStructureTol * scale) {
    throw NumericalFailure("eff_pair: complement is not Hermitian");
  }

  // Real-split route: with xtilde . sigma =: xs and z = i sigma_2 both
  // real, the complement splits as (b1 - kappa R) + i (b2 - kappa I)
  // with R and I assembled from c1, c2 alone, so both parts are real by
  // construction. The two routes must agree to roundoff.
  const double kappa = 1.0 / blocks.kappa_inv;
  const double hb = blocks.hbar.value();
  const Eigen::Vector3d xt(blocks.x_mu(0), -blocks.x_mu(1), -blocks.x_mu(2));
  const Eigen::Matrix2d xs = x_dot_sigma(xt);
  const Eigen::Matrix2d z = z_matrix();
  const auto& c1 = blocks.c1;
  const auto& c2 = blocks.c2;
  const Eigen::Matrix3d v_m =
      blocks.b1 -
      kappa * (c1 * xs * c1.transpose() + c2 * xs * c2.transpose() +
               (hb / 2.0) * (c2 * z * c1.transpose() -
                             c1 * z * c2.transpose()));
  const Eigen::Matrix3d half_w =
      blocks.b2 -
      kappa * (c2 * xs * c1.transpose() - c1 * xs * c2.transpose() -
               (hb / 2.0) * (c1 * z * c1.transpose() +
                             c2 * z * c2.transpose()));
  if ((complement.real() - v_m).cwiseAbs().maxCoeff() >
          kStructureTol * scale ||
      (complement.imag() - half_w).cwiseAbs().maxCoeff() >
          kStructureTol * scale) {
    throw NumericalFailure(
        "eff_pair: split formulas disagree with the complement");
  }

  const Eigen::Matrix3d v_sym = (v_m + v_m.transpose()) / 2.0;
  const Eigen::Matrix3d w_anti = half_w - half_w.transpose();
  return pair_from_m_basis(v_sym, w_anti);
}

FourthOrderVerdict fourth_order_verdict(const EffPair& pair, double tol) {
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument(
        "fourth_order_verdict: tolerance must be positive");
  }
  validate_pair(pair);
  return verdict_from_pair(pair, tol, true);
}

FourthOrderVerdict fourth_order_check(const MomentTable& moments,
                                      double tol) {
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument("fourth_order_check: tolerance must be positive");
  }
  const FourthOrderBlocks blocks = build_blocks(moments, moments.hbar);
  if (blocks.kappa_inv > tol) {
    FourthOrderVerdict out = verdict_from_pair(eff_pair(blocks, tol), tol,
                                               true);
    // Positive determinant alone admits a negative definite block; the
    // reduction argument needs the block itself nonnegative.
    out.passes = out.passes && blocks.x_mu(0) > 0.0;
    return out;
  }

  const HierarchyMatrix small = build_omega_tilde(moments, 1);
  const HierarchyMatrix big = build_omega_tilde(moments, 2);
  const SchurReport rep = schur_increment(small, big, tol);
  const Eigen::Matrix3cd complement = rep.complement;
  const Eigen::Matrix3d v_m =
      (complement.real() + complement.real().transpose()) / 2.0;
  const Eigen::Matrix3d w_m =
      complement.imag() - complement.imag().transpose();
  FourthOrderVerdict out =
      verdict_from_pair(pair_from_m_basis(v_m, w_m), tol, false);
  const double scale = std::max(1.0, big.omega_tilde.cwiseAbs().maxCoeff());
  out.passes = out.passes && rep.a_min_eigenvalue >= -tol &&
               rep.c2_norm <= std::sqrt(tol * scale);
  return out;
}

}  // namespace momhier
