#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "momhier/moments.hpp"

namespace momhier {

// Order-J moment matrix: entries <(T_a - <T_a>)(T_b - <T_b>)> over the
// row labels hierarchy_indices(two_J). The matrix splits exactly as
// omega_tilde = v_part + (i/2) w_part with v_part real symmetric (the
// symmetrized covariances) and w_part real antisymmetric (the commutator
// means); the split is validated at construction to 1e-12 relative.
// Entries do not depend on J, so the order-J matrix is the leading block
// of every higher order. The source table is retained so covariance
// checks can rebuild the matrix after a symplectic transformation.
struct HierarchyMatrix {
  int two_J = 0;
  std::vector<MonomialIndex> index_order;
  Eigen::MatrixXcd omega_tilde;
  Eigen::MatrixXd v_part;
  Eigen::MatrixXd w_part;
  MomentTable source_moments;
};

enum class PsdVerdict { positive_definite, positive_semidefinite, indefinite };

// Eigenvalue summary of a Hermitian matrix against an absolute tolerance.
struct PsdReport {
  std::string matrix_label;
  int side = 0;
  double tolerance = 0.0;
  double min_eigenvalue = 0.0;
  PsdVerdict verdict = PsdVerdict::indefinite;
  std::vector<double> eigenvalues;  // ascending
};

// Result of reducing the order-(J + 1/2) matrix onto its order-J leading
// block. When the block is invertible the complement is the classic
// B - C A^{-1} C†. When it is singular the reduction keeps only the
// range eigenspace: positivity of the full matrix forces the coupling
// into the null space to vanish, so c2_norm (Frobenius norm of that
// coupling) must be ~0 for a positive matrix, and the complement is
// taken against the range restriction of the block.
struct SchurReport {
  int two_J_small = 0;
  bool a_invertible = false;
  int a_rank = 0;
  double a_min_eigenvalue = 0.0;
  double c2_norm = 0.0;
  Eigen::MatrixXcd complement;
  PsdReport complement_psd;
};

// Second-moment uncertainty test data. x holds the components
// (x0, x3, x1) = ((Vqq + Vpp)/2, (Vqq - Vpp)/2, Vqp); the quadratic form
// x0^2 - x3^2 - x1^2 equals det V and is the rotation-boost invariant.
struct SrUpResult {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  double det_v = 0.0;
  double bound = 0.0;  // hbar^2 / 4
  double invariant = 0.0;
  bool passes = false;
};

// Slack applied to the det V >= hbar^2/4 comparison.
inline constexpr double kSrUpSlack = 1e-12;
// Relative residue allowed in the v/w split and block-consistency checks.
inline constexpr double kStructureTol = 1e-12;

// Assembles the order-J moment matrix from a table with j_max >= 2J.
HierarchyMatrix build_omega_tilde(const MomentTable& moments, int two_J);

// Eigenvalue verdict on a Hermitian matrix: min >= tol is positive
// definite, min > -tol is positive semidefinite, else indefinite. The
// tolerance is absolute. Throws InvalidArgument when the input is not
// Hermitian within tol (relative to its largest entry).
PsdReport check_psd(const Eigen::MatrixXcd& matrix, double tol,
                    std::string label = {});

// Reduces big (order J + 1/2) onto small (order J). Requires big to be
// one step above small with an exactly matching leading block. The rank
// split of the leading block uses the relative eigenvalue threshold tol.
SchurReport schur_increment(const HierarchyMatrix& small,
                            const HierarchyMatrix& big, double tol);

// det V >= hbar^2/4 on a 2x2 quadrature covariance matrix, with the
// positive-mean-square condition x0 > 0.
SrUpResult sr_up_check(const Eigen::Matrix2d& v2, HbarConfig hbar);

}  // namespace momhier
