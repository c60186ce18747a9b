#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "momhier/hierarchy.hpp"

namespace momhier {

// Determinant window accepted before renormalizing an Sp(2,R) element.
inline constexpr double kSp2DetTol = 1e-9;
// Residue allowed on the Lorentz-group invariants of a 3x3 element,
// relative to the squared magnitude of its entries.
inline constexpr double kLorentzTol = 1e-10;
// Relative tolerance for the +/- pairing of symplectic eigenvalues.
inline constexpr double kWilliamsonPairTol = 1e-9;

// Element of Sp(2,R): a real 2x2 matrix of determinant 1. Inputs within
// kSp2DetTol of the group are rescaled onto it; the stored determinant
// is 1 to 1e-12.
class Sp2Element {
 public:
  Sp2Element();  // identity
  Sp2Element(double a, double b, double c, double d);
  explicit Sp2Element(const Eigen::Matrix2d& m);

  const Eigen::Matrix2d& matrix() const { return m_; }
  double a() const { return m_(0, 0); }
  double b() const { return m_(0, 1); }
  double c() const { return m_(1, 0); }
  double d() const { return m_(1, 1); }

 private:
  Eigen::Matrix2d m_;
};

// Entries uniform in [-2, 2], conditioned on a safely positive
// determinant, then rescaled onto the group. Deterministic in the rng.
Sp2Element random_sp2(std::mt19937& rng);

// Block-diagonal symplectic form for n modes: beta = direct sum of
// [[0, 1], [-1, 0]] blocks, so beta^2 = -identity exactly.
class SymplecticForm {
 public:
  explicit SymplecticForm(int n_modes);
  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXd& beta() const { return beta_; }

 private:
  int n_modes_;
  Eigen::MatrixXd beta_;
};

// Proper orthochronous element of SO(2,1) acting on three-vector
// components ordered (0, 3, 1). The constructor validates the metric
// congruence, det = +1, and the time orientation.
class LorentzElement {
 public:
  LorentzElement();  // identity
  explicit LorentzElement(const Eigen::Matrix3d& lambda);
  const Eigen::Matrix3d& matrix() const { return lambda_; }

 private:
  Eigen::Matrix3d lambda_;
};

// Fixed basis data for the three-dimensional representation. Component
// order is (0, 3, 1) throughout. g is the Lorentz metric on tensor
// components; g_k is the same metric pulled back to the degree-2
// monomial basis; m maps a monomial-ordered triple to tensor components
// and m_inv inverts it exactly.
struct MetricConstants {
  Eigen::Matrix3d g;
  Eigen::Matrix3d g_k;
  Eigen::Matrix3d m;
  Eigen::Matrix3d m_inv;
};
const MetricConstants& metric_constants();

// Degree-2j representation matrix: substituting the transformed
// quadratures into the classical monomial q^{j+m} p^{j-m} and collecting
// coefficients in the basis ordered m = j..-j. k_rep(s, 1) is s itself,
// and s -> k_rep(s, two_j) is a group homomorphism.
Eigen::MatrixXd k_rep(const Sp2Element& s, int two_j);

// The induced SO(2,1) element on tensor components: the unique
// three-dimensional matrix with k_rep(s, 2) = m_inv * lambda * m.
// Two-to-one: s and -s map to the same element.
LorentzElement lambda_of(const Sp2Element& s);

// Moment table of the transformed state: each j block is mixed by
// k_rep(s, two_j); the constant entry is unchanged.
MomentTable transform_moments(const MomentTable& moments,
                              const Sp2Element& s);

// Compares the moment matrix rebuilt from transformed moments against
// the congruence K omega_tilde K^T with K the block direct sum of the
// k_rep blocks. psd_preserved records whether the sign classification
// (indefinite or not, at tolerance 1e-9) is the same on both sides.
struct CongruenceReport {
  double max_deviation = 0.0;
  bool psd_preserved = false;
};
CongruenceReport congruence_covariance_check(const HierarchyMatrix& h,
                                             const Sp2Element& s);

// Symplectic spectrum of a positive definite 2n x 2n variance matrix:
// the n positive eigenvalues of i v beta^{-1}, sorted descending,
// computed through the Hermitian conjugate sqrt(v) (i beta^{-1}) sqrt(v).
// Throws InvalidArgument unless v is symmetric positive definite and
// NumericalFailure when the +/- pairing fails kWilliamsonPairTol.
std::vector<double> williamson_symplectic_eigenvalues(
    const Eigen::MatrixXd& v, const SymplecticForm& form);

// Lorentz congruence diagonalization of a symmetric 3x3 tensor in
// (0, 3, 1) components: lambda * v * lambda^T = diag(diagonal) when
// generic. Algorithm: eigendecompose v * g (similar to the diagonal form
// times g), normalize eigenvectors against g, order them (timelike,
// spacelike, spacelike) with the spacelike entries descending, and fix
// signs for det = +1 and a future-pointing time axis. Inputs with a
// defective v * g, a g-null eigenvector within tol, or a vanishing
// timelike diagonal entry come back with generic = false and best-effort
// output (identity lambda when no reduction was achieved).
struct ScsNormalForm {
  LorentzElement lambda;
  Eigen::Vector3d diagonal = Eigen::Vector3d::Zero();
  bool generic = false;
};
ScsNormalForm scs_normal_form(const Eigen::Matrix3d& v, double tol = 1e-9);

}  // namespace momhier
