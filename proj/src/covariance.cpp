#include "momhier/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "momhier/errors.hpp"

namespace momhier {

namespace {

// Pascal recurrence in doubles: exact while entries stay below 2^53.
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j >= 1; --j) row[j] += row[j - 1];
  }
  return row[static_cast<std::size_t>(k)];
}

double ipow(double x, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= x;
  return out;
}

}  // namespace

Sp2Element::Sp2Element() : m_(Eigen::Matrix2d::Identity()) {}

Sp2Element::Sp2Element(const Eigen::Matrix2d& m) : m_(m) {
  if (!m_.allFinite()) {
    throw InvalidArgument("Sp2Element: entries must be finite");
  }
  const double det = m_.determinant();
  if (std::abs(det - 1.0) > kSp2DetTol) {
    throw InvalidArgument("Sp2Element: determinant must be 1");
  }
  m_ /= std::sqrt(det);
}

Sp2Element::Sp2Element(double a, double b, double c, double d)
    : Sp2Element((Eigen::Matrix2d() << a, b, c, d).finished()) {}

Sp2Element random_sp2(std::mt19937& rng) {
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  for (;;) {
    Eigen::Matrix2d m;
    m << entry(rng), entry(rng), entry(rng), entry(rng);
    const double det = m.determinant();
    if (det < 0.1) continue;  // keep the rescaling well conditioned
    return Sp2Element(m / std::sqrt(det));
  }
}

SymplecticForm::SymplecticForm(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1) {
    throw InvalidArgument("SymplecticForm: need at least one mode");
  }
  beta_ = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    beta_(2 * k, 2 * k + 1) = 1.0;
    beta_(2 * k + 1, 2 * k) = -1.0;
  }
}

LorentzElement::LorentzElement() : lambda_(Eigen::Matrix3d::Identity()) {}

LorentzElement::LorentzElement(const Eigen::Matrix3d& lambda)
    : lambda_(lambda) {
  if (!lambda_.allFinite()) {
    throw InvalidArgument("LorentzElement: entries must be finite");
  }
  const Eigen::Matrix3d& g = metric_constants().g;
  // Invariant defects grow with the square of the entries (boosts), so
  // the tolerance is scaled accordingly.
  const double scale = std::max(1.0, lambda_.cwiseAbs().maxCoeff());
  const double metric_defect =
      (lambda_.transpose() * g * lambda_ - g).cwiseAbs().maxCoeff();
  if (metric_defect > kLorentzTol * scale * scale) {
    throw InvalidArgument("LorentzElement: metric congruence failed");
  }
  if (std::abs(lambda_.determinant() - 1.0) >
      kLorentzTol * scale * scale * scale) {
    throw InvalidArgument("LorentzElement: determinant must be +1");
  }
  if (lambda_(0, 0) < 1.0 - kLorentzTol * scale) {
    throw InvalidArgument("LorentzElement: must preserve time orientation");
  }
}

const MetricConstants& metric_constants() {
  static const MetricConstants constants = [] {
    MetricConstants out;
    out.g = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    out.m << 0.5, 0.0, 0.5,
             0.5, 0.0, -0.5,
             0.0, 1.0, 0.0;
    out.m_inv << 1.0, 1.0, 0.0,
                 0.0, 0.0, 1.0,
                 1.0, -1.0, 0.0;
    out.g_k = out.m_inv * out.g * out.m_inv.transpose();
    return out;
  }();
  return constants;
}

Eigen::MatrixXd k_rep(const Sp2Element& s, int two_j) {
  if (two_j < 1) {
    throw InvalidArgument("k_rep: requires 2j >= 1");
  }
  const double a = s.a();
  const double b = s.b();
  const double c = s.c();
  const double d = s.d();
  const int size = two_j + 1;
  Eigen::MatrixXd k(size, size);
  for (int row = 0; row < size; ++row) {
    const int jm = two_j - row;  // j + m, with m descending from j
    for (int col = 0; col < size; ++col) {
      const int jmp = two_j - col;  // j + m'
      // (a q + b p)^{j+m} (c q + d p)^{j-m}, coefficient of
      // q^{j+m'} p^{j-m'}: the q power r drawn from the first factor
      // runs over the overlap of both binomials.
      double sum = 0.0;
      const int r_lo = std::max(0, jm + jmp - two_j);
      const int r_hi = std::min(jm, jmp);
      for (int r = r_lo; r <= r_hi; ++r) {
        sum += binomial(jm, r) * binomial(two_j - jm, jmp - r) *
               ipow(a, r) * ipow(b, jm - r) * ipow(c, jmp - r) *
               ipow(d, r - (jm + jmp - two_j));
      }
      k(row, col) = sum;
    }
  }
  return k;
}

LorentzElement lambda_of(const Sp2Element& s) {
  const double a = s.a();
  const double b = s.b();
  const double c = s.c();
  const double d = s.d();
  Eigen::Matrix3d lambda;
  lambda << (a * a + b * b + c * c + d * d) / 2.0,
            (a * a - b * b + c * c - d * d) / 2.0,
            a * b + c * d,
            (a * a + b * b - c * c - d * d) / 2.0,
            (a * a - b * b - c * c + d * d) / 2.0,
            a * b - c * d,
            a * c + b * d,
            a * c - b * d,
            a * d + b * c;
  return LorentzElement(lambda);
}

MomentTable transform_moments(const MomentTable& moments,
                              const Sp2Element& s) {
  MomentTable out = moments;
  for (int two_j = 1; two_j <= moments.two_j_max; ++two_j) {
    const Eigen::MatrixXd k = k_rep(s, two_j);
    Eigen::VectorXd block(two_j + 1);
    int i = 0;
    for (int two_m = two_j; two_m >= -two_j; two_m -= 2, ++i) {
      block(i) = moments.at({two_j, two_m});
    }
    const Eigen::VectorXd mixed = k * block;
    i = 0;
    for (int two_m = two_j; two_m >= -two_j; two_m -= 2, ++i) {
      out.values[{two_j, two_m}] = mixed(i);
    }
  }
  return out;
}

CongruenceReport congruence_covariance_check(const HierarchyMatrix& h,
                                             const Sp2Element& s) {
  const HierarchyMatrix rebuilt =
      build_omega_tilde(transform_moments(h.source_moments, s), h.two_J);
  const int n = hierarchy_side(h.two_J);
  Eigen::MatrixXd k_full = Eigen::MatrixXd::Zero(n, n);
  int offset = 0;
  for (int two_j = 1; two_j <= h.two_J; ++two_j) {
    const int size = two_j + 1;
    k_full.block(offset, offset, size, size) = k_rep(s, two_j);
    offset += size;
  }
  const Eigen::MatrixXcd congruent =
      k_full * h.omega_tilde * k_full.transpose();

  CongruenceReport out;
  out.max_deviation = (rebuilt.omega_tilde - congruent).cwiseAbs().maxCoeff();
  constexpr double tol = 1e-9;
  const bool before =
      check_psd(h.omega_tilde, tol).verdict != PsdVerdict::indefinite;
  const bool after =
      check_psd(rebuilt.omega_tilde, tol).verdict != PsdVerdict::indefinite;
  out.psd_preserved = before == after;
  return out;
}

std::vector<double> williamson_symplectic_eigenvalues(
    const Eigen::MatrixXd& v, const SymplecticForm& form) {
  const int dim = 2 * form.n_modes();
  if (v.rows() != dim || v.cols() != dim) {
    throw InvalidArgument(
        "williamson_symplectic_eigenvalues: matrix size does not match the "
        "form");
  }
  if (!v.allFinite()) {
    throw InvalidArgument(
        "williamson_symplectic_eigenvalues: entries must be finite");
  }
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument(
        "williamson_symplectic_eigenvalues: matrix must be symmetric");
  }
  const Eigen::MatrixXd sym = (v + v.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0.0) {
    throw InvalidArgument(
        "williamson_symplectic_eigenvalues: matrix must be positive "
        "definite");
  }
  const Eigen::MatrixXd sqrt_v = es.operatorSqrt();
  // sqrt(v) (i beta^{-1}) sqrt(v) is Hermitian and similar to
  // i v beta^{-1}, so the spectrum is real and symmetric about zero.
  const std::complex<double> i_unit(0.0, 1.0);
  const Eigen::MatrixXcd herm =
      -i_unit * (sqrt_v * form.beta() * sqrt_v).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(herm);
  if (hs.info() != Eigen::Success) {
    throw NumericalFailure(
        "williamson_symplectic_eigenvalues: eigensolver failed");
  }
  const Eigen::VectorXd lam = hs.eigenvalues();  // ascending
  const double lam_scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(form.n_modes()));
  for (int k = 0; k < form.n_modes(); ++k) {
    const double pos = lam(dim - 1 - k);
    const double neg = lam(k);
    if (std::abs(pos + neg) > kWilliamsonPairTol * lam_scale) {
      throw NumericalFailure(
          "williamson_symplectic_eigenvalues: +/- pairing failed");
    }
    out.push_back((pos - neg) / 2.0);
  }
  return out;
}

ScsNormalForm scs_normal_form(const Eigen::Matrix3d& v_in, double tol) {
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw InvalidArgument("scs_normal_form: tolerance must be positive");
  }
  if (!v_in.allFinite()) {
    throw InvalidArgument("scs_normal_form: entries must be finite");
  }
  const double scale = std::max(1.0, v_in.cwiseAbs().maxCoeff());
  if ((v_in - v_in.transpose()).cwiseAbs().maxCoeff() > kStructureTol * scale) {
    throw InvalidArgument("scs_normal_form: matrix must be symmetric");
  }
  const Eigen::Matrix3d v = (v_in + v_in.transpose()) / 2.0;
  const Eigen::Matrix3d& g = metric_constants().g;

  ScsNormalForm out;  // identity lambda, generic = false
  out.diagonal = v.diagonal();

  double offdiag = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c) offdiag = std::max(offdiag, std::abs(v(r, c)));
    }
  }
  if (offdiag <= tol * scale) {
    // Already in normal form; entries stay in place.
    out.generic = v(0, 0) > tol * scale;
    return out;
  }

  // v g is self-adjoint in the indefinite metric, so for generic v it has
  // a real spectrum with one timelike and two spacelike eigenvectors; the
  // timelike eigenvalue is the 00 entry of the normal form and the
  // spacelike ones enter with a sign flip.
  const Eigen::EigenSolver<Eigen::Matrix3d> es(v * g);
  if (es.info() != Eigen::Success) return out;
  std::vector<std::pair<double, Eigen::Vector3d>> timelike;
  std::vector<std::pair<double, Eigen::Vector3d>> spacelike;
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> lam = es.eigenvalues()(k);
    if (std::abs(lam.imag()) > tol * scale) return out;
    const Eigen::Vector3cd col = es.eigenvectors().col(k);
    if (col.imag().norm() > tol * col.norm()) return out;
    Eigen::Vector3d u = col.real();
    u /= u.norm();
    const double g_norm = u.dot(g * u);
    if (std::abs(g_norm) <= tol) return out;  // g-null direction
    auto& bucket = g_norm > 0.0 ? timelike : spacelike;
    bucket.emplace_back(lam.real(), u / std::sqrt(std::abs(g_norm)));
  }
  if (timelike.size() != 1 || spacelike.size() != 2) return out;

  // Distinct eigenvalues are g-orthogonal automatically; one projection
  // step covers a degenerate spacelike pair. Spacelike g-norm is -1.
  {
    const Eigen::Vector3d& u1 = spacelike[0].second;
    Eigen::Vector3d& u2 = spacelike[1].second;
    u2 += u2.dot(g * u1) * u1;
    const double g_norm = u2.dot(g * u2);
    if (g_norm >= -tol) return out;
    u2 /= std::sqrt(-g_norm);
  }
  // Normal-form spacelike entries are the negated eigenvalues, reported
  // in descending order.
  if (-spacelike[0].first < -spacelike[1].first) {
    std::swap(spacelike[0], spacelike[1]);
  }

  Eigen::Vector3d u_time = timelike[0].second;
  if (u_time(0) < 0.0) u_time = -u_time;  // future-pointing time axis
  Eigen::Matrix3d u_mat;
  u_mat.col(0) = u_time;
  u_mat.col(1) = spacelike[0].second;
  u_mat.col(2) = spacelike[1].second;
  if (u_mat.determinant() < 0.0) u_mat.col(2) = -u_mat.col(2);

  const Eigen::Matrix3d lambda = g * u_mat.transpose() * g;
  const Eigen::Matrix3d reduced = lambda * v * lambda.transpose();
  double resid = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c) resid = std::max(resid, std::abs(reduced(r, c)));
    }
  }
  if (resid > tol * std::max(1.0, reduced.cwiseAbs().maxCoeff())) return out;
  try {
    out.lambda = LorentzElement(lambda);
  } catch (const InvalidArgument&) {
    return out;
  }
  out.diagonal = reduced.diagonal();
  out.generic = out.diagonal(0) > tol * scale;
  return out;
}

}  // namespace momhier
