#include "momhier/covariance.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "momhier/errors.hpp"
#include "momhier/fock.hpp"
#include "momhier/states.hpp"
#include "oracles.hpp"

using momhier::build_omega_tilde;
using momhier::compute_moments;
using momhier::congruence_covariance_check;
using momhier::density_from_spec;
using momhier::HbarConfig;
using momhier::k_rep;
using momhier::lambda_of;
using momhier::LorentzElement;
using momhier::metric_constants;
using momhier::MomentTable;
using momhier::moment_indices;
using momhier::quadrature_covariance;
using momhier::random_sp2;
using momhier::scs_normal_form;
using momhier::Sp2Element;
using momhier::SymplecticForm;
using momhier::transform_moments;
using momhier::williamson_symplectic_eigenvalues;

namespace {

Sp2Element compose(const Sp2Element& s1, const Sp2Element& s2) {
  return Sp2Element(s1.matrix() * s2.matrix());
}

}  // namespace

TEST_CASE("group element constructors validate and renormalize") {
  const Sp2Element id;
  CHECK(id.matrix() == Eigen::Matrix2d::Identity());

  CHECK_THROWS_AS(Sp2Element(2.0 * Eigen::Matrix2d::Identity()),
                  momhier::InvalidArgument);
  CHECK_THROWS_AS(Sp2Element(1.0, 2.0, 3.0, 4.0), momhier::InvalidArgument);

  // An input slightly off the group is pulled back onto it.
  const double eps = 3e-10;
  const Sp2Element near((1.0 + eps) * Eigen::Matrix2d::Identity());
  CHECK(std::abs(near.matrix().determinant() - 1.0) < 1e-12);

  std::mt19937 rng(11u);
  for (int k = 0; k < 100; ++k) {
    const auto s = random_sp2(rng);
    CHECK(std::abs(s.matrix().determinant() - 1.0) < 1e-12);
    CHECK(s.matrix().cwiseAbs().maxCoeff() < 10.0);
  }
}

TEST_CASE("symplectic form blocks") {
  for (int n : {1, 2, 3}) {
    const SymplecticForm form(n);
    const auto& beta = form.beta();
    CHECK(beta.rows() == 2 * n);
    CHECK((beta * beta + Eigen::MatrixXd::Identity(2 * n, 2 * n))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((beta + beta.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(SymplecticForm(0), momhier::InvalidArgument);
}

TEST_CASE("metric constants are exact") {
  const auto& mc = metric_constants();
  Eigen::Matrix3d g_k_expected;
  g_k_expected << 0.0, 0.0, 2.0, 0.0, -1.0, 0.0, 2.0, 0.0, 0.0;
  CHECK((mc.g_k - g_k_expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mc.m * mc.m_inv - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((mc.m_inv * mc.g * mc.m_inv.transpose() - mc.g_k)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("lowest representation matrices have closed forms") {
  std::mt19937 rng(21u);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_sp2(rng);
    const double a = s.a(), b = s.b(), c = s.c(), d = s.d();

    CHECK((k_rep(s, 1) - s.matrix()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::Matrix3d k1_expected;
    k1_expected << a * a, 2.0 * a * b, b * b,
                   a * c, a * d + b * c, b * d,
                   c * c, 2.0 * c * d, d * d;
    CHECK((k_rep(s, 2) - k1_expected).cwiseAbs().maxCoeff() < 1e-14);
  }
  for (int two_j : {1, 2, 3, 4}) {
    CHECK((k_rep(Sp2Element(), two_j) -
           Eigen::MatrixXd::Identity(two_j + 1, two_j + 1))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(k_rep(Sp2Element(), 0), momhier::InvalidArgument);
}

TEST_CASE("representation matrices compose with the group") {
  std::mt19937 rng(22u);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s1 = random_sp2(rng);
    const auto s2 = random_sp2(rng);
    const auto s12 = compose(s1, s2);
    for (int two_j : {1, 2, 3, 4}) {
      const Eigen::MatrixXd lhs = k_rep(s12, two_j);
      const Eigen::MatrixXd rhs = k_rep(s1, two_j) * k_rep(s2, two_j);
      const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * scale);
    }
  }
}

TEST_CASE("three-dimensional map preserves the metrics") {
  const auto& mc = metric_constants();
  CHECK((lambda_of(Sp2Element()).matrix() - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  std::mt19937 rng(23u);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_sp2(rng);
    const Eigen::Matrix3d lam = lambda_of(s).matrix();
    const double a = s.a(), b = s.b(), c = s.c(), d = s.d();
    CHECK(lam(0, 0) ==
          doctest::Approx((a * a + b * b + c * c + d * d) / 2.0)
              .epsilon(1e-14));

    CHECK((lam.transpose() * mc.g * lam - mc.g).cwiseAbs().maxCoeff() <
          1e-9);
    const Eigen::Matrix3d k1 = k_rep(s, 2);
    CHECK((k1 * mc.g_k * k1.transpose() - mc.g_k).cwiseAbs().maxCoeff() <
          1e-9);

    // The degree-2 representation is the conjugated Lorentz matrix.
    CHECK((k1 - mc.m_inv * lam * mc.m).cwiseAbs().maxCoeff() < 1e-10);

    // Two-to-one: the antipodal element maps to the same matrix.
    const Sp2Element anti(-s.matrix());
    CHECK((lambda_of(anti).matrix() - lam).cwiseAbs().maxCoeff() < 1e-14);
  }

  // Homomorphism into the Lorentz group.
  for (int trial = 0; trial < 20; ++trial) {
    const auto s1 = random_sp2(rng);
    const auto s2 = random_sp2(rng);
    const Eigen::Matrix3d lhs = lambda_of(compose(s1, s2)).matrix();
    const Eigen::Matrix3d rhs =
        lambda_of(s1).matrix() * lambda_of(s2).matrix();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * scale);
  }
}

TEST_CASE("Lorentz element constructor rejects off-group input") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = 0.3;
  CHECK_THROWS_AS(LorentzElement{m}, momhier::InvalidArgument);
  // Metric-preserving but improper.
  CHECK_THROWS_AS(
      LorentzElement(Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal()),
      momhier::InvalidArgument);
  // Proper but time-reversing.
  CHECK_THROWS_AS(
      LorentzElement(Eigen::Vector3d(-1.0, -1.0, 1.0).asDiagonal()),
      momhier::InvalidArgument);
}

TEST_CASE("moment transformation fixed points") {
  const auto rho = density_from_spec({.kind = momhier::FockSpec{2}});
  const auto moments = compute_moments(rho, 4);

  const auto same = transform_moments(moments, Sp2Element());
  for (const auto idx : moment_indices(4)) {
    CHECK(same.at(idx) == moments.at(idx));
  }

  // Number states are invariant under phase-space rotations.
  for (double theta : {0.4, 1.3, 2.9}) {
    const Sp2Element rot(std::cos(theta), std::sin(theta),
                         -std::sin(theta), std::cos(theta));
    const auto rotated = transform_moments(moments, rot);
    for (const auto idx : moment_indices(4)) {
      CHECK(rotated.at(idx) ==
            doctest::Approx(moments.at(idx)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("transformed vacuum moments match the squeezed state") {
  const double r = 0.35;
  const auto vac = density_from_spec({.kind = momhier::FockSpec{0}});
  const auto vac_moments = compute_moments(vac, 4);
  const Sp2Element squeeze(std::exp(r), 0.0, 0.0, std::exp(-r));
  const auto transformed = transform_moments(vac_moments, squeeze);

  const auto sq = density_from_spec(
      {.kind = momhier::SqueezedVacuumSpec{.strength = r, .angle = 0.0}});
  const auto sq_moments = compute_moments(sq, 4);
  for (const auto idx : moment_indices(4)) {
    CHECK(transformed.at(idx) ==
          doctest::Approx(sq_moments.at(idx)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("transformed coherent moments match the rotated state") {
  const double hb = 0.7;
  const std::complex<double> alpha(0.8, -0.45);
  const auto rho = density_from_spec(
      {.kind = momhier::CoherentSpec{alpha}, .hbar = HbarConfig(hb)});
  const auto moments = compute_moments(rho, 4);

  const double theta = 0.9;
  const Sp2Element rot(std::cos(theta), std::sin(theta), -std::sin(theta),
                       std::cos(theta));
  const auto transformed = transform_moments(moments, rot);

  // The mean vector transforms by S itself; the rotated state is the
  // coherent state at the transformed mean.
  const Eigen::Vector2d mean(std::sqrt(2.0 * hb) * alpha.real(),
                             std::sqrt(2.0 * hb) * alpha.imag());
  const Eigen::Vector2d mean_rot = rot.matrix() * mean;
  const std::complex<double> alpha_rot(mean_rot(0) / std::sqrt(2.0 * hb),
                                       mean_rot(1) / std::sqrt(2.0 * hb));
  const auto target = density_from_spec(
      {.kind = momhier::CoherentSpec{alpha_rot}, .hbar = HbarConfig(hb)});
  const auto target_moments = compute_moments(target, 4);
  for (const auto idx : moment_indices(4)) {
    CHECK(transformed.at(idx) ==
          doctest::Approx(target_moments.at(idx)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("rebuilt and congruent matrices agree") {
  std::mt19937 rng(24u);
  const auto fock1 = density_from_spec({.kind = momhier::FockSpec{1}});
  const auto h_fock = build_omega_tilde(compute_moments(fock1, 4), 2);

  const auto id_rep = congruence_covariance_check(h_fock, Sp2Element());
  CHECK(id_rep.max_deviation == 0.0);
  CHECK(id_rep.psd_preserved);

  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_sp2(rng);
    const auto rep = congruence_covariance_check(h_fock, s);
    CHECK(rep.max_deviation < 1e-8);
    CHECK(rep.psd_preserved);
  }

  const auto mixed = oracles::random_mixed_state(rng, 6, 64, HbarConfig(1.0));
  const auto h_mixed = build_omega_tilde(compute_moments(mixed, 6), 3);
  const auto vac = density_from_spec({.kind = momhier::FockSpec{0}});
  const auto h_vac = build_omega_tilde(compute_moments(vac, 4), 2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_sp2(rng);
    const double scale =
        std::max(1.0, h_mixed.omega_tilde.cwiseAbs().maxCoeff());
    const auto rep = congruence_covariance_check(h_mixed, s);
    CHECK(rep.max_deviation < 1e-8 * scale);
    CHECK(rep.psd_preserved);
    const auto rep_vac = congruence_covariance_check(h_vac, s);
    CHECK(rep_vac.max_deviation < 1e-8);
    CHECK(rep_vac.psd_preserved);
  }
}

TEST_CASE("symplectic spectrum of planted matrices") {
  const SymplecticForm one(1);
  const auto single =
      williamson_symplectic_eigenvalues(1.7 * Eigen::Matrix2d::Identity(),
                                        one);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(1.7).epsilon(1e-12));

  const SymplecticForm two(2);
  Eigen::Vector4d diag(2.0, 2.0, 3.0, 3.0);
  const auto plain =
      williamson_symplectic_eigenvalues(diag.asDiagonal(), two);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(plain[1] == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937 rng(25u);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd s0 = oracles::random_symplectic(rng, 2);
    const Eigen::MatrixXd v =
        s0 * diag.asDiagonal().toDenseMatrix() * s0.transpose();
    const auto kappa = williamson_symplectic_eigenvalues(v, two);
    REQUIRE(kappa.size() == 2);
    CHECK(kappa[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(kappa[1] == doctest::Approx(2.0).epsilon(1e-8));

    // Trace identities tie the spectrum to the matrix directly.
    const Eigen::MatrixXd vb = v * (-two.beta());  // beta^{-1} = -beta
    const double tr2 = (vb * vb).trace();
    const double tr4 = (vb * vb * vb * vb).trace();
    const double k2 = kappa[0] * kappa[0] + kappa[1] * kappa[1];
    const double k4 = std::pow(kappa[0], 4) + std::pow(kappa[1], 4);
    CHECK(tr2 == doctest::Approx(-2.0 * k2).epsilon(1e-8));
    CHECK(tr4 == doctest::Approx(2.0 * k4).epsilon(1e-8));
  }
}

TEST_CASE("symplectic spectrum input validation") {
  const SymplecticForm two(2);
  CHECK_THROWS_AS(williamson_symplectic_eigenvalues(
                      Eigen::Matrix2d::Identity(), two),
                  momhier::InvalidArgument);
  CHECK_THROWS_AS(
      williamson_symplectic_eigenvalues(
          Eigen::Vector4d(1.0, -1.0, 1.0, 1.0).asDiagonal(), two),
      momhier::InvalidArgument);
  Eigen::Matrix4d asym = Eigen::Matrix4d::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(williamson_symplectic_eigenvalues(asym, two),
                  momhier::InvalidArgument);
}

TEST_CASE("physical variance matrices sit above the symplectic bound") {
  const double hb = 1.0;
  const SymplecticForm one(1);
  for (const auto& rho : oracles::state_zoo(HbarConfig(hb))) {
    const auto v = quadrature_covariance(compute_moments(rho, 2));
    const auto kappa = williamson_symplectic_eigenvalues(v, one);
    REQUIRE(kappa.size() == 1);
    CHECK(kappa[0] >= hb / 2.0 - 1e-9);
  }
}

TEST_CASE("normal form of diagonal input") {
  const auto plain = scs_normal_form(
      Eigen::Vector3d(5.0, 2.0, 1.0).asDiagonal(), 1e-9);
  CHECK(plain.generic);
  CHECK(plain.lambda.matrix() == Eigen::Matrix3d::Identity());
  CHECK(plain.diagonal == Eigen::Vector3d(5.0, 2.0, 1.0));

  // The degenerate pattern with a vanishing timelike entry is already
  // normal but flagged non-generic.
  const double c = 2.3;
  const auto degenerate = scs_normal_form(
      Eigen::Vector3d(0.0, c, c).asDiagonal(), 1e-9);
  CHECK_FALSE(degenerate.generic);
  CHECK(degenerate.lambda.matrix() == Eigen::Matrix3d::Identity());
  CHECK(degenerate.diagonal == Eigen::Vector3d(0.0, c, c));
}

TEST_CASE("normal form round trips a planted congruence") {
  std::mt19937 rng(26u);
  const Eigen::Vector3d planted(5.0, 2.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d lam0 = lambda_of(random_sp2(rng)).matrix();
    const Eigen::Matrix3d v =
        lam0 * planted.asDiagonal().toDenseMatrix() * lam0.transpose();
    const auto nf = scs_normal_form(v, 1e-9);
    CHECK(nf.generic);
    CHECK((nf.diagonal - planted).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::Matrix3d reduced =
        nf.lambda.matrix() * v * nf.lambda.matrix().transpose();
    const Eigen::Matrix3d expect = nf.diagonal.asDiagonal();
    CHECK((reduced - expect).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("normal form diagonal is a congruence invariant") {
  std::mt19937 rng(27u);
  std::uniform_real_distribution<double> entry(0.5, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d d(entry(rng), entry(rng), entry(rng));
    const Eigen::Matrix3d lam0 = lambda_of(random_sp2(rng)).matrix();
    const Eigen::Matrix3d lam1 = lambda_of(random_sp2(rng)).matrix();
    const Eigen::Matrix3d v =
        lam0 * d.asDiagonal().toDenseMatrix() * lam0.transpose();
    const Eigen::Matrix3d w = lam1 * v * lam1.transpose();
    const auto nf_v = scs_normal_form(v, 1e-9);
    const auto nf_w = scs_normal_form(w, 1e-9);
    CHECK(nf_v.generic);
    CHECK(nf_w.generic);
    // Spacelike entries come out sorted, so the vectors compare directly.
    CHECK((nf_v.diagonal - nf_w.diagonal).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("normal form flags null directions and bad input") {
  // The timelike eigenvector of v g is g-null here.
  Eigen::Matrix3d crossed;
  crossed << 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  const auto nf = scs_normal_form(crossed, 1e-9);
  CHECK_FALSE(nf.generic);
  CHECK(nf.lambda.matrix() == Eigen::Matrix3d::Identity());
  CHECK(nf.diagonal == crossed.diagonal());

  Eigen::Matrix3d asym = Eigen::Matrix3d::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(scs_normal_form(asym, 1e-9), momhier::InvalidArgument);
  CHECK_THROWS_AS(scs_normal_form(Eigen::Matrix3d::Identity(), 0.0),
                  momhier::InvalidArgument);
}
