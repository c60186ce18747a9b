#include "momhier/fourth_order.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "momhier/covariance.hpp"
#include "momhier/errors.hpp"
#include "momhier/states.hpp"
#include "oracles.hpp"

using momhier::build_blocks;
using momhier::build_omega_tilde;
using momhier::compute_moments;
using momhier::density_from_spec;
using momhier::EffPair;
using momhier::eff_pair;
using momhier::FockSpec;
using momhier::fourth_order_check;
using momhier::fourth_order_verdict;
using momhier::FourthOrderBlocks;
using momhier::HbarConfig;
using momhier::invert_a;
using momhier::MomentTable;
using momhier::PsdVerdict;
using momhier::schur_increment;

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

MomentTable fock_moments(int n, double hb, int cutoff = 32) {
  const auto rho = density_from_spec(
      {.kind = FockSpec{n}, .cutoff = cutoff, .hbar = HbarConfig(hb)});
  return compute_moments(rho, 4);
}

Eigen::Matrix3d symmetric_pattern() {
  Eigen::Matrix3d p;
  p << 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0;
  return p;
}

Eigen::Matrix3d antisymmetric_pattern() {
  Eigen::Matrix3d p;
  p << 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0;
  return p;
}

}  // namespace

TEST_CASE("number-state blocks have their closed forms") {
  for (double hb : {1.0, 0.5}) {
    for (int n = 0; n <= 5; ++n) {
      const auto moments = fock_moments(n, hb);
      const auto blocks = build_blocks(moments, HbarConfig(hb));
      const double c = hb * hb / 2.0 * (n * n + n + 1);
      const double d = hb * hb * (n + 0.5);

      Eigen::Matrix2cd a_expected =
          hb * (n + 0.5) * Eigen::Matrix2cd::Identity();
      a_expected(0, 1) += kI * hb / 2.0;
      a_expected(1, 0) -= kI * hb / 2.0;
      CHECK((blocks.a_block - a_expected).cwiseAbs().maxCoeff() < 1e-10);

      const Eigen::Matrix3cd b_expected =
          c * symmetric_pattern().cast<std::complex<double>>() +
          kI * d * antisymmetric_pattern().cast<std::complex<double>>();
      CHECK((blocks.b_block - b_expected).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(blocks.c_block.cwiseAbs().maxCoeff() < 1e-10);

      CHECK((blocks.a1 - hb * (n + 0.5) * Eigen::Matrix2d::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-10);
      CHECK(blocks.a2(0, 1) == doctest::Approx(hb / 2.0).epsilon(1e-12));
      CHECK((blocks.b1 - c * symmetric_pattern()).cwiseAbs().maxCoeff() <
            1e-10);
      CHECK((blocks.b2 - d * antisymmetric_pattern()).cwiseAbs().maxCoeff() <
            1e-10);

      CHECK(blocks.x_mu(0) == doctest::Approx(hb * (n + 0.5)).epsilon(1e-10));
      CHECK(std::abs(blocks.x_mu(1)) < 1e-10);
      CHECK(std::abs(blocks.x_mu(2)) < 1e-10);
      CHECK(blocks.kappa_inv ==
            doctest::Approx(hb * hb * n * (n + 1)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("block builder validates its inputs") {
  const auto moments = fock_moments(1, 1.0);
  CHECK_THROWS_AS(build_blocks(moments, HbarConfig(2.0)),
                  momhier::InvalidArgument);
  const auto rho = density_from_spec({.kind = FockSpec{1}});
  CHECK_THROWS_AS(build_blocks(compute_moments(rho, 2), HbarConfig(1.0)),
                  momhier::InvalidArgument);
}

TEST_CASE("closed-form inverse of the leading block") {
  const auto blocks = build_blocks(fock_moments(1, 1.0), HbarConfig(1.0));
  CHECK(blocks.kappa_inv == doctest::Approx(2.0).epsilon(1e-12));
  const auto inv = invert_a(blocks, 1e-9);
  CHECK((blocks.a_block * inv - Eigen::Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  std::mt19937 rng(31u);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = oracles::random_mixed_state(rng, 6, 32, HbarConfig(1.0));
    const auto b = build_blocks(compute_moments(rho, 4), HbarConfig(1.0));
    REQUIRE(b.kappa_inv > 1e-9);
    const auto ainv = invert_a(b, 1e-9);
    const double scale = std::max(1.0, ainv.cwiseAbs().maxCoeff());
    CHECK((b.a_block * ainv - Eigen::Matrix2cd::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-10 * scale);
  }

  const auto vac = build_blocks(fock_moments(0, 1.0), HbarConfig(1.0));
  CHECK(std::abs(vac.kappa_inv) < 1e-10);
  CHECK_THROWS_AS(invert_a(vac, 1e-9), momhier::SingularBlock);
  CHECK_THROWS_AS(invert_a(vac, -1.0), momhier::InvalidArgument);
}

TEST_CASE("number-state effective pair has its closed forms") {
  for (double hb : {1.0, 0.5}) {
    for (int n = 1; n <= 5; ++n) {
      const auto blocks =
          build_blocks(fock_moments(n, hb), HbarConfig(hb));
      const auto pair = eff_pair(blocks);
      const double c = hb * hb / 2.0 * (n * n + n + 1);
      const double d = hb * hb * (n + 0.5);

      CHECK((pair.v_eff_m - c * symmetric_pattern()).cwiseAbs().maxCoeff() <
            1e-10);
      CHECK((0.5 * pair.w_eff_m - d * antisymmetric_pattern())
                .cwiseAbs()
                .maxCoeff() < 1e-10);

      const Eigen::Matrix3d v_t_expected =
          c * Eigen::Vector3d(0.0, 1.0, 1.0).asDiagonal();
      CHECK((pair.v_eff_t - v_t_expected).cwiseAbs().maxCoeff() < 1e-10);
      Eigen::Matrix3d half_w_t = Eigen::Matrix3d::Zero();
      half_w_t(1, 2) = d;
      half_w_t(2, 1) = -d;
      CHECK((0.5 * pair.w_eff_t - half_w_t).cwiseAbs().maxCoeff() < 1e-10);

      CHECK(pair.a_vector(0) == doctest::Approx(2.0 * d).epsilon(1e-10));
      CHECK(std::abs(pair.a_vector(1)) < 1e-10);
      CHECK(std::abs(pair.a_vector(2)) < 1e-10);
    }
  }
  const auto vac = build_blocks(fock_moments(0, 1.0), HbarConfig(1.0));
  CHECK_THROWS_AS(eff_pair(vac), momhier::SingularBlock);
}

TEST_CASE("effective pair keeps the basis change exact") {
  std::mt19937 rng(32u);
  const auto& mc = momhier::metric_constants();
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = oracles::random_mixed_state(rng, 6, 32, HbarConfig(1.0));
    const auto pair =
        eff_pair(build_blocks(compute_moments(rho, 4), HbarConfig(1.0)));
    CHECK((pair.v_eff_t - mc.m * pair.v_eff_m * mc.m.transpose())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((pair.w_eff_t - mc.m * pair.w_eff_m * mc.m.transpose())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((pair.v_eff_m - pair.v_eff_m.transpose()).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((pair.w_eff_m + pair.w_eff_m.transpose()).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("effective pair transforms by congruence") {
  std::mt19937 rng(33u);
  const HbarConfig hb(1.0);
  std::vector<MomentTable> tables;
  tables.push_back(fock_moments(1, 1.0));
  tables.push_back(fock_moments(2, 1.0));
  {
    const auto thermal = density_from_spec(
        {.kind = momhier::ThermalSpec{.mean_occupation = 0.6}});
    tables.push_back(compute_moments(thermal, 4));
  }
  for (const auto& moments : tables) {
    const auto pair = eff_pair(build_blocks(moments, hb));
    const auto verdict = fourth_order_verdict(pair, 1e-9);
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = momhier::random_sp2(rng);
      const auto transformed = momhier::transform_moments(moments, s);
      const auto pair_t = eff_pair(build_blocks(transformed, hb));

      const Eigen::Matrix3d k1 = momhier::k_rep(s, 2);
      const Eigen::Matrix3d lam = momhier::lambda_of(s).matrix();
      const double scale =
          std::max(1.0, pair_t.v_eff_m.cwiseAbs().maxCoeff());
      CHECK((pair_t.v_eff_m - k1 * pair.v_eff_m * k1.transpose())
                .cwiseAbs()
                .maxCoeff() < 1e-8 * scale);
      CHECK((pair_t.w_eff_m - k1 * pair.w_eff_m * k1.transpose())
                .cwiseAbs()
                .maxCoeff() < 1e-8 * scale);
      CHECK((pair_t.v_eff_t - lam * pair.v_eff_t * lam.transpose())
                .cwiseAbs()
                .maxCoeff() < 1e-8 * scale);
      CHECK((pair_t.a_vector - lam * pair.a_vector).cwiseAbs().maxCoeff() <
            1e-8 * scale);

      const auto verdict_t = fourth_order_verdict(pair_t, 1e-9);
      CHECK(verdict_t.passes == verdict.passes);
      CHECK((verdict_t.scs_diagonal - verdict.scs_diagonal)
                .cwiseAbs()
                .maxCoeff() < 1e-8 * scale);
      // These states have a purely timelike dual vector, fixed by the
      // residual rotation freedom of the normal form, so the b
      // invariants come back unchanged rather than co-rotated.
      CHECK((verdict_t.b_invariants - verdict.b_invariants)
                .cwiseAbs()
                .maxCoeff() < 1e-8 * scale);
    }
  }
}

TEST_CASE("number-state verdict reproduces the closing eigenvalues") {
  for (double hb : {1.0, 0.5}) {
    for (int n = 0; n <= 5; ++n) {
      const auto verdict = fourth_order_check(fock_moments(n, hb), 1e-9);
      REQUIRE(verdict.eigenvalues.size() == 3);
      const double lo = hb * hb / 2.0 * n * (n - 1);
      const double hi = hb * hb / 2.0 * (n + 1) * (n + 2);
      CHECK(std::abs(verdict.eigenvalues[0]) < 1e-9);
      CHECK(verdict.eigenvalues[1] ==
            doctest::Approx(std::min(lo, hi)).epsilon(1e-9).scale(1.0));
      CHECK(verdict.eigenvalues[2] ==
            doctest::Approx(std::max(lo, hi)).epsilon(1e-9).scale(1.0));
      CHECK(verdict.passes);  // the bound is saturated, never violated
      CHECK(verdict.generic_a == (n >= 1));
      if (n <= 1) {
        CHECK(std::abs(verdict.eigenvalues[1]) < 1e-9);
      }

      const double c = hb * hb / 2.0 * (n * n + n + 1);
      const double d = hb * hb * (n + 0.5);
      CHECK(std::abs(verdict.scs_diagonal(0)) < 1e-9);
      CHECK(verdict.scs_diagonal(1) == doctest::Approx(c).epsilon(1e-9));
      CHECK(verdict.scs_diagonal(2) == doctest::Approx(c).epsilon(1e-9));
      CHECK(verdict.b_invariants(0) ==
            doctest::Approx(2.0 * d).epsilon(1e-9));
      CHECK(std::abs(verdict.b_invariants(1)) < 1e-9);
      CHECK(std::abs(verdict.b_invariants(2)) < 1e-9);
    }
  }
}

TEST_CASE("zero pair passes with zero spectrum") {
  EffPair zero;
  zero.v_eff_m.setZero();
  zero.w_eff_m.setZero();
  zero.v_eff_t.setZero();
  zero.w_eff_t.setZero();
  const auto verdict = fourth_order_verdict(zero, 1e-9);
  for (double ev : verdict.eigenvalues) CHECK(std::abs(ev) < 1e-15);
  CHECK(verdict.passes);

  EffPair bad = zero;
  bad.v_eff_m(0, 1) = 0.5;  // breaks symmetry and the basis change
  CHECK_THROWS_AS(fourth_order_verdict(bad, 1e-9),
                  momhier::InvalidArgument);
  CHECK_THROWS_AS(fourth_order_verdict(zero, 0.0),
                  momhier::InvalidArgument);
}

TEST_CASE("singular leading blocks route through the reduction") {
  // Pure Gaussian states saturate det(a) = 0: coherent and squeezed.
  const auto coherent = density_from_spec(
      {.kind = momhier::CoherentSpec{{0.8, -0.45}}});
  const auto moments = compute_moments(coherent, 4);
  const auto blocks = build_blocks(moments, HbarConfig(1.0));
  CHECK(std::abs(blocks.kappa_inv) < 1e-9);
  const auto verdict = fourth_order_check(moments, 1e-9);
  CHECK_FALSE(verdict.generic_a);
  CHECK(verdict.passes);
  CHECK(verdict.eigenvalues.front() >= -1e-9);

  const auto squeezed = density_from_spec(
      {.kind = momhier::SqueezedVacuumSpec{.strength = 0.4, .angle = 0.7}});
  const auto sq_moments = compute_moments(squeezed, 4);
  CHECK(std::abs(build_blocks(sq_moments, HbarConfig(1.0)).kappa_inv) <
        1e-9);
  const auto sq_verdict = fourth_order_check(sq_moments, 1e-9);
  CHECK_FALSE(sq_verdict.generic_a);
  CHECK(sq_verdict.passes);
}

TEST_CASE("verdict agrees with the hierarchy reduction route") {
  std::mt19937 rng(34u);
  const HbarConfig hb(1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = trial % 2 == 0
                         ? oracles::random_mixed_state(rng, 6, 32, hb)
                         : oracles::random_pure_state(rng, 5, 32, hb);
    const auto moments = compute_moments(rho, 4);
    const auto blocks = build_blocks(moments, hb);
    if (blocks.kappa_inv <= 1e-9) continue;
    const auto small = build_omega_tilde(moments, 1);
    const auto big = build_omega_tilde(moments, 2);
    const auto rep = schur_increment(small, big, 1e-9);
    const auto verdict = fourth_order_check(moments, 1e-9);
    CHECK(verdict.generic_a);
    CHECK(verdict.passes ==
          (rep.complement_psd.verdict != PsdVerdict::indefinite));
  }
}

TEST_CASE("shrunken fourth moments violate the bound on both routes") {
  auto moments = fock_moments(2, 1.0);
  for (int two_m = 4; two_m >= -4; two_m -= 2) {
    moments.values[{4, two_m}] *= 0.1;
  }
  const auto verdict = fourth_order_check(moments, 1e-9);
  CHECK(verdict.generic_a);
  CHECK_FALSE(verdict.passes);
  CHECK(verdict.eigenvalues.front() < -1e-6);

  const auto small = build_omega_tilde(moments, 1);
  const auto big = build_omega_tilde(moments, 2);
  const auto rep = schur_increment(small, big, 1e-9);
  CHECK(rep.complement_psd.verdict == PsdVerdict::indefinite);
  CHECK(momhier::check_psd(big.omega_tilde, 1e-9).verdict ==
        PsdVerdict::indefinite);
}
