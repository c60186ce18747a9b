#include "momhier/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <vector>

#include "momhier/errors.hpp"
#include "momhier/moments.hpp"

namespace momhier {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
// Density-matrix entries below this bound cannot move W at double
// precision and are skipped during kernel accumulation.
constexpr double kRhoSkipTol = 1e-18;

// Deterministic row-major pairwise reduction over f(lo), ..., f(hi - 1).
// The split tree depends only on the index range, never on data or
// threading, so results are reproducible bit for bit.
template <typename Value, typename F>
Value pairwise_sum(long lo, long hi, const F& f) {
  if (hi - lo <= 8) {
    Value out = f(lo);
    for (long t = lo + 1; t < hi; ++t) out += f(t);
    return out;
  }
  const long mid = lo + (hi - lo) / 2;
  Value out = pairwise_sum<Value>(lo, mid, f);
  out += pairwise_sum<Value>(mid, hi, f);
  return out;
}

Eigen::VectorXd axis_points(double lo, double hi, int n) {
  Eigen::VectorXd out(n);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out(i) = lo + i * h;
  out(n - 1) = hi;
  return out;
}

Eigen::VectorXd trapezoid_weights(double lo, double hi, int n) {
  const double h = (hi - lo) / (n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) = h / 2.0;
  w(n - 1) = h / 2.0;
  return w;
}

// Trapezoid weights of the stride-2 subsampling (every second node plus
// the final one), zero on the skipped nodes, so coarse and fine
// quadratures share one summation tree.
Eigen::VectorXd coarse_weights(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  std::vector<int> kept;
  for (int i = 0; i < n; i += 2) kept.push_back(i);
  if (kept.back() != n - 1) kept.push_back(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (std::size_t a = 0; a + 1 < kept.size(); ++a) {
    const double step = x(kept[a + 1]) - x(kept[a]);
    w(kept[a]) += step / 2.0;
    w(kept[a + 1]) += step / 2.0;
  }
  return w;
}

void validate_grid(const PhaseGrid& grid) {
  const bool shape_ok =
      grid.n_q >= 2 && grid.n_p >= 2 &&
      grid.values.rows() == grid.n_q && grid.values.cols() == grid.n_p;
  const bool extent_ok =
      std::isfinite(grid.q_min) && std::isfinite(grid.q_max) &&
      std::isfinite(grid.p_min) && std::isfinite(grid.p_max) &&
      grid.q_min < grid.q_max && grid.p_min < grid.p_max;
  if (!shape_ok || !extent_ok || !grid.values.allFinite()) {
    throw InvalidArgument("phase grid: malformed extent, size, or values");
  }
}

void require_normalized(const PhaseGrid& grid) {
  const double defect = std::abs(grid_mass(grid) - 1.0);
  if (!(defect < kGridNormTol)) {
    throw InvalidArgument("phase grid: quadrature mass is not 1 to 1e-6");
  }
}

double integer_power(double base, int exponent) {
  double out = 1.0;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

// One monomial moment Int W q^eq p^ep with caller-supplied axis weights.
double weighted_moment(const PhaseGrid& grid, const Eigen::VectorXd& wq,
                       const Eigen::VectorXd& wp, int eq, int ep) {
  const Eigen::VectorXd qs = axis_points(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd ps = axis_points(grid.p_min, grid.p_max, grid.n_p);
  Eigen::VectorXd fq(grid.n_q);
  Eigen::VectorXd fp(grid.n_p);
  for (int i = 0; i < grid.n_q; ++i) fq(i) = wq(i) * integer_power(qs(i), eq);
  for (int j = 0; j < grid.n_p; ++j) fp(j) = wp(j) * integer_power(ps(j), ep);
  const long n_p = grid.n_p;
  const auto& values = grid.values;
  return pairwise_sum<double>(
      0, static_cast<long>(grid.n_q) * n_p, [&](long t) {
        const long i = t / n_p;
        const long j = t % n_p;
        return fq(i) * fp(j) * values(i, j);
      });
}

}  // namespace

std::complex<double> wigner_kernel(int m, int n, double q, double p,
                                   HbarConfig hbar) {
  if (m < 0 || n < 0) {
    throw InvalidArgument("wigner_kernel: negative oscillator labels");
  }
  if (!std::isfinite(q) || !std::isfinite(p)) {
    throw InvalidArgument("wigner_kernel: nonfinite phase-space point");
  }
  if (m < n) return std::conj(wigner_kernel(n, m, q, p, hbar));

  const double hb = hbar.value();
  const double inv_pi_h = 1.0 / (M_PI * hb);
  const int k = m - n;
  const double abs2 = (q * q + p * p) / (2.0 * hb);
  const double x = 4.0 * abs2;
  const double aabs = std::sqrt(abs2);
  if (aabs == 0.0) {
    if (k != 0) return 0.0;
    return (n % 2 == 0 ? inv_pi_h : -inv_pi_h);
  }

  // T_j = (2|alpha|)^k e^{-x/2} L_j^k(x): the prefactor rides on the
  // seeds, so the linear recurrence never sees the bare Laguerre growth.
  const double t0 = std::exp(k * std::log(2.0 * aabs) - x / 2.0);
  double t = t0;
  double t_prev = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double next =
        ((2.0 * j - 1.0 + k - x) * t - (j - 1.0 + k) * t_prev) / j;
    t_prev = t;
    t = next;
  }

  const double rfac =
      std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
  const std::complex<double> phase{q / (aabs * std::sqrt(2.0 * hb)),
                                   -p / (aabs * std::sqrt(2.0 * hb))};
  const std::complex<double> phase_k = std::pow(phase, k);
  const double sign = (n % 2 == 0 ? 1.0 : -1.0);
  return inv_pi_h * sign * rfac * t * phase_k;
}

PhaseGrid wigner_grid(const DensityMatrix& rho, const WignerGridSpec& spec) {
  if (spec.n_q < 2 || spec.n_p < 2) {
    throw InvalidArgument("wigner_grid: need at least 2 points per axis");
  }

  const MomentTable low = compute_moments(rho, 2);
  const double mean_q = low.at({1, 1});
  const double mean_p = low.at({1, -1});
  const Eigen::Matrix2d cov = quadrature_covariance(low);
  const double span_q = kWignerSigmaSpan * std::sqrt(cov(0, 0));
  const double span_p = kWignerSigmaSpan * std::sqrt(cov(1, 1));

  PhaseGrid grid;
  grid.hbar = rho.hbar;
  grid.n_q = spec.n_q;
  grid.n_p = spec.n_p;
  if (spec.extent.has_value()) {
    const GridExtent& e = *spec.extent;
    const bool finite = std::isfinite(e.q_min) && std::isfinite(e.q_max) &&
                        std::isfinite(e.p_min) && std::isfinite(e.p_max);
    if (!finite || e.q_min >= e.q_max || e.p_min >= e.p_max) {
      throw InvalidArgument("wigner_grid: malformed explicit extent");
    }
    const double floor_q =
        kWignerSigmaFloor * std::sqrt(cov(0, 0));
    const double floor_p =
        kWignerSigmaFloor * std::sqrt(cov(1, 1));
    if (e.q_min > mean_q - floor_q || e.q_max < mean_q + floor_q ||
        e.p_min > mean_p - floor_p || e.p_max < mean_p + floor_p) {
      throw GridTooSmall(
          "wigner_grid: extent does not cover mean +- 6 sigma");
    }
    grid.q_min = e.q_min;
    grid.q_max = e.q_max;
    grid.p_min = e.p_min;
    grid.p_max = e.p_max;
  } else {
    grid.q_min = mean_q - span_q;
    grid.q_max = mean_q + span_q;
    grid.p_min = mean_p - span_p;
    grid.p_max = mean_p + span_p;
  }

  const Eigen::MatrixXcd& dm = rho.op.matrix();
  const int cutoff = rho.op.cutoff();
  // Effective band: the trailing rows/columns whose entries all sit
  // below kRhoSkipTol contribute nothing representable to W.
  int d_eff = 0;
  for (int i = 0; i < cutoff; ++i) {
    for (int j = 0; j < cutoff; ++j) {
      if (std::abs(dm(i, j)) > kRhoSkipTol) {
        d_eff = std::max(d_eff, std::max(i, j) + 1);
      }
    }
  }
  d_eff = std::max(d_eff, 1);

  std::vector<double> offdiag_max(d_eff, 0.0);
  for (int k = 0; k < d_eff; ++k) {
    for (int n = 0; n + k < d_eff; ++n) {
      offdiag_max[k] = std::max(offdiag_max[k], std::abs(dm(n + k, n)));
    }
  }
  Eigen::MatrixXd rfac = Eigen::MatrixXd::Zero(d_eff, d_eff);
  for (int k = 0; k < d_eff; ++k) {
    for (int n = 0; n + k < d_eff; ++n) {
      rfac(k, n) =
          std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + k + 1.0)));
    }
  }

  const double hb = rho.hbar.value();
  const double inv_pi_h = 1.0 / (M_PI * hb);
  const Eigen::VectorXd qs = axis_points(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd ps = axis_points(grid.p_min, grid.p_max, grid.n_p);
  grid.values.resize(grid.n_q, grid.n_p);

  for (int i = 0; i < grid.n_q; ++i) {
    const double q = qs(i);
    for (int j = 0; j < grid.n_p; ++j) {
      const double p = ps(j);
      const double abs2 = (q * q + p * p) / (2.0 * hb);
      const double x = 4.0 * abs2;
      const double aabs = std::sqrt(abs2);
      const std::complex<double> phase =
          aabs == 0.0 ? std::complex<double>{1.0, 0.0}
                      : std::complex<double>{q / (aabs * std::sqrt(2.0 * hb)),
                                             -p / (aabs * std::sqrt(2.0 * hb))};
      std::complex<double> acc{0.0, 0.0};
      std::complex<double> phase_k{1.0, 0.0};
      for (int k = 0; k < d_eff; ++k, phase_k *= phase) {
        if (offdiag_max[k] <= kRhoSkipTol) continue;
        if (aabs == 0.0 && k > 0) break;
        const double t0 =
            k == 0 ? std::exp(-x / 2.0)
                   : std::exp(k * std::log(2.0 * aabs) - x / 2.0);
        double t = t0;
        double t_prev = 0.0;
        double sign = 1.0;
        for (int n = 0; n + k < d_eff; ++n, sign = -sign) {
          if (n == 1) {
            t_prev = t;
            t = (1.0 + k - x) * t0;
          } else if (n >= 2) {
            const double next =
                ((2.0 * n - 1.0 + k - x) * t - (n - 1.0 + k) * t_prev) / n;
            t_prev = t;
            t = next;
          }
          const std::complex<double> kernel =
              inv_pi_h * sign * rfac(k, n) * t * phase_k;
          if (k == 0) {
            acc += dm(n, n) * kernel;
          } else {
            acc += dm(n + k, n) * kernel + dm(n, n + k) * std::conj(kernel);
          }
        }
      }
      if (std::abs(acc.imag()) > kWignerImagTol) {
        throw NumericalFailure(
            "wigner_grid: imaginary residue above 1e-9 in the kernel sum");
      }
      grid.values(i, j) = acc.real();
    }
  }

  grid.norm_defect = std::abs(grid_mass(grid) - 1.0);
  return grid;
}

double grid_mass(const PhaseGrid& grid) {
  validate_grid(grid);
  const Eigen::VectorXd wq =
      trapezoid_weights(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd wp =
      trapezoid_weights(grid.p_min, grid.p_max, grid.n_p);
  return weighted_moment(grid, wq, wp, 0, 0);
}

MomentTable quadrature_moments(const PhaseGrid& grid, int two_j_max) {
  validate_grid(grid);
  require_normalized(grid);
  if (two_j_max < 0) {
    throw InvalidArgument("quadrature_moments: negative moment order");
  }
  const Eigen::VectorXd wq =
      trapezoid_weights(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd wp =
      trapezoid_weights(grid.p_min, grid.p_max, grid.n_p);

  MomentTable table;
  table.hbar = grid.hbar;
  table.two_j_max = two_j_max;
  table.provenance = MomentProvenance::phase_space_quadrature;
  for (const MonomialIndex idx : moment_indices(two_j_max)) {
    const int eq = (idx.two_j + idx.two_m) / 2;
    const int ep = (idx.two_j - idx.two_m) / 2;
    table.values[idx] = weighted_moment(grid, wq, wp, eq, ep);
  }
  return table;
}

OverlapResult overlap(const PhaseGrid& g1, const PhaseGrid& g2) {
  validate_grid(g1);
  validate_grid(g2);
  const bool same =
      g1.q_min == g2.q_min && g1.q_max == g2.q_max &&
      g1.p_min == g2.p_min && g1.p_max == g2.p_max &&
      g1.n_q == g2.n_q && g1.n_p == g2.n_p &&
      g1.hbar.value() == g2.hbar.value();
  if (!same) {
    throw InvalidArgument("overlap: grids differ in extent, size, or hbar");
  }
  require_normalized(g1);
  require_normalized(g2);

  const Eigen::VectorXd wq = trapezoid_weights(g1.q_min, g1.q_max, g1.n_q);
  const Eigen::VectorXd wp = trapezoid_weights(g1.p_min, g1.p_max, g1.n_p);
  const long n_p = g1.n_p;
  const double raw = pairwise_sum<double>(
      0, static_cast<long>(g1.n_q) * n_p, [&](long t) {
        const long i = t / n_p;
        const long j = t % n_p;
        return wq(i) * wp(j) * g1.values(i, j) * g2.values(i, j);
      });
  return {raw, 2.0 * M_PI * g1.hbar.value() * raw};
}

Eigen::Vector3d lightlike_vector(double q, double p, double mean_q,
                                 double mean_p) {
  const double dq = q - mean_q;
  const double dp = p - mean_p;
  return {(dq * dq + dp * dp) / 2.0, (dq * dq - dp * dp) / 2.0, dq * dp};
}

LorentzAverage lorentz_average(const PhaseGrid& grid, HbarConfig hbar) {
  validate_grid(grid);
  require_normalized(grid);
  if (grid.hbar.value() != hbar.value()) {
    throw InvalidArgument("lorentz_average: hbar does not match the grid");
  }

  const MomentTable table = quadrature_moments(grid, 2);
  LorentzAverage out;
  out.mean_q = table.at({1, 1});
  out.mean_p = table.at({1, -1});

  const Eigen::VectorXd wq =
      trapezoid_weights(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd wp =
      trapezoid_weights(grid.p_min, grid.p_max, grid.n_p);
  const Eigen::VectorXd qs = axis_points(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd ps = axis_points(grid.p_min, grid.p_max, grid.n_p);
  const long n_p = grid.n_p;
  out.x_mu = pairwise_sum<Eigen::Vector3d>(
      0, static_cast<long>(grid.n_q) * n_p, [&](long t) -> Eigen::Vector3d {
        const long i = t / n_p;
        const long j = t % n_p;
        return wq(i) * wp(j) * grid.values(i, j) *
               lightlike_vector(qs(i), ps(j), out.mean_q, out.mean_p);
      });

  out.invariant = out.x_mu(0) * out.x_mu(0) - out.x_mu(1) * out.x_mu(1) -
                  out.x_mu(2) * out.x_mu(2);
  const double hb = hbar.value();
  const double bound = hb * hb / 4.0;
  if (out.x_mu(0) > 0.0 && out.invariant >= bound * (1.0 - 1e-6)) {
    out.classification = LorentzClass::timelike_positive_above_bound;
  } else if (out.x_mu(0) > 0.0 && out.invariant > 0.0) {
    out.classification = LorentzClass::timelike_positive_below_bound;
  } else {
    out.classification = LorentzClass::other;
  }
  return out;
}

Eigen::Matrix<std::complex<double>, 5, 5> wigner_correction_matrix(
    double q, double p, HbarConfig hbar) {
  if (!std::isfinite(q) || !std::isfinite(p)) {
    throw InvalidArgument(
        "wigner_correction_matrix: nonfinite phase-space point");
  }
  const double hb = hbar.value();
  Eigen::Matrix<std::complex<double>, 5, 5> c;
  c.setZero();
  // Star-product corrections (T_a * T_b) - T_a T_b over (q, p, q2, qp,
  // p2): first order (i hbar / 2) {T_a, T_b}, second order fills the
  // constant real entries. Upper triangle; the lower is the exact
  // conjugate so the assembled moment matrix splits cleanly.
  c(0, 1) = kI * hb / 2.0;
  c(0, 3) = kI * hb * q / 2.0;
  c(0, 4) = kI * hb * p;
  c(1, 2) = -kI * hb * q;
  c(1, 3) = -kI * hb * p / 2.0;
  c(2, 3) = kI * hb * q * q;
  c(2, 4) = std::complex<double>{-hb * hb / 2.0, 2.0 * hb * q * p};
  c(3, 3) = hb * hb / 4.0;
  c(3, 4) = kI * hb * p * p;
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      c(b, a) = std::conj(c(a, b));
    }
  }
  return c;
}

HierarchyMatrix omega1_wigner(const PhaseGrid& grid, HbarConfig hbar) {
  validate_grid(grid);
  require_normalized(grid);
  if (grid.hbar.value() != hbar.value()) {
    throw InvalidArgument("omega1_wigner: hbar does not match the grid");
  }

  const Eigen::VectorXd qs = axis_points(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd ps = axis_points(grid.p_min, grid.p_max, grid.n_p);
  const Eigen::VectorXd wq =
      trapezoid_weights(grid.q_min, grid.q_max, grid.n_q);
  const Eigen::VectorXd wp =
      trapezoid_weights(grid.p_min, grid.p_max, grid.n_p);
  const Eigen::VectorXd wq_coarse = coarse_weights(qs);
  const Eigen::VectorXd wp_coarse = coarse_weights(ps);

  // Convergence gate: the five fourth moments must be indifferent to
  // dropping every second node, or the resolution (or extent) is not
  // carrying the integrands yet.
  for (int two_m = 4; two_m >= -4; two_m -= 2) {
    const int eq = (4 + two_m) / 2;
    const int ep = (4 - two_m) / 2;
    const double fine = weighted_moment(grid, wq, wp, eq, ep);
    const double coarse =
        weighted_moment(grid, wq_coarse, wp_coarse, eq, ep);
    if (std::abs(fine - coarse) >
        kGridConvTol * std::max(1.0, std::abs(fine))) {
      throw GridTooSmall(
          "omega1_wigner: fourth moments not quadrature-converged");
    }
  }

  const MomentTable table = quadrature_moments(grid, 4);
  const double m_q = table.at({1, 1});
  const double m_p = table.at({1, -1});
  const double m_q2 = table.at({2, 2});
  const double m_qp = table.at({2, 0});
  const double m_p2 = table.at({2, -2});

  using Matrix5cd = Eigen::Matrix<std::complex<double>, 5, 5>;
  const long n_p = grid.n_p;
  const Matrix5cd omega = pairwise_sum<Matrix5cd>(
      0, static_cast<long>(grid.n_q) * n_p, [&](long t) -> Matrix5cd {
        const long i = t / n_p;
        const long j = t % n_p;
        const double q = qs(i);
        const double p = ps(j);
        Eigen::Matrix<double, 5, 1> x;
        x << q - m_q, p - m_p, q * q - m_q2, q * p - m_qp, p * p - m_p2;
        const double weight = wq(i) * wp(j) * grid.values(i, j);
        Matrix5cd cell = (x * x.transpose()).cast<std::complex<double>>();
        cell += wigner_correction_matrix(q, p, hbar);
        return weight * cell;
      });

  HierarchyMatrix out;
  out.two_J = 2;
  out.index_order = hierarchy_indices(2);
  out.omega_tilde = omega;
  out.v_part = omega.real();
  out.w_part = 2.0 * omega.imag();
  out.source_moments = table;
  return out;
}

void write_grid_csv(const PhaseGrid& grid, std::ostream& out) {
  validate_grid(grid);
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.precision(17);
  out << grid.q_min << ',' << grid.q_max << ',' << grid.p_min << ','
      << grid.p_max << ',' << grid.n_q << ',' << grid.n_p << '\n';
  for (int i = 0; i < grid.n_q; ++i) {
    for (int j = 0; j < grid.n_p; ++j) {
      if (j > 0) out << ',';
      out << grid.values(i, j);
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace momhier
