#pragma once

#include <complex>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "momhier/hierarchy.hpp"

namespace momhier {

// Quadrature mass must sit within this distance of 1 before a grid may
// feed any downstream operation.
inline constexpr double kGridNormTol = 1e-6;
// Fourth moments from the full grid and from its stride-2 subsampling
// must agree to this bound (times moment scale) or the grid is declared
// unconverged.
inline constexpr double kGridConvTol = 1e-6;
// Largest imaginary residue tolerated in the pointwise kernel sum.
inline constexpr double kWignerImagTol = 1e-9;
// Auto extents span the mean +- this many marginal deviations. Eight
// keeps the Gaussian tail of a fourth moment below ~5e-12 sigma^4; six
// leaves ~3e-6 sigma^4 outside, which breaks the 1e-6 route budget on
// thermal and squeezed states.
inline constexpr double kWignerSigmaSpan = 8.0;
// Explicit extents must cover at least this many marginal deviations;
// narrower boxes clip the state's bulk, not just its tail.
inline constexpr double kWignerSigmaFloor = 6.0;

struct GridExtent {
  double q_min = 0.0;
  double q_max = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
};

// Evaluation request for wigner_grid. Without an explicit extent the
// grid spans mean +- 6 sigma on each axis, estimated from the trace
// -route second moments.
struct WignerGridSpec {
  int n_q = 512;
  int n_p = 512;
  std::optional<GridExtent> extent;
};

// Uniform phase-space sampling W(q_i, p_j): row index = q, column
// index = p, both ascending, endpoints included. norm_defect records
// |quadrature mass - 1| measured at creation; every consumer recomputes
// the mass so hand-assembled grids face the same gate.
struct PhaseGrid {
  double q_min = 0.0;
  double q_max = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  int n_q = 0;
  int n_p = 0;
  HbarConfig hbar{};
  Eigen::MatrixXd values;
  double norm_defect = 0.0;
};

// Cross-kernel of oscillator eigenfunctions: the phase-space transform
// of |m><n| under the convention
//   K_mn(q, p) = (1/2 pi hbar) Int du psi_m(q - u/2) psi_n(q + u/2)
//                e^{i p u / hbar},
// evaluated in closed form through a scaled Laguerre recurrence that
// folds the Gaussian damping into the seeds (no overflow for any grid
// point; values beyond double range flush to zero along with the true
// kernel). K_nm is the complex conjugate of K_mn.
std::complex<double> wigner_kernel(int m, int n, double q, double p,
                                   HbarConfig hbar);

// Pointwise W(q,p) = sum_mn rho_mn K_mn over the state's numerically
// supported band (entries below 1e-18 are skipped). No Hermiticity
// shortcut is taken: the imaginary residue of the full sum is validated
// below kWignerImagTol at every point, then the real part is kept.
// An explicit extent must cover mean +- 6 sigma per axis or the call
// throws GridTooSmall; grids below 2x2 throw InvalidArgument.
PhaseGrid wigner_grid(const DensityMatrix& rho,
                      const WignerGridSpec& spec = {});

// Composite-trapezoid quadrature of W over the grid, reduced in
// row-major pairwise order (bit-reproducible).
double grid_mass(const PhaseGrid& grid);

// Moment table <T_jm> = Int W q^{j+m} p^{j-m} for every label with
// j <= j_max, tagged with quadrature provenance. The constant label
// stores the measured grid mass. Requires a normalized grid.
MomentTable quadrature_moments(const PhaseGrid& grid, int two_j_max);

// Int W W' and the same number scaled by 2 pi hbar. The defining
// transform normalizes Tr(rho rho') to 2 pi hbar Int W W'; the raw
// integral is kept alongside because the nonnegativity criterion is
// stated for it directly. Grids must agree in extent, size, and hbar.
struct OverlapResult {
  double raw = 0.0;
  double trace_scaled = 0.0;
};
OverlapResult overlap(const PhaseGrid& g1, const PhaseGrid& g2);

enum class LorentzClass {
  timelike_positive_above_bound,
  timelike_positive_below_bound,
  other,
};

// Grid means and the quadratic deviation three-vector
// x^mu = Int W X^mu with its invariant x.x = (x0)^2 - (x3)^2 - (x1)^2,
// classified against the bound hbar^2/4 (relative slack 1e-6 so exact
// saturation lands above the bound).
struct LorentzAverage {
  double mean_q = 0.0;
  double mean_p = 0.0;
  Eigen::Vector3d x_mu = Eigen::Vector3d::Zero();
  double invariant = 0.0;
  LorentzClass classification = LorentzClass::other;
};

// Pointwise deviation vector X^mu(q,p) in (0, 3, 1) component order:
// X0 = (dq^2 + dp^2)/2, X3 = (dq^2 - dp^2)/2, X1 = dq dp with
// dq = q - mean_q, dp = p - mean_p. Light-like by construction:
// X.X = 0 up to roundoff at every point.
Eigen::Vector3d lightlike_vector(double q, double p, double mean_q,
                                 double mean_p);

LorentzAverage lorentz_average(const PhaseGrid& grid, HbarConfig hbar);

// Quantum correction matrix C(q,p) added to the classical outer product
// in the order-1 moment matrix: C_ab = (T_a * T_b)(q,p) - T_a T_b under
// the phase-space star product, over the basis (q, p, q^2, qp, p^2).
// Hermitian pointwise; its real symmetric part is constant with lower
// 3x3 block -(hbar^2/4) g_K.
Eigen::Matrix<std::complex<double>, 5, 5> wigner_correction_matrix(
    double q, double p, HbarConfig hbar);

// Order-1 moment matrix assembled entirely from the grid:
// Int W (x x^T + C(q,p)) with x(q,p) the centered monomial deviations
// and means taken from the grid itself. Requires a normalized grid
// whose fourth moments are quadrature-converged (stride-2 agreement
// within kGridConvTol); otherwise throws GridTooSmall. The returned
// matrix carries the quadrature-route moment table as its source.
HierarchyMatrix omega1_wigner(const PhaseGrid& grid, HbarConfig hbar);

// CSV export: one header row "q_min,q_max,p_min,p_max,n_q,n_p" as
// numbers, then n_q rows of n_p comma-separated values (row = q
// ascending, column = p ascending), full double precision.
void write_grid_csv(const PhaseGrid& grid, std::ostream& out);

}  // namespace momhier
