#pragma once

#include <complex>
#include <variant>

#include <Eigen/Dense>

#include "momhier/fock.hpp"

namespace momhier {

// Number state |n>.
struct FockSpec {
  int n = 0;
};

// Displaced vacuum with amplitude alpha = (<q> + i <p>) / sqrt(2 hbar).
struct CoherentSpec {
  std::complex<double> alpha;
};

// Thermal mixture with mean occupation number >= 0.
struct ThermalSpec {
  double mean_occupation = 0.0;
};

// Squeezed vacuum. Convention: at angle 0 a positive strength r stretches
// the position variance to (hbar/2) e^{2r} and shrinks momentum to
// (hbar/2) e^{-2r}, so it matches the diagonal symplectic map
// diag(e^r, e^{-r}) applied to vacuum.
struct SqueezedVacuumSpec {
  double strength = 0.0;
  double angle = 0.0;
};

// Caller-supplied density matrix; validated, zero-padded up to the cutoff.
struct ExplicitSpec {
  Eigen::MatrixXcd matrix;
};

struct StateSpec {
  std::variant<FockSpec, CoherentSpec, ThermalSpec, SqueezedVacuumSpec,
               ExplicitSpec>
      kind;
  int cutoff = 64;
  HbarConfig hbar{};
};

// Density matrix on the truncated basis. Construct only through
// density_from_spec or validate_density, which guarantee: exact
// Hermiticity (symmetrized), unit trace after renormalization, and
// minimum eigenvalue >= -1e-9.
struct DensityMatrix {
  FockOperator op;
  HbarConfig hbar;
};

// Validation thresholds for declared density matrices.
inline constexpr double kDensityHermTol = 1e-8;
inline constexpr double kDensityTraceTol = 1e-8;
inline constexpr double kDensityEigTol = 1e-9;
// Maximum probability mass a closed-form state may lose to truncation.
inline constexpr double kStateTailTol = 1e-10;

// Checks Hermiticity (to kDensityHermTol), renormalizes the trace when it
// deviates by less than kDensityTraceTol (throws InvalidState otherwise),
// and requires the spectrum to sit above -kDensityEigTol. The stored
// matrix is exactly Hermitian.
DensityMatrix validate_density(Eigen::MatrixXcd rho, HbarConfig hbar);

// Builds the declared state at the spec's cutoff. Closed-form species
// throw CutoffTooSmall when the basis would drop more than kStateTailTol
// of probability mass; explicit matrices larger than the cutoff also
// throw CutoffTooSmall. The returned state is normalized.
DensityMatrix density_from_spec(const StateSpec& spec);

}  // namespace momhier
