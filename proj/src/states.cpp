#include "momhier/states.hpp"

#include <cmath>
#include <string>

#include "momhier/errors.hpp"

namespace momhier {

namespace {

DensityMatrix from_amplitudes(const Eigen::VectorXcd& amps, double kept,
                              const char* what, HbarConfig hbar) {
  if (kept < 1.0 - kStateTailTol) {
    throw CutoffTooSmall(std::string(what) + " loses probability mass " +
                         std::to_string(1.0 - kept) +
                         " to truncation; raise the cutoff");
  }
  Eigen::MatrixXcd rho = amps * amps.adjoint() / kept;
  return validate_density(std::move(rho), hbar);
}

DensityMatrix make_fock(const FockSpec& s, int cutoff, HbarConfig hbar) {
  if (s.n < 0) throw InvalidArgument("number state index must be >= 0");
  if (s.n >= cutoff) {
    throw CutoffTooSmall("number state " + std::to_string(s.n) +
                         " does not fit below cutoff " +
                         std::to_string(cutoff));
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  rho(s.n, s.n) = 1.0;
  return validate_density(std::move(rho), hbar);
}

DensityMatrix make_coherent(const CoherentSpec& s, int cutoff,
                            HbarConfig hbar) {
  if (!std::isfinite(s.alpha.real()) || !std::isfinite(s.alpha.imag())) {
    throw InvalidArgument("coherent amplitude must be finite");
  }
  Eigen::VectorXcd c(cutoff);
  c(0) = std::exp(-0.5 * std::norm(s.alpha));
  for (int k = 1; k < cutoff; ++k) {
    c(k) = c(k - 1) * s.alpha / std::sqrt(static_cast<double>(k));
  }
  return from_amplitudes(c, c.squaredNorm(), "coherent state", hbar);
}

DensityMatrix make_thermal(const ThermalSpec& s, int cutoff,
                           HbarConfig hbar) {
  const double nbar = s.mean_occupation;
  if (!std::isfinite(nbar) || nbar < 0.0) {
    throw InvalidArgument("mean occupation must be finite and >= 0");
  }
  const double ratio = nbar / (1.0 + nbar);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  double pk = 1.0 / (1.0 + nbar);
  double kept = 0.0;
  for (int k = 0; k < cutoff; ++k) {
    rho(k, k) = pk;
    kept += pk;
    pk *= ratio;
  }
  if (kept < 1.0 - kStateTailTol) {
    throw CutoffTooSmall("thermal state loses probability mass " +
                         std::to_string(1.0 - kept) +
                         " to truncation; raise the cutoff");
  }
  rho /= kept;
  return validate_density(std::move(rho), hbar);
}

DensityMatrix make_squeezed(const SqueezedVacuumSpec& s, int cutoff,
                            HbarConfig hbar) {
  if (!std::isfinite(s.strength) || !std::isfinite(s.angle)) {
    throw InvalidArgument("squeeze parameters must be finite");
  }
  // Even amplitudes c_{2k+2}/c_{2k} = e^{i angle} tanh(r)
  // sqrt((2k+1)(2k+2)) / (2(k+1)), seeded at 1/sqrt(cosh r). With this
  // sign, angle 0 and r > 0 stretch the position quadrature.
  const std::complex<double> step =
      std::polar(std::tanh(s.strength), s.angle);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(cutoff);
  c(0) = 1.0 / std::sqrt(std::cosh(s.strength));
  for (int k = 0; 2 * k + 2 < cutoff; ++k) {
    const double w = std::sqrt(static_cast<double>(2 * k + 1) *
                               static_cast<double>(2 * k + 2)) /
                     (2.0 * (k + 1));
    c(2 * k + 2) = c(2 * k) * step * w;
  }
  return from_amplitudes(c, c.squaredNorm(), "squeezed vacuum", hbar);
}

DensityMatrix make_explicit(const ExplicitSpec& s, int cutoff,
                            HbarConfig hbar) {
  const auto dim = s.matrix.rows();
  if (dim == 0 || s.matrix.cols() != dim) {
    throw InvalidArgument("explicit density matrix must be square");
  }
  if (dim > cutoff) {
    throw CutoffTooSmall("explicit density matrix of side " +
                         std::to_string(dim) + " exceeds cutoff " +
                         std::to_string(cutoff));
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  rho.topLeftCorner(dim, dim) = s.matrix;
  return validate_density(std::move(rho), hbar);
}

}  // namespace

DensityMatrix validate_density(Eigen::MatrixXcd rho, HbarConfig hbar) {
  const auto n = rho.rows();
  if (n < 2 || rho.cols() != n) {
    throw InvalidArgument("density matrix must be square with side >= 2");
  }
  if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
  const double herm_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > kDensityHermTol) {
    throw InvalidState("density matrix is not Hermitian: defect " +
                       std::to_string(herm_defect));
  }
  Eigen::MatrixXcd herm = (rho + rho.adjoint()) / 2.0;

  const double tr = herm.trace().real();
  if (std::abs(tr - 1.0) > kDensityTraceTol) {
    throw InvalidState("density matrix trace " + std::to_string(tr) +
                       " deviates from one beyond tolerance");
  }
  herm /= tr;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("eigensolver failed on a density matrix");
  }
  if (es.eigenvalues()(0) < -kDensityEigTol) {
    throw InvalidState("density matrix has eigenvalue " +
                       std::to_string(es.eigenvalues()(0)) +
                       " below the positivity tolerance");
  }
  const int band = static_cast<int>(n) - 1;
  return DensityMatrix{FockOperator(std::move(herm), band), hbar};
}

DensityMatrix density_from_spec(const StateSpec& spec) {
  if (spec.cutoff < 2) throw InvalidArgument("state cutoff must be >= 2");
  return std::visit(
      [&](const auto& s) -> DensityMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockSpec>) {
          return make_fock(s, spec.cutoff, spec.hbar);
        } else if constexpr (std::is_same_v<T, CoherentSpec>) {
          return make_coherent(s, spec.cutoff, spec.hbar);
        } else if constexpr (std::is_same_v<T, ThermalSpec>) {
          return make_thermal(s, spec.cutoff, spec.hbar);
        } else if constexpr (std::is_same_v<T, SqueezedVacuumSpec>) {
          return make_squeezed(s, spec.cutoff, spec.hbar);
        } else {
          return make_explicit(s, spec.cutoff, spec.hbar);
        }
      },
      spec.kind);
}

}  // namespace momhier
