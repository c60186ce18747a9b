#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "momhier/covariance.hpp"
#include "momhier/states.hpp"
#include "momhier/wigner.hpp"

namespace momhier {

// Tolerances a job may override. psd bounds eigenvalue slack in every
// positivity verdict; the route tolerances bound the quadrature-vs-trace
// agreement in the wigner cross check (per-moment and per-matrix-entry).
struct JobTolerances {
  double psd = 1e-9;
  double moment_route = 1e-6;
  double matrix_route = 1e-5;
};

enum class ReportFormat { text, structured };

struct SrUpCheckSpec {};

struct HierarchyCheckSpec {
  int two_J = 2;  // in {1, 2, 3, 4}
};

struct FourthOrderCheckSpec {};

struct WignerCrossCheckSpec {
  WignerGridSpec grid;
};

// Transforms the state's moments by symplectic probes and verifies that
// every verdict and invariant survives. Probes are drawn from the seed
// unless a fixed element is given.
struct CovarianceProbeSpec {
  int count = 10;
  std::uint32_t seed = 20240816u;
  std::optional<Sp2Element> fixed;
};

using CheckSpec = std::variant<SrUpCheckSpec, HierarchyCheckSpec,
                               FourthOrderCheckSpec, WignerCrossCheckSpec,
                               CovarianceProbeSpec>;

struct JobSpec {
  StateSpec state;
  std::vector<CheckSpec> checks;  // nonempty, run in declared order
  JobTolerances tolerances;
  ReportFormat format = ReportFormat::text;
  // Basis size named by the file or the command line. When absent,
  // parametric states get 64 and explicit matrices get their dimension
  // plus 2x the deepest moment order any check consumes, so truncated
  // traces stay exact.
  std::optional<int> cutoff;
};

// Largest moment label two_j the check reads from the state.
int required_two_j(const CheckSpec& check);

// The cutoff run_job will build the state at.
int resolve_cutoff(const JobSpec& job);

// Strict parse of the JSON job document: unknown keys, wrong types, and
// out-of-range values are rejected with the offending path in the
// message. Throws ParseError.
JobSpec parse_job(const std::string& text);
JobSpec parse_job_file(const std::string& path);

// Outcome document plus the flags the exit code is derived from. The
// document layout is stable (schema-version 1) and its serialization is
// byte-identical across runs of the same JobSpec.
struct Report {
  nlohmann::ordered_json document;
  bool any_failed = false;
  bool any_input_error = false;
  bool any_numerical_error = false;
};

// Runs every check in order. A check that throws is recorded in the
// report (status "error" with an error class) without aborting the job.
Report run_job(const JobSpec& job);

// 0 all pass, 1 physical failure, 2 input error, 3 numerical error;
// input outranks numerical outranks failure.
int exit_code(const Report& report);

// Human-readable rendering of the report document.
std::string render_text(const Report& report);

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace momhier
