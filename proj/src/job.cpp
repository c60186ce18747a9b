#include "momhier/job.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "momhier/errors.hpp"
#include "momhier/fourth_order.hpp"
#include "momhier/hierarchy.hpp"
#include "momhier/moments.hpp"
#include "momhier/monomial.hpp"

namespace momhier {
namespace {

using nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail_parse(const std::string& path,
                             const std::string& what) {
  throw ParseError(path + ": " + what);
}

void require_object(const ordered_json& v, const std::string& path) {
  if (!v.is_object()) fail_parse(path, "expected an object");
}

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail_parse(path + "/" + item.key(), "unknown key");
  }
}

const ordered_json& require_key(const ordered_json& obj,
                                const std::string& path, const char* key) {
  if (!obj.contains(key)) {
    fail_parse(path, std::string("missing required key \"") + key + "\"");
  }
  return obj.at(key);
}

double need_number(const ordered_json& v, const std::string& path) {
  if (!v.is_number()) fail_parse(path, "expected a number");
  return v.get<double>();
}

int need_int(const ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) fail_parse(path, "expected an integer");
  return v.get<int>();
}

std::string need_string(const ordered_json& v, const std::string& path) {
  if (!v.is_string()) fail_parse(path, "expected a string");
  return v.get<std::string>();
}

std::complex<double> need_complex(const ordered_json& v,
                                  const std::string& path) {
  if (!v.is_array() || v.size() != 2) {
    fail_parse(path, "expected a [re, im] pair");
  }
  return {need_number(v[0], path + "/0"), need_number(v[1], path + "/1")};
}

Eigen::MatrixXcd need_matrix(const ordered_json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    fail_parse(path, "expected a nonempty array of rows");
  }
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string row_path = path + "/" + std::to_string(i);
    const auto& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      fail_parse(row_path, "expected a row of the square matrix");
    }
    for (int j = 0; j < n; ++j) {
      m(i, j) = need_complex(row[j], row_path + "/" + std::to_string(j));
    }
  }
  return m;
}

void parse_state(const ordered_json& v, JobSpec& job) {
  require_object(v, "/state");
  const std::string kind =
      need_string(require_key(v, "/state", "kind"), "/state/kind");
  StateSpec& spec = job.state;
  if (kind == "fock") {
    reject_unknown_keys(v, "/state", {"kind", "cutoff", "hbar", "n"});
    const int n = need_int(require_key(v, "/state", "n"), "/state/n");
    if (n < 0) fail_parse("/state/n", "must be nonnegative");
    spec.kind = FockSpec{n};
  } else if (kind == "coherent") {
    reject_unknown_keys(v, "/state", {"kind", "cutoff", "hbar", "alpha"});
    spec.kind = CoherentSpec{
        need_complex(require_key(v, "/state", "alpha"), "/state/alpha")};
  } else if (kind == "thermal") {
    reject_unknown_keys(v, "/state",
                        {"kind", "cutoff", "hbar", "mean-occupation"});
    const double nbar =
        need_number(require_key(v, "/state", "mean-occupation"),
                    "/state/mean-occupation");
    if (!(nbar >= 0.0)) {
      fail_parse("/state/mean-occupation", "must be nonnegative");
    }
    spec.kind = ThermalSpec{nbar};
  } else if (kind == "squeezed") {
    reject_unknown_keys(v, "/state",
                        {"kind", "cutoff", "hbar", "strength", "angle"});
    SqueezedVacuumSpec sq;
    sq.strength = need_number(require_key(v, "/state", "strength"),
                              "/state/strength");
    if (v.contains("angle")) {
      sq.angle = need_number(v.at("angle"), "/state/angle");
    }
    spec.kind = sq;
  } else if (kind == "explicit") {
    reject_unknown_keys(v, "/state", {"kind", "cutoff", "hbar", "matrix"});
    spec.kind = ExplicitSpec{
        need_matrix(require_key(v, "/state", "matrix"), "/state/matrix")};
  } else {
    fail_parse("/state/kind", "unknown state kind \"" + kind + "\"");
  }
  if (v.contains("hbar")) {
    const double hb = need_number(v.at("hbar"), "/state/hbar");
    if (!(hb > 0.0) || !std::isfinite(hb)) {
      fail_parse("/state/hbar", "must be positive and finite");
    }
    spec.hbar = HbarConfig(hb);
  }
  if (v.contains("cutoff")) {
    const int c = need_int(v.at("cutoff"), "/state/cutoff");
    if (c < 2) fail_parse("/state/cutoff", "must be at least 2");
    job.cutoff = c;
  }
}

int parse_two_j(const ordered_json& v, const std::string& path) {
  const double j = need_number(v, path);
  const int two_j = static_cast<int>(std::lround(2.0 * j));
  if (std::abs(2.0 * j - two_j) > 1e-12 || two_j < 1 || two_j > 4) {
    fail_parse(path, "J must be one of 1/2, 1, 3/2, 2");
  }
  return two_j;
}

WignerGridSpec parse_grid(const ordered_json& v, const std::string& path) {
  require_object(v, path);
  reject_unknown_keys(v, path, {"n-q", "n-p", "extent"});
  WignerGridSpec grid;
  if (v.contains("n-q")) {
    grid.n_q = need_int(v.at("n-q"), path + "/n-q");
    if (grid.n_q < 2) fail_parse(path + "/n-q", "must be at least 2");
  }
  if (v.contains("n-p")) {
    grid.n_p = need_int(v.at("n-p"), path + "/n-p");
    if (grid.n_p < 2) fail_parse(path + "/n-p", "must be at least 2");
  }
  if (v.contains("extent")) {
    const auto& e = v.at("extent");
    if (!e.is_array() || e.size() != 4) {
      fail_parse(path + "/extent",
                 "expected [q-min, q-max, p-min, p-max]");
    }
    GridExtent box;
    box.q_min = need_number(e[0], path + "/extent/0");
    box.q_max = need_number(e[1], path + "/extent/1");
    box.p_min = need_number(e[2], path + "/extent/2");
    box.p_max = need_number(e[3], path + "/extent/3");
    grid.extent = box;
  }
  return grid;
}

CheckSpec parse_check(const ordered_json& v, const std::string& path) {
  require_object(v, path);
  const std::string kind =
      need_string(require_key(v, path, "kind"), path + "/kind");
  if (kind == "sr-up") {
    reject_unknown_keys(v, path, {"kind"});
    return SrUpCheckSpec{};
  }
  if (kind == "hierarchy") {
    reject_unknown_keys(v, path, {"kind", "J"});
    return HierarchyCheckSpec{
        parse_two_j(require_key(v, path, "J"), path + "/J")};
  }
  if (kind == "fourth-order") {
    reject_unknown_keys(v, path, {"kind"});
    return FourthOrderCheckSpec{};
  }
  if (kind == "wigner-cross-check") {
    reject_unknown_keys(v, path, {"kind", "grid"});
    WignerCrossCheckSpec w;
    if (v.contains("grid")) w.grid = parse_grid(v.at("grid"), path + "/grid");
    return w;
  }
  if (kind == "covariance-probe") {
    reject_unknown_keys(v, path, {"kind", "count", "seed", "s-matrix"});
    CovarianceProbeSpec probe;
    if (v.contains("s-matrix")) {
      if (v.contains("count")) {
        fail_parse(path, "give either s-matrix or count, not both");
      }
      const auto& e = v.at("s-matrix");
      if (!e.is_array() || e.size() != 2 || !e[0].is_array() ||
          !e[1].is_array() || e[0].size() != 2 || e[1].size() != 2) {
        fail_parse(path + "/s-matrix", "expected a 2x2 array of numbers");
      }
      const std::string mp = path + "/s-matrix";
      try {
        probe.fixed = Sp2Element(need_number(e[0][0], mp + "/0/0"),
                                 need_number(e[0][1], mp + "/0/1"),
                                 need_number(e[1][0], mp + "/1/0"),
                                 need_number(e[1][1], mp + "/1/1"));
      } catch (const ParseError&) {
        throw;
      } catch (const InvalidArgument& err) {
        fail_parse(mp, err.what());
      }
      probe.count = 1;
    }
    if (v.contains("count")) {
      probe.count = need_int(v.at("count"), path + "/count");
      if (probe.count < 1 || probe.count > 10000) {
        fail_parse(path + "/count", "must be between 1 and 10000");
      }
    }
    if (v.contains("seed")) {
      const int seed = need_int(v.at("seed"), path + "/seed");
      if (seed < 0) fail_parse(path + "/seed", "must be nonnegative");
      probe.seed = static_cast<std::uint32_t>(seed);
    }
    return probe;
  }
  fail_parse(path + "/kind", "unknown check kind \"" + kind + "\"");
}

void parse_tolerances(const ordered_json& v, JobTolerances& tol) {
  require_object(v, "/tolerances");
  reject_unknown_keys(v, "/tolerances",
                      {"psd", "moment-route", "matrix-route"});
  const auto read = [&](const char* key, double& slot) {
    if (!v.contains(key)) return;
    const std::string path = std::string("/tolerances/") + key;
    slot = need_number(v.at(key), path);
    if (!(slot > 0.0) || !std::isfinite(slot)) {
      fail_parse(path, "must be positive and finite");
    }
  };
  read("psd", tol.psd);
  read("moment-route", tol.moment_route);
  read("matrix-route", tol.matrix_route);
}

std::string j_label(int two_j) {
  switch (two_j) {
    case 1:
      return "1/2";
    case 2:
      return "1";
    case 3:
      return "3/2";
    default:
      return "2";
  }
}

const char* verdict_name(PsdVerdict v) {
  switch (v) {
    case PsdVerdict::positive_definite:
      return "positive-definite";
    case PsdVerdict::positive_semidefinite:
      return "positive-semidefinite";
    default:
      return "indefinite";
  }
}

const char* lorentz_name(LorentzClass c) {
  switch (c) {
    case LorentzClass::timelike_positive_above_bound:
      return "timelike-positive-above-bound";
    case LorentzClass::timelike_positive_below_bound:
      return "timelike-positive-below-bound";
    default:
      return "other";
  }
}

std::string kind_name(const CheckSpec& check) {
  return std::visit(
      overloaded{
          [](const SrUpCheckSpec&) { return std::string("sr-up"); },
          [](const HierarchyCheckSpec&) { return std::string("hierarchy"); },
          [](const FourthOrderCheckSpec&) {
            return std::string("fourth-order");
          },
          [](const WignerCrossCheckSpec&) {
            return std::string("wigner-cross-check");
          },
          [](const CovarianceProbeSpec&) {
            return std::string("covariance-probe");
          },
      },
      check);
}

ordered_json vec_json(const Eigen::Vector3d& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < 3; ++i) out.push_back(v(i));
  return out;
}

ordered_json dvec_json(const std::vector<double>& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

ordered_json describe_state(const StateSpec& spec, int cutoff) {
  ordered_json out;
  std::visit(
      overloaded{
          [&](const FockSpec& f) {
            out["kind"] = "fock";
            out["n"] = f.n;
          },
          [&](const CoherentSpec& c) {
            out["kind"] = "coherent";
            out["alpha"] = ordered_json::array(
                {c.alpha.real(), c.alpha.imag()});
          },
          [&](const ThermalSpec& t) {
            out["kind"] = "thermal";
            out["mean-occupation"] = t.mean_occupation;
          },
          [&](const SqueezedVacuumSpec& s) {
            out["kind"] = "squeezed";
            out["strength"] = s.strength;
            out["angle"] = s.angle;
          },
          [&](const ExplicitSpec& e) {
            out["kind"] = "explicit";
            out["dimension"] = static_cast<int>(e.matrix.rows());
          },
      },
      spec.kind);
  out["cutoff"] = cutoff;
  out["hbar"] = spec.hbar.value();
  return out;
}

struct RunContext {
  const DensityMatrix& rho;
  const MomentTable& table;
  const JobTolerances& tol;
};

struct CheckOutcome {
  bool pass = false;
  ordered_json payload;
};

CheckOutcome run_sr_up(const RunContext& ctx) {
  const auto result = sr_up_check(quadrature_covariance(ctx.table),
                                  ctx.rho.hbar);
  CheckOutcome out;
  out.pass = result.passes;
  out.payload["det-v"] = result.det_v;
  out.payload["bound"] = result.bound;
  out.payload["x"] = vec_json(result.x);
  out.payload["invariant"] = result.invariant;
  out.payload["saturated"] =
      std::abs(result.det_v - result.bound) <=
      1e-9 * std::max(1.0, std::abs(result.bound));
  return out;
}

CheckOutcome run_hierarchy(const HierarchyCheckSpec& spec,
                           const RunContext& ctx) {
  const auto h = build_omega_tilde(ctx.table, spec.two_J);
  const auto psd = check_psd(h.omega_tilde, ctx.tol.psd,
                             "order-" + j_label(spec.two_J));
  CheckOutcome out;
  out.pass = psd.verdict != PsdVerdict::indefinite;
  out.payload["J"] = j_label(spec.two_J);
  out.payload["dimension"] = psd.side;
  out.payload["verdict"] = verdict_name(psd.verdict);
  out.payload["min-eigenvalue"] = psd.min_eigenvalue;
  out.payload["eigenvalues"] = dvec_json(psd.eigenvalues);
  if (spec.two_J >= 2) {
    // Second route: reduce onto the next-lower order and report the
    // complement's verdict alongside the full-matrix one.
    const auto small = build_omega_tilde(ctx.table, spec.two_J - 1);
    const auto schur = schur_increment(small, h, ctx.tol.psd);
    ordered_json reduced;
    reduced["from-J"] = j_label(spec.two_J - 1);
    reduced["a-invertible"] = schur.a_invertible;
    reduced["a-rank"] = schur.a_rank;
    reduced["c2-norm"] = schur.c2_norm;
    reduced["complement-verdict"] =
        verdict_name(schur.complement_psd.verdict);
    reduced["complement-min-eigenvalue"] =
        schur.complement_psd.min_eigenvalue;
    out.payload["schur"] = reduced;
  }
  return out;
}

CheckOutcome run_fourth_order(const RunContext& ctx) {
  const auto verdict = fourth_order_check(ctx.table, ctx.tol.psd);
  CheckOutcome out;
  out.pass = verdict.passes;
  out.payload["eigenvalues"] = dvec_json(verdict.eigenvalues);
  out.payload["scs-diagonal"] = vec_json(verdict.scs_diagonal);
  out.payload["b-invariants"] = vec_json(verdict.b_invariants);
  out.payload["generic-a"] = verdict.generic_a;
  return out;
}

CheckOutcome run_wigner(const WignerCrossCheckSpec& spec,
                        const RunContext& ctx) {
  const auto grid = wigner_grid(ctx.rho, spec.grid);
  const auto quad = quadrature_moments(grid, 4);
  double moment_dev = 0.0;
  for (const auto& idx : moment_indices(4)) {
    moment_dev = std::max(moment_dev,
                          std::abs(quad.at(idx) - ctx.table.at(idx)));
  }
  const auto from_grid = omega1_wigner(grid, ctx.rho.hbar);
  const auto from_trace = build_omega_tilde(ctx.table, 2);
  const double matrix_dev =
      (from_grid.omega_tilde - from_trace.omega_tilde)
          .cwiseAbs()
          .maxCoeff();
  const auto avg = lorentz_average(grid, ctx.rho.hbar);

  CheckOutcome out;
  out.pass = grid.norm_defect < kGridNormTol &&
             moment_dev <= ctx.tol.moment_route &&
             matrix_dev <= ctx.tol.matrix_route;
  ordered_json box;
  box["q-min"] = grid.q_min;
  box["q-max"] = grid.q_max;
  box["p-min"] = grid.p_min;
  box["p-max"] = grid.p_max;
  box["n-q"] = grid.n_q;
  box["n-p"] = grid.n_p;
  out.payload["grid"] = box;
  out.payload["norm-defect"] = grid.norm_defect;
  out.payload["max-moment-deviation"] = moment_dev;
  out.payload["max-matrix-deviation"] = matrix_dev;
  ordered_json lorentz;
  lorentz["mean-q"] = avg.mean_q;
  lorentz["mean-p"] = avg.mean_p;
  lorentz["x"] = vec_json(avg.x_mu);
  lorentz["invariant"] = avg.invariant;
  lorentz["classification"] = lorentz_name(avg.classification);
  out.payload["lorentz"] = lorentz;
  return out;
}

CheckOutcome run_probe(const CovarianceProbeSpec& spec,
                       const RunContext& ctx) {
  const auto base_h = build_omega_tilde(ctx.table, 2);
  const auto base_psd =
      check_psd(base_h.omega_tilde, ctx.tol.psd, "probe-base");
  const auto base_fourth = fourth_order_check(ctx.table, ctx.tol.psd);
  Eigen::Vector3d base_scs = base_fourth.scs_diagonal;
  std::sort(base_scs.data(), base_scs.data() + 3);

  bool a_checked = true;
  Eigen::Vector3d base_a = Eigen::Vector3d::Zero();
  try {
    base_a = eff_pair(build_blocks(ctx.table, ctx.rho.hbar)).a_vector;
  } catch (const SingularBlock&) {
    a_checked = false;
  }

  std::vector<Sp2Element> probes;
  if (spec.fixed.has_value()) {
    probes.push_back(*spec.fixed);
  } else {
    std::mt19937 rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) probes.push_back(random_sp2(rng));
  }

  bool congruence_ok = true;
  bool hierarchy_agree = true;
  bool fourth_agree = true;
  double max_congruence = 0.0;
  double max_scs = 0.0;
  double max_a = 0.0;
  for (const auto& s : probes) {
    const auto congr = congruence_covariance_check(base_h, s);
    congruence_ok = congruence_ok && congr.psd_preserved;
    max_congruence = std::max(max_congruence, congr.max_deviation);

    const auto transformed = transform_moments(ctx.table, s);
    const auto t_psd = check_psd(build_omega_tilde(transformed, 2).omega_tilde,
                                 ctx.tol.psd, "probe-transformed");
    hierarchy_agree =
        hierarchy_agree &&
        (t_psd.verdict != PsdVerdict::indefinite) ==
            (base_psd.verdict != PsdVerdict::indefinite);

    const auto t_fourth = fourth_order_check(transformed, ctx.tol.psd);
    fourth_agree = fourth_agree && t_fourth.passes == base_fourth.passes;
    Eigen::Vector3d t_scs = t_fourth.scs_diagonal;
    std::sort(t_scs.data(), t_scs.data() + 3);
    const double scs_scale =
        std::max(1.0, base_scs.cwiseAbs().maxCoeff());
    max_scs = std::max(
        max_scs, (t_scs - base_scs).cwiseAbs().maxCoeff() / scs_scale);

    if (a_checked) {
      try {
        const Eigen::Vector3d moved =
            eff_pair(build_blocks(transformed, ctx.rho.hbar)).a_vector;
        const Eigen::Vector3d expected = lambda_of(s).matrix() * base_a;
        const double a_scale =
            std::max(1.0, expected.cwiseAbs().maxCoeff());
        max_a = std::max(
            max_a, (moved - expected).cwiseAbs().maxCoeff() / a_scale);
      } catch (const SingularBlock&) {
        // The transform drove the leading block singular; skip this probe.
      }
    }
  }

  CheckOutcome out;
  out.pass = congruence_ok && hierarchy_agree && fourth_agree &&
             max_scs <= 1e-8 && (!a_checked || max_a <= 1e-8);
  out.payload["count"] = static_cast<int>(probes.size());
  if (!spec.fixed.has_value()) {
    out.payload["seed"] = spec.seed;
  }
  out.payload["congruence-preserved"] = congruence_ok;
  out.payload["max-congruence-deviation"] = max_congruence;
  out.payload["hierarchy-verdicts-agree"] = hierarchy_agree;
  out.payload["fourth-order-verdicts-agree"] = fourth_agree;
  out.payload["max-scs-deviation"] = max_scs;
  out.payload["a-vector-checked"] = a_checked;
  if (a_checked) out.payload["max-a-vector-deviation"] = max_a;
  return out;
}

CheckOutcome run_one(const CheckSpec& check, const RunContext& ctx) {
  return std::visit(
      overloaded{
          [&](const SrUpCheckSpec&) { return run_sr_up(ctx); },
          [&](const HierarchyCheckSpec& h) { return run_hierarchy(h, ctx); },
          [&](const FourthOrderCheckSpec&) { return run_fourth_order(ctx); },
          [&](const WignerCrossCheckSpec& w) { return run_wigner(w, ctx); },
          [&](const CovarianceProbeSpec& p) { return run_probe(p, ctx); },
      },
      check);
}

std::string dump_number(const ordered_json& v) { return v.dump(); }

}  // namespace

int required_two_j(const CheckSpec& check) {
  return std::visit(
      overloaded{
          [](const SrUpCheckSpec&) { return 2; },
          [](const HierarchyCheckSpec& h) { return 2 * h.two_J; },
          [](const FourthOrderCheckSpec&) { return 4; },
          [](const WignerCrossCheckSpec&) { return 4; },
          [](const CovarianceProbeSpec&) { return 4; },
      },
      check);
}

int resolve_cutoff(const JobSpec& job) {
  if (job.cutoff.has_value()) return *job.cutoff;
  if (const auto* ex = std::get_if<ExplicitSpec>(&job.state.kind)) {
    int deepest = 2;
    for (const auto& check : job.checks) {
      deepest = std::max(deepest, required_two_j(check));
    }
    return static_cast<int>(ex->matrix.rows()) + 2 * deepest;
  }
  return 64;
}

JobSpec parse_job(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("invalid JSON: ") + err.what());
  }
  require_object(doc, "/");
  reject_unknown_keys(doc, "", {"state", "checks", "tolerances", "format"});

  JobSpec job;
  parse_state(require_key(doc, "/", "state"), job);

  const auto& checks = require_key(doc, "/", "checks");
  if (!checks.is_array() || checks.empty()) {
    fail_parse("/checks", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < checks.size(); ++i) {
    job.checks.push_back(
        parse_check(checks[i], "/checks/" + std::to_string(i)));
  }

  if (doc.contains("tolerances")) {
    parse_tolerances(doc.at("tolerances"), job.tolerances);
  }
  if (doc.contains("format")) {
    const std::string fmt = need_string(doc.at("format"), "/format");
    if (fmt == "text") {
      job.format = ReportFormat::text;
    } else if (fmt == "structured") {
      job.format = ReportFormat::structured;
    } else {
      fail_parse("/format", "expected \"text\" or \"structured\"");
    }
  }
  return job;
}

JobSpec parse_job_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError(path + ": cannot read job file");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  try {
    return parse_job(buffer.str());
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

Report run_job(const JobSpec& job) {
  if (job.checks.empty()) {
    throw InvalidArgument("job must declare at least one check");
  }
  Report report;
  ordered_json& doc = report.document;
  doc["schema-version"] = kSchemaVersion;
  ordered_json tool;
  tool["name"] = "momhier";
  tool["version"] = kToolVersion;
  doc["tool"] = tool;
  const int cutoff = resolve_cutoff(job);
  doc["state"] = describe_state(job.state, cutoff);
  ordered_json tol;
  tol["psd"] = job.tolerances.psd;
  tol["moment-route"] = job.tolerances.moment_route;
  tol["matrix-route"] = job.tolerances.matrix_route;
  doc["tolerances"] = tol;
  doc["checks"] = ordered_json::array();

  int deepest = 2;
  for (const auto& check : job.checks) {
    deepest = std::max(deepest, required_two_j(check));
  }

  // State and moment construction happen once; a failure here is
  // recorded on the state and every check is marked errored.
  std::optional<DensityMatrix> rho;
  std::optional<MomentTable> table;
  std::string state_error;
  std::string state_error_class;
  try {
    StateSpec resolved = job.state;
    resolved.cutoff = cutoff;
    rho.emplace(density_from_spec(resolved));
    table.emplace(compute_moments(*rho, deepest));
  } catch (const InvalidArgument& err) {
    state_error = err.what();
    state_error_class = "input";
  } catch (const InvalidState& err) {
    state_error = err.what();
    state_error_class = "input";
  } catch (const Error& err) {
    state_error = err.what();
    state_error_class = "numerical";
  }
  if (!table.has_value()) {
    doc["state"]["error"] = state_error;
    report.any_input_error = state_error_class == "input";
    report.any_numerical_error = state_error_class == "numerical";
  }

  for (const auto& check : job.checks) {
    ordered_json entry;
    entry["kind"] = kind_name(check);
    if (!table.has_value()) {
      entry["status"] = "error";
      entry["error-class"] = state_error_class;
      entry["error"] = "state construction failed: " + state_error;
    } else {
      const RunContext ctx{*rho, *table, job.tolerances};
      try {
        CheckOutcome outcome = run_one(check, ctx);
        entry["status"] = outcome.pass ? "pass" : "fail";
        report.any_failed = report.any_failed || !outcome.pass;
        for (auto& item : outcome.payload.items()) {
          entry[item.key()] = std::move(item.value());
        }
      } catch (const InvalidArgument& err) {
        entry["status"] = "error";
        entry["error-class"] = "input";
        entry["error"] = err.what();
        report.any_input_error = true;
      } catch (const InvalidState& err) {
        entry["status"] = "error";
        entry["error-class"] = "input";
        entry["error"] = err.what();
        report.any_input_error = true;
      } catch (const Error& err) {
        entry["status"] = "error";
        entry["error-class"] = "numerical";
        entry["error"] = err.what();
        report.any_numerical_error = true;
      }
    }
    doc["checks"].push_back(std::move(entry));
  }

  const bool any_error =
      report.any_input_error || report.any_numerical_error;
  doc["overall"] = any_error ? "error" : (report.any_failed ? "fail" : "pass");
  return report;
}

int exit_code(const Report& report) {
  if (report.any_input_error) return 2;
  if (report.any_numerical_error) return 3;
  if (report.any_failed) return 1;
  return 0;
}

std::string render_text(const Report& report) {
  const ordered_json& doc = report.document;
  std::ostringstream out;
  out << "momhier " << doc["tool"]["version"].get<std::string>()
      << " report (schema " << doc["schema-version"].get<int>() << ")\n";

  out << "state:";
  for (const auto& item : doc["state"].items()) {
    out << ' ' << item.key() << '=' << dump_number(item.value());
  }
  out << '\n';

  out << "tolerances:";
  for (const auto& item : doc["tolerances"].items()) {
    out << ' ' << item.key() << '=' << dump_number(item.value());
  }
  out << '\n';

  for (const auto& entry : doc["checks"]) {
    const std::string kind = entry["kind"].get<std::string>();
    const std::string status = entry["status"].get<std::string>();
    out << "check " << kind;
    if (entry.contains("J")) {
      out << " J=" << entry["J"].get<std::string>();
    }
    std::string upper = status;
    for (char& c : upper) c = static_cast<char>(std::toupper(c));
    out << ": " << upper;
    if (status == "error") {
      out << " (" << entry["error-class"].get<std::string>() << ": "
          << entry["error"].get<std::string>() << ")";
    } else if (kind == "sr-up") {
      out << " (det V = " << dump_number(entry["det-v"])
          << ", bound = " << dump_number(entry["bound"]);
      if (status == "pass" && entry["saturated"].get<bool>()) {
        out << ", saturated";
      }
      out << ")";
    } else if (kind == "hierarchy") {
      out << " (" << entry["verdict"].get<std::string>()
          << ", min eigenvalue = " << dump_number(entry["min-eigenvalue"])
          << ")";
    } else if (kind == "fourth-order") {
      out << " (eigenvalues = " << entry["eigenvalues"].dump()
          << ", generic A = "
          << (entry["generic-a"].get<bool>() ? "yes" : "no") << ")";
    } else if (kind == "wigner-cross-check") {
      out << " (norm defect = " << dump_number(entry["norm-defect"])
          << ", moment dev = "
          << dump_number(entry["max-moment-deviation"])
          << ", matrix dev = "
          << dump_number(entry["max-matrix-deviation"]) << ", "
          << entry["lorentz"]["classification"].get<std::string>() << ")";
    } else if (kind == "covariance-probe") {
      out << " (count = " << dump_number(entry["count"])
          << ", max scs dev = " << dump_number(entry["max-scs-deviation"])
          << ")";
    }
    out << '\n';
  }

  std::string overall = doc["overall"].get<std::string>();
  for (char& c : overall) c = static_cast<char>(std::toupper(c));
  out << "overall: " << overall << '\n';
  return out.str();
}

}  // namespace momhier
