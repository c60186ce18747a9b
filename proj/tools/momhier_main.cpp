#include <cmath>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "momhier/errors.hpp"
#include "momhier/job.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Uncertainty checks on single-mode bosonic states through moment "
      "matrices"};
  app.set_version_flag("--version",
                       std::string("momhier ") + momhier::kToolVersion);
  app.require_subcommand(1);

  std::string job_path;
  std::optional<double> tol;
  std::optional<double> hbar;
  std::optional<double> max_j;
  std::optional<int> cutoff;
  std::optional<std::string> format;
  std::optional<std::string> wigner_grid;

  CLI::App* check =
      app.add_subcommand("check", "Run the checks a job file describes");
  check->add_option("file", job_path, "Job description (JSON)")->required();
  check->add_option("--max-J", max_j,
                    "Reject hierarchy checks deeper than this J");
  check->add_option("--tol", tol, "Override the eigenvalue tolerance")
      ->check(CLI::PositiveNumber);
  check->add_option("--cutoff", cutoff, "Override the basis cutoff")
      ->check(CLI::Range(2, 1 << 14));
  check->add_option("--format", format, "Report rendering")
      ->check(CLI::IsMember({"text", "json"}));
  check->add_option("--wigner-grid", wigner_grid,
                    "Grid size NxM for wigner cross checks");
  check->add_option("--hbar", hbar, "Override the value of hbar")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    momhier::JobSpec job = momhier::parse_job_file(job_path);
    if (tol) job.tolerances.psd = *tol;
    if (cutoff) job.cutoff = *cutoff;
    if (hbar) job.state.hbar = momhier::HbarConfig(*hbar);
    if (format) {
      job.format = (*format == "json") ? momhier::ReportFormat::structured
                                       : momhier::ReportFormat::text;
    }
    if (wigner_grid) {
      static const std::regex pattern(R"((\d+)x(\d+))");
      std::smatch m;
      if (!std::regex_match(*wigner_grid, m, pattern)) {
        std::cerr << "error: --wigner-grid expects NxM, e.g. 257x257\n";
        return 2;
      }
      const int n_q = std::stoi(m[1]);
      const int n_p = std::stoi(m[2]);
      if (n_q < 2 || n_p < 2) {
        std::cerr << "error: --wigner-grid sizes must be at least 2\n";
        return 2;
      }
      for (auto& c : job.checks) {
        if (auto* w = std::get_if<momhier::WignerCrossCheckSpec>(&c)) {
          w->grid.n_q = n_q;
          w->grid.n_p = n_p;
        }
      }
    }
    if (max_j) {
      const int cap = static_cast<int>(std::lround(2.0 * *max_j));
      if (std::abs(2.0 * *max_j - cap) > 1e-12 || cap < 1 || cap > 4) {
        std::cerr << "error: --max-J must be one of 0.5, 1, 1.5, 2\n";
        return 2;
      }
      for (const auto& c : job.checks) {
        const auto* h = std::get_if<momhier::HierarchyCheckSpec>(&c);
        if (h != nullptr && h->two_J > cap) {
          std::cerr << "error: job requests a hierarchy level beyond "
                       "--max-J\n";
          return 2;
        }
      }
    }

    const momhier::Report report = momhier::run_job(job);
    if (job.format == momhier::ReportFormat::structured) {
      std::cout << report.document.dump(2) << '\n';
    } else {
      std::cout << momhier::render_text(report);
    }
    return momhier::exit_code(report);
  } catch (const momhier::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const momhier::InvalidState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
