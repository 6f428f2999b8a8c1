#include "accurt/cli/report.hpp"

#include <cstdio>

namespace accurt::cli {

namespace {

std::string format_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_report(std::ostream& out, const RunReport& report, const ReportContext& context) {
  out << "# accurt run report\n";
  out << "# true_error is the absolute 2-norm ||y - y_ref||; starting vectors have unit norm\n";
  out << "[run]\n";
  out << "problem=" << context.problem << '\n';
  out << "n=" << context.n << '\n';
  out << "method=" << to_string(report.mode) << '\n';
  out << "backend=" << to_string(report.backend) << '\n';
  out << "t=" << format_real(report.t) << '\n';
  out << "tol=" << format_real(report.tol) << '\n';
  out << "k_max=" << report.k_max << '\n';
  out << "initial_gamma=" << format_real(report.initial_gamma) << '\n';

  for (std::size_t i = 0; i < report.restarts.size(); ++i) {
    const RestartRecord& r = report.restarts[i];
    out << "[restart " << i + 1 << "]\n";
    out << "gamma=" << format_real(r.gamma) << '\n';
    out << "t_before=" << format_real(r.t_before) << '\n';
    out << "delta=" << format_real(r.delta) << '\n';
    out << "steps=" << r.steps << '\n';
    out << "inner_iterations=" << r.inner_iterations << '\n';
    out << "max_inner_per_step=" << r.max_inner_per_step << '\n';
    out << "residual_min=" << format_real(r.residual_min) << '\n';
    out << "scan_end=" << format_real(r.scan_end) << '\n';
    out << "gamma_halved=" << boolean(r.gamma_halved) << '\n';
    out << "accuracy_warning=" << boolean(r.accuracy_warning) << '\n';
    out << "converged=" << boolean(r.converged) << '\n';
    out << "solver=" << to_string(r.solver) << '\n';
  }

  out << "[totals]\n";
  out << "restarts=" << report.restarts.size() << '\n';
  out << "steps=" << report.total_steps << '\n';
  out << "inner_iterations=" << report.total_inner_iterations << '\n';
  for (std::size_t j = 0; j < report.final_checkpoints.size(); ++j) {
    out << "checkpoint_residual_" << j + 1 << '=' << format_real(report.final_checkpoints[j])
        << '\n';
  }
  out << "delta_sum=" << format_real(report.delta_sum) << '\n';
  out << "t_remaining=" << format_real(report.t_remaining) << '\n';
  out << "final_gamma=" << format_real(report.final_gamma) << '\n';
  out << "lu_factorizations=" << report.lu_factorizations << '\n';
  out << "ilut_factorizations=" << report.ilut_factorizations << '\n';
  out << "accuracy_warning=" << boolean(report.accuracy_warning) << '\n';
  out << "converged=" << boolean(report.converged) << '\n';
  if (context.true_error) {
    out << "oracle=" << context.oracle_method << '\n';
    out << "true_error=" << format_real(*context.true_error) << '\n';
  }

  out << "[solution]\n";
  out << "size=" << report.solution.size() << '\n';
  for (Index i = 0; i < report.solution.size(); ++i) out << format_real(report.solution(i)) << '\n';
}

std::string table_header() { return "tolerance, error / steps (inner iterations)"; }

std::string table_row(const RunReport& report, const std::optional<double>& true_error) {
  return format_short(report.tol) + ", " + (true_error ? format_short(*true_error) : "n/a") +
         " / " + std::to_string(report.total_steps) + " (" +
         std::to_string(report.total_inner_iterations) + ")";
}

}  // namespace accurt::cli
