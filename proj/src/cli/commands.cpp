#include "accurt/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

#include "accurt/cli/report.hpp"
#include "accurt/matrix_market.hpp"
#include "accurt/oracle.hpp"

namespace accurt::cli {

namespace {

constexpr Index kAutoOracleLimit = 20000;

std::ofstream open_output(const std::filesystem::path& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / name;
  std::ofstream file(path);
  if (!file) throw Error("cannot open " + path.string() + " for writing");
  return file;
}

std::optional<Reference> compute_reference(const RunConfig& config, const Problem& p) {
  switch (config.oracle) {
    case OracleChoice::none: return std::nullopt;
    case OracleChoice::dense:
      return reference_solution(p.a, p.v, config.t, ReferenceMethod::dense_expm);
    case OracleChoice::krylov:
      return reference_solution(p.a, p.v, config.t, ReferenceMethod::polynomial_krylov);
    case OracleChoice::automatic:
      if (p.a.size() > kAutoOracleLimit) return std::nullopt;
      return reference_solution(p.a, p.v, config.t);
  }
  return std::nullopt;
}

struct RunOutcome {
  int status = 1;
  std::optional<RunReport> report;
  std::optional<double> true_error;
};

RunOutcome execute(const RunConfig& config, const std::filesystem::path& out_dir,
                   std::ostream& out, std::ostream& err) {
  RunOutcome outcome;
  const Problem p = build_problem(config.problem);
  ReportContext context;
  context.problem = p.name;
  context.n = p.a.size();

  RunReport report;
  try {
    report = run(p.a, p.v, config.t, config.solver);
  } catch (const RunError& e) {
    err << "error: " << e.what() << '\n';
    auto file = open_output(out_dir, config.report_file);
    write_report(file, e.report(), context);
    outcome.report = e.report();
    return outcome;
  }

  if (const auto ref = compute_reference(config, p)) {
    context.true_error = true_error(report.solution, *ref);
    context.oracle_method = to_string(ref->method);
  }
  {
    auto file = open_output(out_dir, config.report_file);
    write_report(file, report, context);
  }
  const std::string row = table_row(report, context.true_error);
  {
    auto file = open_output(out_dir, config.table_file);
    file << table_header() << '\n' << row << '\n';
  }
  out << table_header() << '\n' << row << '\n';
  if (report.accuracy_warning) {
    err << "warning: no restart point met the tolerance; accuracy is not guaranteed\n";
  }
  outcome.status = report.accuracy_warning ? 2 : 0;
  outcome.true_error = context.true_error;
  outcome.report = std::move(report);
  return outcome;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] { return execute(config, out_dir, out, err).status; });
}

ResidualSamples residual_curve(const SparseMatrix& a, const Vector& v, double t, RestartMode mode,
                               double gamma, Index steps, Index samples) {
  if (steps < 1 || steps > kExpmSizeCap) {
    throw InvalidArgument("residual_curve: steps must lie in [1, " +
                          std::to_string(kExpmSizeCap) + "]");
  }
  if (mode == RestartMode::polynomial) {
    ArnoldiState state = ArnoldiState::polynomial(v, steps);
    while (state.steps() < steps && !state.exact()) arnoldi_step_polynomial(state, a);
    return residual_samples(state, projected_matrix(state), t, samples);
  }
  const Factorization lu = lu_factorize_shifted(a, gamma);
  const ShiftedSolver solver = [&lu](const Vector& b) {
    SolveResult r;
    r.x = lu.solve(b);
    r.stats.converged = true;
    return r;
  };
  ArnoldiState state = ArnoldiState::shift_invert(v, gamma, steps);
  while (state.steps() < steps && !state.exact()) arnoldi_step_sai(state, a, solver);
  return residual_samples(state, projected_matrix(state), t, samples);
}

int cmd_residual_curve(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Problem p = build_problem(config.problem);
    const double gamma = config.curve_gamma.value_or(config.solver.initial_gamma(config.t));
    const ResidualSamples curve = residual_curve(p.a, p.v, config.t, config.solver.mode, gamma,
                                                 config.curve_steps, config.curve_samples);
    auto file = open_output(out_dir, config.curve_file);
    file << "s,residual_norm\n";
    for (std::size_t j = 0; j < curve.times.size(); ++j) {
      file << format_real(curve.times[j]) << ',' << format_real(curve.norms[j]) << '\n';
    }
    out << "wrote " << curve.times.size() << " samples to " << (out_dir / config.curve_file).string()
        << '\n';
    return 0;
  });
}

int cmd_export_matrix(const RunConfig& config, const std::filesystem::path& out_dir,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Problem p = build_problem(config.problem);
    auto file = open_output(out_dir, config.matrix_file);
    write_matrix_market(file, p.a);
    out << "wrote " << p.a.size() << "x" << p.a.size() << " matrix with " << p.a.nonzeros()
        << " nonzeros to " << (out_dir / config.matrix_file).string() << '\n';
    return 0;
  });
}

int cmd_verify(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    RunConfig checked = config;
    if (checked.oracle == OracleChoice::none) checked.oracle = OracleChoice::automatic;
    const RunOutcome outcome = execute(checked, out_dir, out, err);
    if (!outcome.report || outcome.status == 1) return 1;
    bool ok = true;
    const double tol = outcome.report->tol;
    if (!outcome.true_error) {
      out << "FAIL no reference solution for n=" << outcome.report->solution.size() << '\n';
      ok = false;
    } else {
      const bool pass = *outcome.true_error <= 10.0 * tol;
      out << (pass ? "PASS" : "FAIL") << " true error " << format_real(*outcome.true_error)
          << " vs 10*tol\n";
      ok = ok && pass;
    }
    double worst = 0.0;
    for (double r : outcome.report->final_checkpoints) worst = std::max(worst, r);
    const bool pass = worst <= tol * (1.0 + 1e-6);
    out << (pass ? "PASS" : "FAIL") << " checkpoint residual " << format_real(worst) << " vs tol\n";
    return ok && pass ? 0 : 1;
  });
}

}  // namespace accurt::cli
