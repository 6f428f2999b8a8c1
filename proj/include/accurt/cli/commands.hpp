#pragma once

// Subcommands of the accurt tool. Each returns the process exit status:
// 0 success, 1 error, 2 (run only) converged with an accuracy warning.

#include <filesystem>
#include <ostream>

#include "accurt/cli/config.hpp"

namespace accurt::cli {

/// Runs the configured method, prints the table row, writes the report and
/// the table file into `out_dir`.
int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err);

/// Residual norm of an unrestarted Arnoldi run after `steps` steps (fewer on
/// a breakdown), sampled at `samples` equidistant points of (0, t]. SAI when
/// `mode` is rt or accurt, polynomial otherwise.
ResidualSamples residual_curve(const SparseMatrix& a, const Vector& v, double t, RestartMode mode,
                               double gamma, Index steps, Index samples);

/// Writes curve_file as "s,residual_norm" CSV.
int cmd_residual_curve(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream& out, std::ostream& err);

/// Writes the problem matrix to matrix_file in Matrix Market format.
int cmd_export_matrix(const RunConfig& config, const std::filesystem::path& out_dir,
                      std::ostream& out, std::ostream& err);

/// cmd_run plus a check of the result against a reference solution: true
/// error <= 10 tol and final checkpoint residuals <= tol.
int cmd_verify(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out,
               std::ostream& err);

}  // namespace accurt::cli
