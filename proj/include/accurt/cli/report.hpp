#pragma once

// Run report file: '#' header lines, then key=value lines grouped in
// [run], [restart N], [totals] and [solution] blocks. Reals use %.17g, so two
// identical runs give byte-identical files.

#include <optional>
#include <ostream>
#include <string>

#include "accurt/restart.hpp"

namespace accurt::cli {

struct ReportContext {
  std::string problem;
  Index n = 0;
  /// Absent when no reference was computed.
  std::optional<double> true_error;
  std::string oracle_method;
};

void write_report(std::ostream& out, const RunReport& report, const ReportContext& context);

/// "tolerance, error / steps (inner iterations)"
std::string table_header();
/// e.g. "1e-08, 1.35e-08 / 77 (0)"; the error reads "n/a" without a reference.
std::string table_row(const RunReport& report, const std::optional<double>& true_error);

/// %.17g
std::string format_real(double x);

}  // namespace accurt::cli
