#pragma once

// Flat key=value run configuration, one entry per line, '#' starts a comment.

#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include "accurt/problems.hpp"
#include "accurt/restart.hpp"

namespace accurt::cli {

/// Parse failure; the message names the source and line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ProblemConfig {
  /// conv-diff | maxwell | matrix-market | zero
  std::string kind = "conv-diff";
  Index nx = 102;
  double peclet = 200.0;
  FaceAverage face_average = FaceAverage::arithmetic;
  Index cells = 8;
  std::string matrix_path;
  /// Size of the zero matrix.
  Index size = 10;
};

/// When the true error is measured: auto (n <= 20000), dense, krylov, none.
enum class OracleChoice { automatic, dense, krylov, none };

struct RunConfig {
  ProblemConfig problem;
  AccuRTConfig solver;
  double t = 1.0;
  OracleChoice oracle = OracleChoice::automatic;
  std::string report_file = "report.txt";
  std::string table_file = "table.txt";
  std::string curve_file = "curve.csv";
  std::string matrix_file = "matrix.mtx";
  Index curve_steps = 10;
  Index curve_samples = 500;
  /// Shift of the curve command; the run's initial shift when unset.
  std::optional<double> curve_gamma;
};

/// Keys `problem` and `tol` are required; everything else has a default.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

struct Problem {
  SparseMatrix a;
  Vector v;
  std::string name;
};

/// Builds the matrix and starting vector. For Matrix Market input the
/// starting vector is the normalized vector of ones.
Problem build_problem(const ProblemConfig& config);

const char* to_string(OracleChoice choice);

}  // namespace accurt::cli
