#include "accurt/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "accurt/matrix_market.hpp"

namespace accurt::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

class LineParser {
 public:
  LineParser(std::string source, std::size_t line, std::string key, std::string value)
      : source_(std::move(source)), line_(line), key_(std::move(key)), value_(std::move(value)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + key_ + ": " + what);
  }

  double real() const {
    double out = 0.0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, out);
    if (ec != std::errc() || ptr != end) fail("expected a number, got '" + value_ + "'");
    return out;
  }

  Index count() const {
    long long out = 0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, out);
    if (ec != std::errc() || ptr != end) fail("expected an integer, got '" + value_ + "'");
    return static_cast<Index>(out);
  }

  bool flag() const {
    if (value_ == "true" || value_ == "1" || value_ == "yes") return true;
    if (value_ == "false" || value_ == "0" || value_ == "no") return false;
    fail("expected true or false, got '" + value_ + "'");
  }

  template <typename E>
  E choice(const std::map<std::string, E>& options) const {
    const auto it = options.find(value_);
    if (it != options.end()) return it->second;
    std::string allowed;
    for (const auto& [name, unused] : options) allowed += (allowed.empty() ? "" : ", ") + name;
    fail("unknown value '" + value_ + "' (expected one of " + allowed + ")");
  }

  const std::string& text() const { return value_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string key_;
  std::string value_;
};

using Setter = std::function<void(RunConfig&, const LineParser&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem",
       [](RunConfig& c, const LineParser& p) {
         c.problem.kind = p.choice<std::string>({{"conv-diff", "conv-diff"},
                                                 {"maxwell", "maxwell"},
                                                 {"matrix-market", "matrix-market"},
                                                 {"zero", "zero"}});
       }},
      {"nx", [](RunConfig& c, const LineParser& p) { c.problem.nx = p.count(); }},
      {"peclet", [](RunConfig& c, const LineParser& p) { c.problem.peclet = p.real(); }},
      {"face_average",
       [](RunConfig& c, const LineParser& p) {
         c.problem.face_average = p.choice<FaceAverage>(
             {{"arithmetic", FaceAverage::arithmetic}, {"harmonic", FaceAverage::harmonic}});
       }},
      {"cells", [](RunConfig& c, const LineParser& p) { c.problem.cells = p.count(); }},
      {"matrix_path", [](RunConfig& c, const LineParser& p) { c.problem.matrix_path = p.text(); }},
      {"size", [](RunConfig& c, const LineParser& p) { c.problem.size = p.count(); }},
      {"method",
       [](RunConfig& c, const LineParser& p) {
         c.solver.mode = p.choice<RestartMode>({{"rt", RestartMode::rt},
                                                {"accurt", RestartMode::accurt},
                                                {"polynomial", RestartMode::polynomial}});
       }},
      {"tol", [](RunConfig& c, const LineParser& p) { c.solver.tol = p.real(); }},
      {"t", [](RunConfig& c, const LineParser& p) { c.t = p.real(); }},
      {"k_max", [](RunConfig& c, const LineParser& p) { c.solver.k_max = p.count(); }},
      {"gamma0", [](RunConfig& c, const LineParser& p) { c.solver.gamma0 = p.real(); }},
      {"checkpoint_count",
       [](RunConfig& c, const LineParser& p) { c.solver.checkpoint_count = p.count(); }},
      {"scan_count", [](RunConfig& c, const LineParser& p) { c.solver.scan_count = p.count(); }},
      {"gamma_halving",
       [](RunConfig& c, const LineParser& p) { c.solver.gamma_halving = p.real(); }},
      {"min_gamma_ratio",
       [](RunConfig& c, const LineParser& p) { c.solver.min_gamma_ratio = p.real(); }},
      {"backend",
       [](RunConfig& c, const LineParser& p) {
         c.solver.backend =
             p.choice<Backend>({{"direct-lu", Backend::direct_lu},
                                {"gmres-ilut", Backend::gmres_ilut},
                                {"gmres-unpreconditioned", Backend::gmres_unpreconditioned}});
       }},
      {"inner_tol", [](RunConfig& c, const LineParser& p) { c.solver.inner_tol = p.real(); }},
      {"max_restarts",
       [](RunConfig& c, const LineParser& p) { c.solver.max_restarts = p.count(); }},
      {"gmres_restart",
       [](RunConfig& c, const LineParser& p) { c.solver.gmres_restart = p.count(); }},
      {"gmres_max_outer",
       [](RunConfig& c, const LineParser& p) { c.solver.gmres_max_outer = p.count(); }},
      {"ilut_drop", [](RunConfig& c, const LineParser& p) { c.solver.ilut_drop = p.real(); }},
      {"ilut_rule",
       [](RunConfig& c, const LineParser& p) {
         c.solver.ilut_rule = p.choice<DropRule>(
             {{"row-norm", DropRule::row_norm_relative}, {"absolute", DropRule::absolute}});
       }},
      {"auto_precondition",
       [](RunConfig& c, const LineParser& p) { c.solver.auto_precondition = p.flag(); }},
      {"oracle",
       [](RunConfig& c, const LineParser& p) {
         c.oracle = p.choice<OracleChoice>({{"auto", OracleChoice::automatic},
                                            {"dense", OracleChoice::dense},
                                            {"krylov", OracleChoice::krylov},
                                            {"none", OracleChoice::none}});
       }},
      {"report_file", [](RunConfig& c, const LineParser& p) { c.report_file = p.text(); }},
      {"table_file", [](RunConfig& c, const LineParser& p) { c.table_file = p.text(); }},
      {"curve_file", [](RunConfig& c, const LineParser& p) { c.curve_file = p.text(); }},
      {"matrix_file", [](RunConfig& c, const LineParser& p) { c.matrix_file = p.text(); }},
      {"curve_steps", [](RunConfig& c, const LineParser& p) { c.curve_steps = p.count(); }},
      {"curve_samples", [](RunConfig& c, const LineParser& p) { c.curve_samples = p.count(); }},
      {"curve_gamma", [](RunConfig& c, const LineParser& p) { c.curve_gamma = p.real(); }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value, got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (value.empty()) throw ConfigError(where + key + ": empty value");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    it->second(config, LineParser(source, line_no, key, value));
  }
  for (const char* required : {"problem", "tol"}) {
    if (!seen.contains(required)) {
      throw ConfigError(source + ": missing required key '" + std::string(required) + "'");
    }
  }
  if (!(config.t > 0)) throw ConfigError(source + ": t must be positive");
  if (config.curve_steps < 1 || config.curve_samples < 1) {
    throw ConfigError(source + ": curve_steps and curve_samples must be >= 1");
  }
  try {
    config.solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

Problem build_problem(const ProblemConfig& config) {
  Problem p;
  if (config.kind == "conv-diff") {
    ConvDiffOptions options;
    options.face_average = config.face_average;
    p.a = convection_diffusion_matrix(config.nx, config.peclet, options);
    p.v = conv_diff_initial(config.nx);
    p.name = "conv-diff nx=" + std::to_string(config.nx);
  } else if (config.kind == "maxwell") {
    p.a = maxwell_yee_matrix(config.cells).a;
    p.v = maxwell_initial(config.cells);
    p.name = "maxwell cells=" + std::to_string(config.cells);
  } else if (config.kind == "matrix-market") {
    if (config.matrix_path.empty()) throw ConfigError("matrix-market problem needs matrix_path");
    p.a = read_matrix_market(std::filesystem::path(config.matrix_path));
    p.v = Vector::Ones(p.a.size()) / std::sqrt(static_cast<double>(p.a.size()));
    p.name = "matrix-market " + config.matrix_path;
  } else if (config.kind == "zero") {
    if (config.size < 1) throw ConfigError("zero problem needs size >= 1");
    p.a = SparseMatrix::zero(config.size);
    p.v = Vector::Ones(config.size) / std::sqrt(static_cast<double>(config.size));
    p.name = "zero size=" + std::to_string(config.size);
  } else {
    throw ConfigError("unknown problem '" + config.kind + "'");
  }
  return p;
}

const char* to_string(OracleChoice choice) {
  switch (choice) {
    case OracleChoice::automatic: return "auto";
    case OracleChoice::dense: return "dense";
    case OracleChoice::krylov: return "krylov";
    case OracleChoice::none: return "none";
  }
  return "?";
}

}  // namespace accurt::cli
